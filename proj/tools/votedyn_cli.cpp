// votedyn: command-line front end.
//
// Exit codes: 0 success, 1 IO or runtime failure, 2 usage or validation error.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "votedyn/concentration.hpp"
#include "votedyn/dynamics.hpp"
#include "votedyn/experiment.hpp"
#include "votedyn/fixed_points.hpp"
#include "votedyn/graph.hpp"
#include "votedyn/report.hpp"
#include "votedyn/rng.hpp"
#include "votedyn/voting.hpp"

namespace {

using namespace votedyn;

// Validation failures that should exit with status 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("bad seed '" + text + "' from " + source);
}

std::uint64_t env_seed_or_default() {
  if (const char* env = std::getenv("VOTEDYN_SEED"); env != nullptr && *env != '\0') {
    return parse_seed(env, "VOTEDYN_SEED");
  }
  return kDefaultMasterSeed;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// Writes to `path`, or standard output when path is empty or "-".
template <class Fn>
void with_output(const std::string& path, Fn fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out = open_output(path);
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

double resolve_u(const std::optional<double>& r, const std::optional<double>& u) {
  if (r.has_value() == u.has_value()) throw UsageError("give exactly one of --r and --u");
  if (r) {
    if (!(*r >= 0.0 && *r <= 1.0)) throw UsageError("--r must lie in [0, 1]");
    return u_of_r(*r);
  }
  if (!(*u >= 0.0 && *u <= 1.0)) throw UsageError("--u must lie in [0, 1]");
  return *u;
}

// ---- experiment configuration shared by the harness subcommands ----

struct ExperimentFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::string> model;
  std::optional<std::uint32_t> n;
  std::optional<double> p;
  std::optional<double> r;
  std::optional<std::string> init;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> max_steps;
  std::optional<std::string> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> id;
  bool shared_graph = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON configuration file");
  cmd->add_option("--out-dir", f.out_dir, "Directory for result files")->capture_default_str();
  cmd->add_option("--model", f.model, "bo2, bo3 or best-of-K");
  cmd->add_option("--n", f.n, "Vertices per community");
  cmd->add_option("--p", f.p, "Intra-community edge probability");
  cmd->add_option("--r", f.r, "q/p");
  cmd->add_option("--init", f.init, "Initial family, e.g. biased_global:0.2 or clustered:0.88,0");
  cmd->add_option("--trials", f.trials, "Trials");
  cmd->add_option("--max-steps", f.max_steps, "Step cap per trial");
  cmd->add_option("--seed", f.seed, "Master seed (default: $VOTEDYN_SEED, then 0xC0FFEE)");
  cmd->add_option("--workers", f.workers, "Worker threads");
  cmd->add_option("--id", f.id, "Experiment id (also names the output files)");
  cmd->add_flag("--shared-graph", f.shared_graph, "One graph for all trials");
}

Json load_config_json(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("$: invalid JSON: ") + e.what());
  }
}

// File values first, then flags on top.
ExperimentConfig resolve_config(const ExperimentFlags& f, const Json& file, const std::string& default_id,
                                const std::vector<std::string>& extra_keys) {
  Json j = file;
  if (!j.is_object()) throw SchemaError("$: expected an object");
  if (!j.contains("id")) j["id"] = default_id;
  if (!j.contains("master_seed")) j["master_seed"] = env_seed_or_default();
  if (f.model) j["model"] = *f.model;
  if (f.n) j["n"] = *f.n;
  if (f.p) j["p"] = *f.p;
  if (f.r) j["r"] = *f.r;
  if (f.init) j["init"] = *f.init;
  if (f.trials) j["trials"] = *f.trials;
  if (f.max_steps) j["max_steps"] = *f.max_steps;
  if (f.seed) j["master_seed"] = parse_seed(*f.seed, "--seed");
  if (f.workers) j["workers"] = *f.workers;
  if (f.id) j["id"] = *f.id;
  if (f.shared_graph) j["shared_graph"] = true;
  return config_from_json(j, extra_keys);
}

std::string file_stem(const std::string& id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return out.empty() ? "experiment" : out;
}

std::string output_path(const ExperimentFlags& f, const ExperimentConfig& cfg, const std::string& ext) {
  std::error_code ec;
  std::filesystem::create_directories(f.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + f.out_dir + ": " + ec.message());
  return (std::filesystem::path(f.out_dir) / (file_stem(cfg.id) + ext)).string();
}

void write_json_file(const std::string& path, const Json& j) {
  with_output(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  std::cerr << "wrote " << path << '\n';
}

void write_records_file(const std::string& path, const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  with_output(path, [&](std::ostream& out) {
    write_results_header(out);
    write_results_rows(out, cfg, records);
  });
  std::cerr << "wrote " << path << '\n';
}

// ---- subcommands ----

struct GenerateArgs {
  std::uint32_t n = 0;
  double p = 0.0;
  double q = 0.0;
  std::optional<std::string> seed;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const std::uint64_t seed = a.seed ? parse_seed(*a.seed, "--seed") : env_seed_or_default();
  const Graph g = generate_sbm(a.n, a.p, a.q, seed);
  with_output(a.out, [&](std::ostream& out) { write_graph(out, g); });
  const DegreeStats ds = degree_stats(g);
  const ConnectivityReport cr = connectivity_report(g);
  const Json summary{{"n", g.n()},
                     {"edges", g.edge_count()},
                     {"min_deg", ds.min_deg},
                     {"max_deg", ds.max_deg},
                     {"mean_deg", ds.mean_deg},
                     {"max_abs_dev", ds.max_abs_dev},
                     {"normalized_dev", std::isfinite(ds.normalized_dev) ? Json(ds.normalized_dev) : Json(nullptr)},
                     {"connected", cr.connected},
                     {"bipartite", cr.bipartite}};
  (a.out.empty() || a.out == "-" ? std::cerr : std::cout) << summary.dump() << '\n';
  if (!cr.connected) std::cerr << "warning: graph is disconnected (" << cr.components << " components)\n";
  return 0;
}

struct SimulateArgs {
  std::string graph;
  std::optional<std::uint32_t> n;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> r;
  std::string rule = "bo3";
  std::string init = "biased_global:0.2";
  std::uint64_t max_steps = 1000;
  std::optional<std::string> seed;
  std::string path = "auto";
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const VotingRule rule = rule_from_name(a.rule);
  const InitFamily family = parse_init(a.init);
  const std::uint64_t seed = a.seed ? parse_seed(*a.seed, "--seed") : env_seed_or_default();
  StepPath path = StepPath::kAuto;
  if (a.path == "sampling") {
    path = StepPath::kSampling;
  } else if (a.path == "probability") {
    path = StepPath::kProbability;
  } else if (a.path != "auto") {
    throw UsageError("--path must be auto, sampling or probability");
  }
  std::optional<Graph> g;
  if (!a.graph.empty()) {
    if (a.n || a.p || a.q || a.r) throw UsageError("--graph excludes --n/--p/--q/--r");
    g = load_graph(a.graph);
  } else {
    if (!a.n || !a.p) throw UsageError("give --graph, or --n and --p with --q or --r");
    if (a.q && a.r) throw UsageError("give at most one of --q and --r");
    const double q = a.q ? *a.q : *a.p * a.r.value_or(1.0);
    g = generate_sbm(*a.n, *a.p, q, derive_key(seed, hash_tag("graph")));
  }
  const OpinionState s0 = make_initial(*g, family, derive_key(seed, hash_tag("init")));
  const Trajectory traj =
      simulate(*g, s0, rule, a.max_steps, derive_key(seed, hash_tag("steps")), true, {}, path);
  with_output(a.out, [&](std::ostream& out) { write_trajectory_csv(out, traj); });
  return 0;
}

struct AnalyzeArgs {
  std::string model = "bo3";
  std::optional<double> r;
  std::optional<double> u;
  std::string out;
  std::string orbit;
  std::string orbit_start = "0.3,0.2";
  std::uint64_t orbit_steps = 100;
  std::string space = "delta";
};

MapSpace parse_space(const std::string& s) {
  if (s == "alpha") return MapSpace::kAlpha;
  if (s == "delta") return MapSpace::kDelta;
  throw UsageError("--space must be alpha or delta");
}

int cmd_analyze(const AnalyzeArgs& a) {
  const ModelTag model = model_from_name(a.model);
  const double u = resolve_u(a.r, a.u);
  const Json j = analysis_json(model, u, analyze_fixed_points(model, u));
  with_output(a.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  if (!a.orbit.empty()) {
    const Clustered start = std::get<Clustered>(parse_init("clustered:" + a.orbit_start));
    const MapSpace space = parse_space(a.space);
    const InducedMap m = InducedMap::from_u(model == ModelTag::kBo3 ? make_rule_bo3() : make_rule_bo2(), u);
    const Orbit orbit = iterate(m, space, {start.d1, start.d2}, a.orbit_steps);
    with_output(a.orbit, [&](std::ostream& out) { write_orbit_csv(out, m, orbit); });
  }
  return 0;
}

struct VectorFieldArgs {
  std::string model = "bo3";
  std::optional<double> r;
  std::optional<double> u;
  double step = 0.05;
  std::string space = "alpha";
  std::string out;
};

int cmd_vector_field(const VectorFieldArgs& a) {
  const ModelTag model = model_from_name(a.model);
  const double u = resolve_u(a.r, a.u);
  if (!(a.step > 0.0 && a.step <= 2.0)) throw UsageError("--step must lie in (0, 2]");
  const InducedMap m = InducedMap::from_u(model == ModelTag::kBo3 ? make_rule_bo3() : make_rule_bo2(), u);
  SvgStats stats;
  with_output(a.out, [&](std::ostream& out) { stats = write_vector_field_svg(out, m, parse_space(a.space), a.step); });
  std::cerr << "arrows=" << stats.arrows << " markers=" << stats.markers << " sinks=" << stats.sink_markers << '\n';
  return 0;
}

int cmd_sweep(const ExperimentFlags& f, const std::vector<double>& r_flag) {
  const Json file = load_config_json(f.config_path);
  const ExperimentConfig cfg = resolve_config(f, file, "sweep", {"r_grid"});
  std::vector<double> grid = r_flag.empty() ? json_number_list(file, "r_grid", {cfg.r}) : r_flag;
  if (grid.empty()) throw SchemaError("$.r_grid: must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      throw SchemaError("$.r_grid[" + std::to_string(i) + "]: must lie in [0, 1]");
    }
  }
  std::vector<SweepBlock> blocks;
  for (double r : grid) {
    auto block = phase_sweep(cfg, {r});
    const auto& b = block.front();
    std::cerr << "[sweep] r=" << format_real(r) << " consensus " << b.summary.consensus << '/' << b.summary.trials
              << " within budget " << b.budget << ": " << b.fraction_within_budget << '\n';
    blocks.push_back(std::move(block.front()));
  }
  with_output(output_path(f, cfg, ".csv"), [&](std::ostream& out) {
    write_results_header(out);
    for (const auto& b : blocks) write_results_rows(out, b.config, b.records);
  });
  std::cerr << "wrote " << output_path(f, cfg, ".csv") << '\n';
  Json j = sweep_json(cfg, blocks);
  j["config"]["r_grid"] = grid;
  write_json_file(output_path(f, cfg, ".json"), j);
  return 0;
}

int cmd_sink(const ExperimentFlags& f, std::optional<double> eps_flag, std::optional<std::uint64_t> horizon_flag) {
  const Json file = load_config_json(f.config_path);
  ExperimentConfig cfg = resolve_config(f, file, "sink-persist", {"epsilon", "horizon"});
  const double eps = eps_flag.value_or(json_number(file, "epsilon", 0.1));
  const std::uint64_t horizon = horizon_flag.value_or(json_unsigned(file, "horizon", 10000));
  if (!(eps > 0.0)) throw SchemaError("$.epsilon: must be positive");
  const SinkReport rep = sink_persistence(cfg, eps, horizon);
  std::cerr << "[sink-persist] escapes " << rep.escapes << '/' << rep.records.size() << ", consensus "
            << rep.consensus << '\n';
  ExperimentConfig shown = cfg;
  shown.init = Clustered{rep.center.d1, rep.center.d2};
  shown.max_steps = horizon;
  write_records_file(output_path(f, cfg, ".csv"), shown, rep.records);
  write_json_file(output_path(f, cfg, ".json"), sink_json(shown, rep));
  return 0;
}

int cmd_escape(const ExperimentFlags& f, std::optional<double> kappa_flag) {
  const Json file = load_config_json(f.config_path);
  const ExperimentConfig cfg = resolve_config(f, file, "escape", {"kappa", "limit_constant"});
  const double kappa = kappa_flag.value_or(json_number(file, "kappa", 0.2));
  const double c = json_number(file, "limit_constant", 15.0);
  if (!(kappa >= 0.0 && kappa < 1.0)) throw SchemaError("$.kappa: must lie in [0, 1)");
  const EscapeReport rep = escape_time(cfg, kappa, c);
  std::cerr << "[escape] within " << rep.limit << " steps: " << rep.escaped_within_limit << '/' << rep.records.size()
            << '\n';
  write_records_file(output_path(f, cfg, ".csv"), cfg, rep.records);
  write_json_file(output_path(f, cfg, ".json"), escape_json(cfg, rep));
  return 0;
}

int cmd_worst_case(const ExperimentFlags& f) {
  const Json file = load_config_json(f.config_path);
  const ExperimentConfig cfg = resolve_config(f, file, "worst-case", {"limit_constant"});
  const double c = json_number(file, "limit_constant", 25.0);
  const auto families = worst_case_families(cfg);
  const WorstCaseReport rep = worst_case_scan(cfg, families, c);
  for (const auto& fr : rep.families) {
    std::cerr << "[worst-case] " << format_init(fr.family) << " consensus " << fr.summary.consensus << '/'
              << fr.summary.trials << '\n';
  }
  with_output(output_path(f, cfg, ".csv"), [&](std::ostream& out) {
    write_results_header(out);
    for (const auto& fr : rep.families) {
      ExperimentConfig shown = cfg;
      shown.init = fr.family;
      write_results_rows(out, shown, fr.records);
    }
  });
  std::cerr << "wrote " << output_path(f, cfg, ".csv") << '\n';
  write_json_file(output_path(f, cfg, ".json"), worst_case_json(cfg, rep));
  return 0;
}

int cmd_deviation(const ExperimentFlags& f, std::optional<std::uint64_t> t_flag) {
  const Json file = load_config_json(f.config_path);
  const ExperimentConfig cfg = resolve_config(f, file, "deviation", {"t_max"});
  const std::uint64_t t_max = t_flag.value_or(json_unsigned(file, "t_max", 10));
  if (t_max > 50) throw SchemaError("$.t_max: must not exceed 50");
  const DeviationReport rep = trajectory_deviation(cfg, t_max);
  std::cerr << "[deviation] peak median " << rep.peak_median << ", peak ratio " << rep.peak_ratio << '\n';
  write_json_file(output_path(f, cfg, ".json"), deviation_json(cfg, t_max, rep));
  return 0;
}

int cmd_scaling(const ExperimentFlags& f) {
  const Json file = load_config_json(f.config_path);
  const ExperimentConfig cfg = resolve_config(f, file, "scaling", {"n_grid"});
  std::vector<std::uint32_t> grid;
  for (double v : json_number_list(file, "n_grid", {250, 500, 1000, 2000})) {
    if (!(v >= 1.0 && v <= (1U << 30)) || v != std::floor(v)) throw SchemaError("$.n_grid: entries must be positive integers");
    grid.push_back(static_cast<std::uint32_t>(v));
  }
  const ScalingReport rep = consensus_time_scaling(cfg, grid);
  std::cerr << "[scaling] status " << to_string(rep.status) << '\n';
  write_json_file(output_path(f, cfg, ".json"), scaling_json(cfg, rep));
  return 0;
}

int cmd_goodness(const ExperimentFlags& f, std::optional<std::uint64_t> samples_flag, std::optional<unsigned> l_flag,
                 const std::vector<std::uint32_t>& sizes_flag) {
  const Json file = load_config_json(f.config_path);
  const ExperimentConfig cfg = resolve_config(f, file, "goodness", {"samples", "l", "sizes"});
  const std::uint64_t samples = samples_flag.value_or(json_unsigned(file, "samples", 100));
  const std::uint64_t l = l_flag.value_or(static_cast<unsigned>(json_unsigned(file, "l", 2)));
  if (samples < 1) throw SchemaError("$.samples: must be at least 1");
  if (l < 1 || l > 3) throw SchemaError("$.l: must be 1, 2 or 3");
  std::vector<std::uint32_t> sizes = sizes_flag;
  if (sizes.empty()) {
    for (double v : json_number_list(file, "sizes", {static_cast<double>(cfg.n)})) {
      if (!(v >= 1.0 && v <= (1U << 30)) || v != std::floor(v)) throw SchemaError("$.sizes: entries must be positive integers");
      sizes.push_back(static_cast<std::uint32_t>(v));
    }
  }
  const VotingRule rule = rule_from_name(cfg.model);
  Json j;
  j["experiment"] = "goodness";
  j["config"] = config_to_json(cfg);
  j["samples"] = samples;
  j["results"] = Json::array();
  for (std::uint32_t n : sizes) {
    const std::uint64_t key = derive_key(derive_key(cfg.master_seed, hash_tag(cfg.id)), n);
    const Graph g = generate_sbm(n, cfg.p, cfg.q(), derive_key(key, hash_tag("graph")));
    const ConnectivityReport cr = connectivity_report(g);
    if (!cr.connected) std::cerr << "warning: graph with n=" << n << " is disconnected\n";
    const GoodnessReport rep = goodness(g, rule, samples, key);
    const WStatReport w = w_concentration_scan(g, static_cast<unsigned>(l), samples, derive_key(key, hash_tag("w")));
    const DegreeStats ds = degree_stats(g);
    std::cerr << "[goodness] n=" << n << " p2=" << rep.p2.max_normalized << " p3=" << rep.p3.max_normalized
              << " var=" << rep.variance.max_normalized << " w=" << w.max_normalized_dev << '\n';
    j["results"].push_back({{"n", n},
                            {"connected", cr.connected},
                            {"bipartite", cr.bipartite},
                            {"degree_normalized_dev",
                             std::isfinite(ds.normalized_dev) ? Json(ds.normalized_dev) : Json(nullptr)},
                            {"goodness", goodness_json(rep)},
                            {"w", wstat_json(w)}});
  }
  write_json_file(output_path(f, cfg, ".json"), j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"votedyn: two-opinion voting on the two-community block model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "votedyn 0.1.0");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Sample G(2n,p,q) and write an edge list");
  c_gen->add_option("--n", gen.n, "Vertices per community")->required();
  c_gen->add_option("--p", gen.p, "Intra-community edge probability")->required();
  c_gen->add_option("--q", gen.q, "Cross-community edge probability")->required();
  c_gen->add_option("--seed", gen.seed, "Graph seed");
  c_gen->add_option("-o,--out", gen.out, "Output file (default: stdout)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run one trajectory and write it as CSV");
  c_sim->add_option("--graph", sim.graph, "Edge-list file");
  c_sim->add_option("--n", sim.n, "Vertices per community");
  c_sim->add_option("--p", sim.p, "Intra-community edge probability");
  c_sim->add_option("--q", sim.q, "Cross-community edge probability");
  c_sim->add_option("--r", sim.r, "q/p");
  c_sim->add_option("--rule", sim.rule, "bo2, bo3 or best-of-K")->capture_default_str();
  c_sim->add_option("--init", sim.init, "Initial family")->capture_default_str();
  c_sim->add_option("--max-steps", sim.max_steps, "Step cap")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Seed");
  c_sim->add_option("--path", sim.path, "auto, sampling or probability")->capture_default_str();
  c_sim->add_option("-o,--out", sim.out, "Output CSV (default: stdout)");

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Fixed points, Jacobians and classes as JSON");
  c_an->add_option("--model", an.model, "bo3 or bo2")->capture_default_str();
  c_an->add_option("--r", an.r, "q/p");
  c_an->add_option("--u", an.u, "(1-r)/(1+r)");
  c_an->add_option("-o,--out", an.out, "Output JSON (default: stdout)");
  c_an->add_option("--orbit", an.orbit, "Also write an orbit CSV here");
  c_an->add_option("--orbit-start", an.orbit_start, "Start point x1,x2")->capture_default_str();
  c_an->add_option("--orbit-steps", an.orbit_steps, "Orbit length")->capture_default_str();
  c_an->add_option("--space", an.space, "alpha or delta")->capture_default_str();

  VectorFieldArgs vf;
  auto* c_vf = app.add_subcommand("vector-field", "Render the induced map as an SVG arrow field");
  c_vf->add_option("--model", vf.model, "bo3 or bo2")->capture_default_str();
  c_vf->add_option("--r", vf.r, "q/p");
  c_vf->add_option("--u", vf.u, "(1-r)/(1+r)");
  c_vf->add_option("--step", vf.step, "Grid step")->capture_default_str();
  c_vf->add_option("--space", vf.space, "alpha or delta")->capture_default_str();
  c_vf->add_option("-o,--out", vf.out, "Output SVG (default: stdout)");

  ExperimentFlags f_sweep, f_sink, f_escape, f_worst, f_dev, f_scale, f_good;
  std::vector<double> r_grid;
  auto* c_sweep = app.add_subcommand("sweep", "Consensus fraction and T_cons across r");
  add_experiment_flags(c_sweep, f_sweep);
  c_sweep->add_option("--r-grid", r_grid, "Values of r (overrides the config)")->delimiter(',');

  std::optional<double> eps;
  std::optional<std::uint64_t> horizon;
  auto* c_sink = app.add_subcommand("sink-persist", "Escapes from the d2* sink below the threshold");
  add_experiment_flags(c_sink, f_sink);
  c_sink->add_option("--epsilon", eps, "Ball radius (default 0.1)");
  c_sink->add_option("--horizon", horizon, "Steps per trial (default 10000)");

  std::optional<double> kappa;
  auto* c_escape = app.add_subcommand("escape", "First time |delta2| exceeds kappa");
  add_experiment_flags(c_escape, f_escape);
  c_escape->add_option("--kappa", kappa, "Threshold (default 0.2)");

  auto* c_worst = app.add_subcommand("worst-case", "Consensus time over adversarial initial families");
  add_experiment_flags(c_worst, f_worst);

  std::optional<std::uint64_t> t_max;
  auto* c_dev = app.add_subcommand("deviation", "Trajectory versus mean-field orbit");
  add_experiment_flags(c_dev, f_dev);
  c_dev->add_option("--t-max", t_max, "Steps (at most 50, default 10)");

  auto* c_scale = app.add_subcommand("scaling", "Median T_cons against ln n");
  add_experiment_flags(c_scale, f_scale);

  std::optional<std::uint64_t> samples;
  std::optional<unsigned> l;
  std::vector<std::uint32_t> sizes;
  auto* c_good = app.add_subcommand("goodness", "Empirical concentration constants");
  add_experiment_flags(c_good, f_good);
  c_good->add_option("--samples", samples, "Samples per probe (default 100)");
  c_good->add_option("--l", l, "W-statistic order (default 2)");
  c_good->add_option("--sizes", sizes, "Community sizes to probe")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_gen->parsed()) return cmd_generate(gen);
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_an->parsed()) return cmd_analyze(an);
    if (c_vf->parsed()) return cmd_vector_field(vf);
    if (c_sweep->parsed()) return cmd_sweep(f_sweep, r_grid);
    if (c_sink->parsed()) return cmd_sink(f_sink, eps, horizon);
    if (c_escape->parsed()) return cmd_escape(f_escape, kappa);
    if (c_worst->parsed()) return cmd_worst_case(f_worst);
    if (c_dev->parsed()) return cmd_deviation(f_dev, t_max);
    if (c_scale->parsed()) return cmd_scaling(f_scale);
    if (c_good->parsed()) return cmd_goodness(f_good, samples, l, sizes);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

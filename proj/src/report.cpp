#include "votedyn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace votedyn {
namespace {

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw std::invalid_argument("bad number '" + s + "' in " + what);
  }
  return v;
}

std::uint32_t parse_count(const std::string& s, const std::string& what) {
  std::uint32_t v = 0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("bad count '" + s + "' in " + what);
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"model",  "n",           "p",            "r",
                                             "init",   "trials",      "max_steps",    "master_seed",
                                             "shared_graph", "workers", "id",          "budget_constant"};
  return keys;
}

std::string path_of(const std::string& key) { return "$." + key; }

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_count(const std::optional<std::uint64_t>& v) { return v ? Json(*v) : Json(nullptr); }

Json records_json(const std::vector<TrialRecord>& records) {
  Json arr = Json::array();
  for (const auto& r : records) {
    arr.push_back({{"trial", r.trial},
                   {"seed", r.seed},
                   {"t_cons", r.t_cons},
                   {"timeout", r.timeout},
                   {"final_opinion", r.final_opinion},
                   {"peak_abs_delta2", r.peak_abs_delta2},
                   {"event_step", optional_count(r.event_step)}});
  }
  return arr;
}

}  // namespace

InitFamily parse_init(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::vector<std::string> args =
      colon == std::string::npos ? std::vector<std::string>{} : split(text.substr(colon + 1), ',');
  const auto want = [&](std::size_t count) {
    if (args.size() != count) {
      throw std::invalid_argument("init family " + name + " takes " + std::to_string(count) + " argument(s)");
    }
  };
  if (name == "half_half") {
    want(0);
    return HalfHalf{};
  }
  if (name == "biased_global") {
    want(1);
    return BiasedGlobal{parse_real(args[0], name)};
  }
  if (name == "clustered") {
    want(2);
    return Clustered{parse_real(args[0], name), parse_real(args[1], name)};
  }
  if (name == "exact_counts") {
    want(2);
    return ExactCounts{parse_count(args[0], name), parse_count(args[1], name)};
  }
  if (name == "random_density") {
    want(1);
    return RandomDensity{parse_real(args[0], name)};
  }
  throw std::invalid_argument("unknown init family: " + name);
}

std::string format_init(const InitFamily& family) {
  if (const auto* f = std::get_if<BiasedGlobal>(&family)) return "biased_global:" + format_real(f->b);
  if (std::holds_alternative<HalfHalf>(family)) return "half_half";
  if (const auto* f = std::get_if<Clustered>(&family)) {
    return "clustered:" + format_real(f->d1) + "," + format_real(f->d2);
  }
  if (const auto* f = std::get_if<ExactCounts>(&family)) {
    return "exact_counts:" + std::to_string(f->a1) + "," + std::to_string(f->a2);
  }
  return "random_density:" + format_real(std::get<RandomDensity>(family).rho);
}

double json_number(const Json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw SchemaError(path_of(key) + ": expected a number");
  return v.get<double>();
}

std::uint64_t json_unsigned(const Json& j, const std::string& key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) throw SchemaError(path_of(key) + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::vector<double> json_number_list(const Json& j, const std::string& key,
                                     const std::vector<double>& fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_array()) throw SchemaError(path_of(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw SchemaError(path_of(key) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

ExperimentConfig config_from_json(const Json& j, const std::vector<std::string>& extra_keys) {
  if (!j.is_object()) throw SchemaError("$: expected an object");
  for (const auto& item : j.items()) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end() &&
        std::find(extra_keys.begin(), extra_keys.end(), item.key()) == extra_keys.end()) {
      throw SchemaError(path_of(item.key()) + ": unknown field");
    }
  }
  ExperimentConfig cfg;
  const auto string_field = [&](const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw SchemaError(path_of(key) + ": expected a string");
    return j.at(key).get<std::string>();
  };
  cfg.model = string_field("model", cfg.model);
  try {
    rule_from_name(cfg.model);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path_of("model") + ": " + e.what());
  }
  const std::uint64_t n = json_unsigned(j, "n", cfg.n);
  if (n < 1 || n > (1U << 30)) throw SchemaError(path_of("n") + ": must lie in [1, 2^30]");
  cfg.n = static_cast<std::uint32_t>(n);
  cfg.p = json_number(j, "p", cfg.p);
  cfg.r = json_number(j, "r", cfg.r);
  if (j.contains("init")) {
    try {
      cfg.init = parse_init(string_field("init", ""));
    } catch (const SchemaError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path_of("init") + ": " + e.what());
    }
  }
  cfg.trials = json_unsigned(j, "trials", cfg.trials);
  cfg.max_steps = json_unsigned(j, "max_steps", cfg.max_steps);
  if (j.contains("master_seed") && j.at("master_seed").is_string()) {
    const std::string s = j.at("master_seed").get<std::string>();
    try {
      std::size_t used = 0;
      cfg.master_seed = std::stoull(s, &used, 0);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw SchemaError(path_of("master_seed") + ": expected an integer or integer string");
    }
  } else {
    cfg.master_seed = json_unsigned(j, "master_seed", cfg.master_seed);
  }
  if (j.contains("shared_graph")) {
    if (!j.at("shared_graph").is_boolean()) throw SchemaError(path_of("shared_graph") + ": expected a boolean");
    cfg.shared_graph = j.at("shared_graph").get<bool>();
  }
  const std::uint64_t workers = json_unsigned(j, "workers", cfg.workers);
  if (workers > 1024) throw SchemaError(path_of("workers") + ": must not exceed 1024");
  cfg.workers = static_cast<unsigned>(workers);
  cfg.id = string_field("id", cfg.id);
  cfg.budget_constant = json_number(j, "budget_constant", cfg.budget_constant);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.find(':') != std::string::npos && msg.find(' ') > msg.find(':')) throw SchemaError("$." + msg);
    throw SchemaError(path_of("init") + ": " + msg);
  }
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  return {{"model", cfg.model},
          {"n", cfg.n},
          {"p", cfg.p},
          {"q", cfg.q()},
          {"r", cfg.r},
          {"init", format_init(cfg.init)},
          {"trials", cfg.trials},
          {"max_steps", cfg.max_steps},
          {"master_seed", cfg.master_seed},
          {"shared_graph", cfg.shared_graph},
          {"workers", cfg.workers},
          {"id", cfg.id},
          {"budget_constant", cfg.budget_constant}};
}

std::string model_name(ModelTag model) {
  switch (model) {
    case ModelTag::kBo3:
      return "bo3";
    case ModelTag::kBo2:
      return "bo2";
    case ModelTag::kGeneric:
      break;
  }
  return "generic";
}

ModelTag model_from_name(const std::string& name) {
  if (name == "bo3") return ModelTag::kBo3;
  if (name == "bo2") return ModelTag::kBo2;
  throw std::invalid_argument("unknown model: " + name + " (expected bo3 or bo2)");
}

Json fixed_point_json(const FixedPointReport& rep) {
  Json j;
  j["id"] = to_string(rep.id);
  j["exists"] = rep.exists;
  if (!rep.exists) {
    for (const char* key : {"location", "jacobian", "eigenvalues", "singular_values", "class", "signs"}) {
      j[key] = nullptr;
    }
    return j;
  }
  j["location"] = {rep.location.d1, rep.location.d2};
  j["jacobian"] = {{rep.jacobian.j11, rep.jacobian.j12}, {rep.jacobian.j21, rep.jacobian.j22}};
  j["eigenvalues"] = Json::array();
  for (const auto& ev : rep.eigenvalues) j["eigenvalues"].push_back({{"re", ev.real()}, {"im", ev.imag()}});
  j["singular_values"] = {rep.singular_values.first, rep.singular_values.second};
  j["class"] = to_string(rep.cls);
  auto ev = rep.eigenvalues;
  const auto size = [](std::complex<double> z) { return z.imag() == 0.0 ? z.real() : std::abs(z); };
  if (size(ev[1]) > size(ev[0])) std::swap(ev[0], ev[1]);
  j["signs"] = std::string{'(', eigen_sign(ev[0]), ',', eigen_sign(ev[1]), ')'};
  return j;
}

Json analysis_json(ModelTag model, double u, const std::vector<FixedPointReport>& reports) {
  Json j;
  j["model"] = model_name(model);
  j["u"] = u;
  j["r"] = r_of_u(u);
  j["fixed_points"] = Json::array();
  for (const auto& rep : reports) j["fixed_points"].push_back(fixed_point_json(rep));
  return j;
}

Json summary_json(const TrialSummary& s) {
  return {{"trials", s.trials},
          {"consensus", s.consensus},
          {"timeouts", s.timeouts},
          {"consensus_fraction", s.consensus_fraction},
          {"median_t_cons", optional_number(s.median_t_cons)},
          {"max_t_cons", optional_count(s.max_t_cons)}};
}

Json sweep_json(const ExperimentConfig& cfg, const std::vector<SweepBlock>& blocks) {
  Json j;
  j["experiment"] = "sweep";
  j["config"] = config_to_json(cfg);
  j["blocks"] = Json::array();
  for (const auto& b : blocks) {
    j["blocks"].push_back({{"r", b.r},
                           {"q", b.config.q()},
                           {"budget", b.budget},
                           {"fraction_within_budget", b.fraction_within_budget},
                           {"summary", summary_json(b.summary)}});
  }
  return j;
}

Json sink_json(const ExperimentConfig& cfg, const SinkReport& rep) {
  Json j;
  j["experiment"] = "sink-persist";
  j["config"] = config_to_json(cfg);
  j["center"] = {rep.center.d1, rep.center.d2};
  j["epsilon"] = rep.epsilon;
  j["horizon"] = rep.horizon;
  j["escapes"] = rep.escapes;
  j["consensus"] = rep.consensus;
  j["escape_fraction"] = rep.escape_fraction;
  j["consensus_fraction"] = rep.consensus_fraction;
  j["records"] = records_json(rep.records);
  return j;
}

Json escape_json(const ExperimentConfig& cfg, const EscapeReport& rep) {
  Json j;
  j["experiment"] = "escape";
  j["config"] = config_to_json(cfg);
  j["kappa"] = rep.kappa;
  j["limit"] = rep.limit;
  j["escaped_within_limit"] = rep.escaped_within_limit;
  j["all_within_limit"] = rep.all_within_limit;
  j["median"] = optional_number(rep.median);
  j["max"] = optional_count(rep.max);
  j["records"] = records_json(rep.records);
  return j;
}

Json deviation_json(const ExperimentConfig& cfg, std::uint64_t t_max, const DeviationReport& rep) {
  Json j;
  j["experiment"] = "deviation";
  j["config"] = config_to_json(cfg);
  j["t_max"] = t_max;
  j["peak_median"] = rep.peak_median;
  j["peak_ratio"] = rep.peak_ratio;
  j["rows"] = Json::array();
  for (const auto& r : rep.rows) {
    j["rows"].push_back({{"t", r.t}, {"median", r.median}, {"max", r.max}, {"scale", r.scale}});
  }
  return j;
}

Json worst_case_json(const ExperimentConfig& cfg, const WorstCaseReport& rep) {
  Json j;
  j["experiment"] = "worst-case";
  j["config"] = config_to_json(cfg);
  j["limit"] = rep.limit;
  j["max_t_cons"] = optional_count(rep.max_t_cons);
  j["timeouts"] = rep.timeouts;
  j["total_trials"] = rep.total_trials;
  j["fraction_over_limit"] = rep.fraction_over_limit;
  j["families"] = Json::array();
  for (const auto& f : rep.families) {
    j["families"].push_back({{"init", format_init(f.family)}, {"summary", summary_json(f.summary)}});
  }
  return j;
}

Json scaling_json(const ExperimentConfig& cfg, const ScalingReport& rep) {
  Json j;
  j["experiment"] = "scaling";
  j["config"] = config_to_json(cfg);
  j["status"] = to_string(rep.status);
  j["slope"] = optional_number(rep.slope);
  j["intercept"] = optional_number(rep.intercept);
  j["points"] = Json::array();
  for (const auto& p : rep.points) {
    j["points"].push_back({{"n", p.n}, {"median_t_cons", optional_number(p.median)}, {"timeouts", p.timeouts}});
  }
  return j;
}

Json probe_json(const ProbeResult& res) {
  return {{"samples", res.samples}, {"max_normalized", res.max_normalized}, {"worst", res.worst}};
}

Json goodness_json(const GoodnessReport& rep) {
  return {{"rule", rep.rule},
          {"p2", probe_json(rep.p2)},
          {"p3", probe_json(rep.p3)},
          {"variance", probe_json(rep.variance)}};
}

Json wstat_json(const WStatReport& rep) {
  return {{"l", rep.l},
          {"samples", rep.samples},
          {"normalizer", rep.normalizer},
          {"max_normalized_dev", rep.max_normalized_dev}};
}

namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 40.0;

struct Frame {
  double lo;
  double hi;
  double px(double x) const { return kMargin + (x - lo) / (hi - lo) * (kCanvas - 2 * kMargin); }
  double py(double y) const { return kCanvas - kMargin - (y - lo) / (hi - lo) * (kCanvas - 2 * kMargin); }
  double scale() const { return (kCanvas - 2 * kMargin) / (hi - lo); }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

SvgStats write_vector_field_svg(std::ostream& out, const InducedMap& m, MapSpace space, double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 2.0)) throw std::invalid_argument("grid step must lie in (0, 2]");
  const bool alpha = space == MapSpace::kAlpha;
  const Frame frame{alpha ? 0.0 : -1.0, 1.0};
  const auto count = static_cast<long>(std::floor((frame.hi - frame.lo) / grid_step + 1e-9));
  const double cap = std::min(0.9 * grid_step * frame.scale(), 60.0);
  SvgStats stats;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">\n"
      << "<style>.arrow{stroke:#335;stroke-width:1.2;fill:none}"
         ".domain{stroke:#999;fill:none}.marker{stroke:#b00;stroke-width:1.5}"
         "text{font:12px sans-serif;fill:#b00}</style>\n";
  out << "<desc>" << (alpha ? "alpha" : "delta") << " space, model=" << model_name(m.model())
      << ", u=" << format_real(m.u()) << ", r=" << format_real(m.r()) << "</desc>\n";
  if (alpha) {
    out << "<rect class=\"domain\" x=\"" << num(frame.px(0)) << "\" y=\"" << num(frame.py(1)) << "\" width=\""
        << num(frame.scale()) << "\" height=\"" << num(frame.scale()) << "\"/>\n";
  } else {
    out << "<path class=\"domain\" d=\"M " << num(frame.px(1)) << ' ' << num(frame.py(0)) << " L "
        << num(frame.px(0)) << ' ' << num(frame.py(1)) << " L " << num(frame.px(-1)) << ' ' << num(frame.py(0))
        << " L " << num(frame.px(0)) << ' ' << num(frame.py(-1)) << " Z\"/>\n";
  }

  for (long i = 0; i <= count; ++i) {
    for (long k = 0; k <= count; ++k) {
      const double x = frame.lo + static_cast<double>(i) * grid_step;
      const double y = frame.lo + static_cast<double>(k) * grid_step;
      if (!alpha && std::abs(x) + std::abs(y) > 1.0 + 1e-9) continue;
      double fx = 0.0;
      double fy = 0.0;
      if (alpha) {
        const AlphaPoint a = m.eval_H({x, y});
        fx = a.a1;
        fy = a.a2;
      } else {
        const DeltaPoint d = m.eval_T({x, y});
        fx = d.d1;
        fy = d.d2;
      }
      const double dx = fx - x;
      const double dy = fy - y;
      const double len = std::hypot(dx, dy);
      const double px = frame.px(x);
      const double py = frame.py(y);
      std::string d = "M " + num(px) + ' ' + num(py);
      if (len > 0.0) {
        const double l = std::min(cap, len * frame.scale());
        // Screen direction: y is inverted.
        const double ux = dx / len;
        const double uy = -dy / len;
        const double ex = px + ux * l;
        const double ey = py + uy * l;
        const double head = std::min(6.0, 0.4 * l);
        d += " L " + num(ex) + ' ' + num(ey);
        d += " M " + num(ex - head * (ux - 0.5 * uy)) + ' ' + num(ey - head * (uy + 0.5 * ux));
        d += " L " + num(ex) + ' ' + num(ey);
        d += " L " + num(ex - head * (ux + 0.5 * uy)) + ' ' + num(ey - head * (uy - 0.5 * ux));
      }
      out << "<path class=\"arrow\" d=\"" << d << "\"/>\n";
      ++stats.arrows;
    }
  }

  if (m.model() != ModelTag::kGeneric) {
    for (const auto& rep : analyze_fixed_points(m.model(), m.u())) {
      if (!rep.exists) continue;
      std::vector<DeltaPoint> images;
      for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
          const DeltaPoint img{s1 * rep.location.d1 + 0.0, s2 * rep.location.d2 + 0.0};
          if (std::find(images.begin(), images.end(), img) == images.end()) images.push_back(img);
        }
      }
      const bool consensus = rep.cls == FixedPointClass::kConsensusSuperattracting;
      const bool sink = rep.cls == FixedPointClass::kSink;
      const std::string cls = to_string(rep.cls);
      const std::string label = to_string(rep.id);
      for (const auto& img : images) {
        double x = img.d1;
        double y = img.d2;
        if (alpha) {
          const AlphaPoint a = from_delta(img);
          x = a.a1;
          y = a.a2;
        }
        out << "<g class=\"fixed-point " << cls << "\"><circle class=\"marker\" cx=\"" << num(frame.px(x))
            << "\" cy=\"" << num(frame.py(y)) << "\" r=\"6\" fill=\"" << (sink || consensus ? "#b00" : "none")
            << "\"/><text x=\"" << num(frame.px(x) + 8) << "\" y=\"" << num(frame.py(y) - 8) << "\">" << label
            << "</text></g>\n";
        ++stats.markers;
        if (sink) ++stats.sink_markers;
      }
    }
  }
  out << "</svg>\n";
  return stats;
}

}  // namespace votedyn

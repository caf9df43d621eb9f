#include "votedyn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "votedyn/fixed_points.hpp"
#include "votedyn/rng.hpp"
#include "votedyn/voting.hpp"

namespace votedyn {
namespace {

std::uint64_t experiment_key(const ExperimentConfig& cfg) {
  return derive_key(cfg.master_seed, hash_tag(cfg.id));
}

std::uint64_t init_seed(std::uint64_t trial_seed) { return derive_key(trial_seed, hash_tag("init")); }
std::uint64_t steps_key(std::uint64_t trial_seed) { return derive_key(trial_seed, hash_tag("steps")); }

double abs_delta2(const OpinionState& s) {
  return std::abs(static_cast<double>(s.size()) / static_cast<double>(s.n()) - 1.0);
}

// Runs fn(k) for k < trials on a bounded pool; results land at index k.
template <class Fn>
std::vector<TrialRecord> run_pool(std::uint64_t trials, unsigned workers, Fn fn) {
  std::vector<TrialRecord> out(trials);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= trials) return;
      try {
        out[k] = fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };
  const auto count = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(trials, 1)));
  if (count == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// Graph shared by all trials, or nullopt when each trial draws its own.
std::optional<Graph> shared_graph_for(const ExperimentConfig& cfg) {
  if (!cfg.shared_graph) return std::nullopt;
  return generate_sbm(cfg.n, cfg.p, cfg.q(), derive_key(experiment_key(cfg), hash_tag("graph")));
}

TrialRecord record_from(std::uint64_t k, std::uint64_t seed, const Trajectory& traj, double peak) {
  TrialRecord rec;
  rec.trial = k;
  rec.seed = seed;
  rec.timeout = traj.status == Trajectory::Status::kTimeout;
  rec.t_cons = traj.steps;
  rec.final_opinion = traj.opinion;
  rec.peak_abs_delta2 = peak;
  return rec;
}

// One trial with an optional extra observer. Tracks peak |δ2|.
TrialRecord run_one(const ExperimentConfig& cfg, const VotingRule& rule, const std::optional<Graph>& shared,
                    std::uint64_t k, const StepObserver& extra = {}) {
  const std::uint64_t seed = trial_seed(cfg, k);
  std::optional<Graph> own;
  if (!shared) own = trial_graph(cfg, k);
  const Graph& g = shared ? *shared : *own;
  const OpinionState s0 = make_initial(g, cfg.init, init_seed(seed));
  double peak = 0.0;
  const StepObserver observer = [&](std::uint64_t t, const OpinionState& s) {
    peak = std::max(peak, abs_delta2(s));
    return extra ? extra(t, s) : true;
  };
  const Trajectory traj = simulate(g, s0, rule, cfg.max_steps, steps_key(seed), false, observer);
  return record_from(k, seed, traj, peak);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

ModelTag model_of(const ExperimentConfig& cfg) { return rule_from_name(cfg.model).model; }

}  // namespace

void ExperimentConfig::validate() const {
  rule_from_name(model);
  if (n < 1) throw std::invalid_argument("n: must be at least 1");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p: must lie in (0, 1]");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r: must lie in [0, 1]");
  if (trials < 1) throw std::invalid_argument("trials: must be at least 1");
  if (workers < 1) throw std::invalid_argument("workers: must be at least 1");
  if (!(budget_constant > 0.0)) throw std::invalid_argument("budget_constant: must be positive");
  target_counts(n, init);
}

std::uint64_t step_budget(const ExperimentConfig& cfg) {
  const double n = cfg.n;
  const double lnn = std::log(n);
  const double lnlnn = lnn > 1.0 ? std::log(lnn) : 0.0;
  const double lnnp = std::log(n * cfg.p);
  const double ratio = lnnp > 0.0 ? lnn / lnnp : 0.0;
  const double b = std::ceil(cfg.budget_constant * (lnlnn + ratio));
  return std::isfinite(b) && b >= 1.0 ? static_cast<std::uint64_t>(b) : 1;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::uint64_t trial) {
  return derive_key(experiment_key(cfg), trial);
}

Graph trial_graph(const ExperimentConfig& cfg, std::uint64_t trial) {
  if (cfg.shared_graph) return *shared_graph_for(cfg);
  return generate_sbm(cfg.n, cfg.p, cfg.q(), derive_key(trial_seed(cfg, trial), hash_tag("graph")));
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const VotingRule rule = rule_from_name(cfg.model);
  const std::optional<Graph> shared = shared_graph_for(cfg);
  return run_pool(cfg.trials, cfg.workers, [&](std::uint64_t k) { return run_one(cfg, rule, shared, k); });
}

std::optional<double> median_t_cons(const std::vector<TrialRecord>& records) {
  if (records.empty()) return std::nullopt;
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) {
    v.push_back(r.timeout ? std::numeric_limits<double>::infinity() : static_cast<double>(r.t_cons));
  }
  const double m = median_of(std::move(v));
  if (!std::isfinite(m)) return std::nullopt;
  return m;
}

TrialSummary summarize(const std::vector<TrialRecord>& records) {
  TrialSummary s;
  s.trials = records.size();
  for (const auto& r : records) {
    if (r.timeout) {
      ++s.timeouts;
      continue;
    }
    ++s.consensus;
    s.max_t_cons = std::max(s.max_t_cons.value_or(0), r.t_cons);
  }
  s.median_t_cons = median_t_cons(records);
  s.consensus_fraction = s.trials ? static_cast<double>(s.consensus) / static_cast<double>(s.trials) : 0.0;
  return s;
}

std::vector<SweepBlock> phase_sweep(const ExperimentConfig& cfg, const std::vector<double>& r_grid) {
  std::vector<SweepBlock> out;
  for (double r : r_grid) {
    SweepBlock block;
    block.r = r;
    block.config = cfg;
    block.config.r = r;
    block.config.id = cfg.id + "/r=" + format_real(r);
    block.records = run_experiment(block.config);
    block.budget = step_budget(block.config);
    std::uint64_t within = 0;
    for (const auto& rec : block.records) {
      if (!rec.timeout && rec.t_cons <= block.budget) ++within;
    }
    block.fraction_within_budget = static_cast<double>(within) / static_cast<double>(block.records.size());
    block.summary = summarize(block.records);
    out.push_back(std::move(block));
  }
  return out;
}

SinkReport sink_persistence(const ExperimentConfig& cfg, double epsilon, std::uint64_t horizon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon: must be positive");
  const VotingRule rule = rule_from_name(cfg.model);
  if (rule.model == ModelTag::kGeneric) {
    throw std::invalid_argument("sink persistence needs a model with closed-form fixed points");
  }
  const double u = u_of_r(cfg.r);
  const auto fps = fixed_points(rule.model, u);
  if (!fps[1].exists || classify(jacobian_analytic(rule.model, u, fps[1].location)) != FixedPointClass::kSink) {
    throw std::invalid_argument("d2* is not a sink at r=" + format_real(cfg.r) +
                                "; sink persistence needs r below the threshold");
  }
  SinkReport rep;
  rep.center = fps[1].location;
  rep.epsilon = epsilon;
  rep.horizon = horizon;
  ExperimentConfig run = cfg;
  run.init = Clustered{rep.center.d1, rep.center.d2};
  run.max_steps = horizon;
  run.validate();
  const std::optional<Graph> shared = shared_graph_for(run);
  const DeltaPoint c = rep.center;
  rep.records = run_pool(run.trials, run.workers, [&](std::uint64_t k) {
    std::optional<std::uint64_t> escaped;
    const StepObserver watch = [&](std::uint64_t t, const OpinionState& s) {
      const DeltaPoint d = to_delta(fractions(s));
      if (!escaped && std::max(std::abs(d.d1 - c.d1), std::abs(d.d2 - c.d2)) >= epsilon) escaped = t;
      return true;
    };
    TrialRecord rec = run_one(run, rule, shared, k, watch);
    rec.event_step = escaped;
    return rec;
  });
  for (const auto& r : rep.records) {
    if (r.event_step) ++rep.escapes;
    if (!r.timeout) ++rep.consensus;
  }
  const double trials = static_cast<double>(rep.records.size());
  rep.escape_fraction = static_cast<double>(rep.escapes) / trials;
  rep.consensus_fraction = static_cast<double>(rep.consensus) / trials;
  return rep;
}

DeviationReport trajectory_deviation(const ExperimentConfig& cfg, std::uint64_t t_max) {
  if (t_max > 50) throw std::invalid_argument("t_max: must not exceed 50");
  cfg.validate();
  const VotingRule rule = rule_from_name(cfg.model);
  const InducedMap map = InducedMap::from_r(rule, cfg.r);
  const std::optional<Graph> shared = shared_graph_for(cfg);
  // dev[k][t]
  std::vector<std::vector<double>> dev(cfg.trials);
  run_pool(cfg.trials, cfg.workers, [&](std::uint64_t k) {
    const std::uint64_t seed = trial_seed(cfg, k);
    std::optional<Graph> own;
    if (!shared) own = trial_graph(cfg, k);
    const Graph& g = shared ? *shared : *own;
    const OpinionState s0 = make_initial(g, cfg.init, init_seed(seed));
    const Trajectory traj = simulate(g, s0, rule, t_max, steps_key(seed), true);
    const AlphaPoint a0 = fractions(s0);
    const Orbit orbit = iterate(map, MapSpace::kAlpha, {a0.a1, a0.a2}, t_max);
    std::vector<double> row(t_max + 1);
    for (std::uint64_t t = 0; t <= t_max; ++t) {
      // Consensus is absorbing, so the last recorded row holds from then on.
      const TrajectoryRow& obs = traj.rows[std::min<std::size_t>(t, traj.rows.size() - 1)];
      row[t] = std::max(std::abs(obs.alpha1 - orbit.points[t].x1), std::abs(obs.alpha2 - orbit.points[t].x2));
    }
    dev[k] = std::move(row);
    return TrialRecord{};
  });
  DeviationReport rep;
  const double n = cfg.n;
  const double scale = 1.0 / std::sqrt(n * cfg.p) + std::sqrt(std::log(n) / n);
  for (std::uint64_t t = 0; t <= t_max; ++t) {
    std::vector<double> col;
    col.reserve(dev.size());
    for (const auto& row : dev) col.push_back(row[t]);
    DeviationRow out;
    out.t = t;
    out.max = *std::max_element(col.begin(), col.end());
    out.median = median_of(col);
    out.scale = scale;
    if (t >= 1) rep.peak_median = std::max(rep.peak_median, out.median);
    rep.peak_ratio = std::max(rep.peak_ratio, out.max / scale);
    rep.rows.push_back(out);
  }
  return rep;
}

EscapeReport escape_time(const ExperimentConfig& cfg, double kappa, double limit_constant) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa: must lie in [0, 1)");
  cfg.validate();
  const VotingRule rule = rule_from_name(cfg.model);
  EscapeReport rep;
  rep.kappa = kappa;
  rep.limit = static_cast<std::uint64_t>(std::ceil(limit_constant * std::log(static_cast<double>(cfg.n))));
  const std::optional<Graph> shared = shared_graph_for(cfg);
  rep.records = run_pool(cfg.trials, cfg.workers, [&](std::uint64_t k) {
    std::optional<std::uint64_t> tau;
    const StepObserver watch = [&](std::uint64_t t, const OpinionState& s) {
      if (abs_delta2(s) > kappa) {
        tau = t;
        return false;
      }
      return true;
    };
    TrialRecord rec = run_one(cfg, rule, shared, k, watch);
    rec.event_step = tau;
    return rec;
  });
  std::vector<double> taus;
  for (const auto& r : rep.records) {
    const double tau = r.event_step ? static_cast<double>(*r.event_step) : std::numeric_limits<double>::infinity();
    taus.push_back(tau);
    if (r.event_step) {
      rep.max = std::max(rep.max.value_or(0), *r.event_step);
      if (*r.event_step <= rep.limit) ++rep.escaped_within_limit;
    }
  }
  const double med = median_of(taus);
  if (std::isfinite(med)) rep.median = med;
  rep.all_within_limit = rep.escaped_within_limit == rep.records.size();
  return rep;
}

std::vector<InitFamily> worst_case_families(const ExperimentConfig& cfg) {
  std::vector<InitFamily> out{HalfHalf{}, BiasedGlobal{0.1}, BiasedGlobal{-0.1}};
  const auto add_clustered = [&out](double d1, double d2) {
    for (const auto& f : out) {
      if (const auto* c = std::get_if<Clustered>(&f); c && c->d1 == d1 && c->d2 == d2) return;
    }
    out.push_back(Clustered{d1, d2});
  };
  for (double d1 : {1.0, -1.0, 0.5, -0.5}) add_clustered(d1, 0.0);
  const ModelTag model = model_of(cfg);
  if (model != ModelTag::kGeneric) {
    for (const auto& fp : fixed_points(model, u_of_r(cfg.r))) {
      // (0, ±1) are the consensus states, covered by the exact-count controls.
      if (!fp.exists || fp.id == FixedPointId::kD4) continue;
      for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) add_clustered(s1 * fp.location.d1 + 0.0, s2 * fp.location.d2 + 0.0);
      }
    }
  }
  for (int i = 1; i <= 9; ++i) out.push_back(RandomDensity{i / 10.0});
  out.push_back(ExactCounts{cfg.n, cfg.n});
  out.push_back(ExactCounts{0, 0});
  return out;
}

WorstCaseReport worst_case_scan(const ExperimentConfig& cfg, const std::vector<InitFamily>& families,
                                double limit_constant) {
  WorstCaseReport rep;
  rep.limit = static_cast<std::uint64_t>(std::ceil(limit_constant * std::log(static_cast<double>(cfg.n))));
  std::uint64_t over = 0;
  for (const auto& family : families) {
    FamilyResult fr;
    fr.family = family;
    ExperimentConfig run = cfg;
    run.init = family;
    run.id = cfg.id + "/" + describe(family);
    fr.records = run_experiment(run);
    fr.summary = summarize(fr.records);
    for (const auto& r : fr.records) {
      ++rep.total_trials;
      if (r.timeout) {
        ++rep.timeouts;
        ++over;
        continue;
      }
      rep.max_t_cons = std::max(rep.max_t_cons.value_or(0), r.t_cons);
      if (r.t_cons > rep.limit) ++over;
    }
    rep.families.push_back(std::move(fr));
  }
  rep.fraction_over_limit =
      rep.total_trials ? static_cast<double>(over) / static_cast<double>(rep.total_trials) : 0.0;
  return rep;
}

std::string to_string(ScalingReport::Status s) {
  switch (s) {
    case ScalingReport::Status::kOk:
      return "ok";
    case ScalingReport::Status::kRefusedTimeouts:
      return "refused_timeouts";
    case ScalingReport::Status::kUndefinedSinglePoint:
      return "undefined_single_point";
  }
  return "?";
}

ScalingReport consensus_time_scaling(const ExperimentConfig& cfg, const std::vector<std::uint32_t>& n_grid) {
  if (n_grid.empty()) throw std::invalid_argument("n_grid: must not be empty");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("n_grid: must be strictly ascending");
  }
  ScalingReport rep;
  for (std::uint32_t n : n_grid) {
    ExperimentConfig run = cfg;
    run.n = n;
    run.id = cfg.id + "/n=" + std::to_string(n);
    const auto records = run_experiment(run);
    ScalingPoint pt;
    pt.n = n;
    pt.median = median_t_cons(records);
    for (const auto& r : records) pt.timeouts += r.timeout ? 1 : 0;
    rep.points.push_back(pt);
  }
  if (rep.points.size() < 2) {
    rep.status = ScalingReport::Status::kUndefinedSinglePoint;
    return rep;
  }
  for (const auto& pt : rep.points) {
    if (!pt.median) {
      rep.status = ScalingReport::Status::kRefusedTimeouts;
      return rep;
    }
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(rep.points.size());
  for (const auto& pt : rep.points) {
    const double x = std::log(static_cast<double>(pt.n));
    sx += x;
    sy += *pt.median;
    sxx += x * x;
    sxy += x * *pt.median;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.slope = slope;
  rep.intercept = (sy - slope * sx) / m;
  return rep;
}

void write_results_header(std::ostream& out) {
  out << "model,n,p,q,r,init,trial,seed,t_cons,timeout,final_opinion,peak_abs_delta2\n";
}

void write_results_rows(std::ostream& out, const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  const std::string prefix = cfg.model + ',' + std::to_string(cfg.n) + ',' + format_real(cfg.p) + ',' +
                             format_real(cfg.q()) + ',' + format_real(cfg.r) + ',' + describe(cfg.init) + ',';
  char buf[32];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.9g", r.peak_abs_delta2);
    out << prefix << r.trial << ',' << r.seed << ',' << r.t_cons << ',' << (r.timeout ? 1 : 0) << ','
        << r.final_opinion << ',' << buf << '\n';
  }
}

}  // namespace votedyn

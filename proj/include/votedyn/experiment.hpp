#pragma once

// Multi-trial Monte Carlo experiments on G(2n, p, q).
//
// Seeding: trial k of experiment `id` uses
//   trial_seed = derive_key(derive_key(master_seed, hash_tag(id)), k)
// and derives its graph, initial state and step keys from trial_seed with
// fixed tags. With shared_graph the graph key is derived once per experiment
// instead. Records are sorted by trial index, so output does not depend on
// the number of workers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "votedyn/dynamics.hpp"
#include "votedyn/graph.hpp"
#include "votedyn/opinion.hpp"
#include "votedyn/rule.hpp"

namespace votedyn {

inline constexpr std::uint64_t kDefaultMasterSeed = 0xC0FFEE;

struct ExperimentConfig {
  std::string model = "bo3";  ///< bo2, bo3 or best-of-K
  std::uint32_t n = 1000;
  double p = 0.2;
  double r = 0.25;  ///< q = r p
  InitFamily init = BiasedGlobal{0.2};
  std::uint64_t trials = 50;
  std::uint64_t max_steps = 1000;
  std::uint64_t master_seed = kDefaultMasterSeed;
  bool shared_graph = false;
  unsigned workers = 1;
  std::string id = "experiment";
  /// C in the step budget C (ln ln n + ln n / ln(n p)).
  double budget_constant = 15.0;

  double q() const noexcept { return r * p; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Step budget ceil(C (ln ln n + ln n / ln(n p))); at least 1.
std::uint64_t step_budget(const ExperimentConfig& cfg);

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  bool timeout = false;
  /// T_cons, or the number of steps run on timeout.
  std::uint64_t t_cons = 0;
  /// 1 when A = V, 2 when A = ∅, 0 on timeout.
  int final_opinion = 0;
  double peak_abs_delta2 = 0.0;
  /// First step at which the tracked event happened (escape experiments).
  std::optional<std::uint64_t> event_step;
};

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::uint64_t trial);

/// Graph used by a trial (regenerated per trial unless shared_graph).
Graph trial_graph(const ExperimentConfig& cfg, std::uint64_t trial);

/// Runs every trial to consensus or max_steps.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

struct TrialSummary {
  std::uint64_t trials = 0;
  std::uint64_t consensus = 0;
  std::uint64_t timeouts = 0;
  /// Median T_cons with timeouts counted as +∞; nullopt when that median is ∞.
  std::optional<double> median_t_cons;
  std::optional<std::uint64_t> max_t_cons;  ///< over trials that reached consensus
  double consensus_fraction = 0.0;
};

TrialSummary summarize(const std::vector<TrialRecord>& records);

/// Median with timeouts as +∞ (nullopt if it lands on a timeout).
std::optional<double> median_t_cons(const std::vector<TrialRecord>& records);

struct SweepBlock {
  double r = 0.0;
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  std::uint64_t budget = 0;
  /// Share of trials reaching consensus within `budget` steps.
  double fraction_within_budget = 0.0;
  TrialSummary summary;
};

std::vector<SweepBlock> phase_sweep(const ExperimentConfig& cfg, const std::vector<double>& r_grid);

struct SinkReport {
  DeltaPoint center;
  double epsilon = 0.0;
  std::uint64_t horizon = 0;
  std::vector<TrialRecord> records;
  std::uint64_t escapes = 0;
  std::uint64_t consensus = 0;
  double escape_fraction = 0.0;
  double consensus_fraction = 0.0;
};

/// Starts at clustered(d*2) and counts trials leaving the ∞-norm ball of
/// radius epsilon around d*2 within `horizon` steps. Throws
/// std::invalid_argument unless d*2 exists and is a sink.
SinkReport sink_persistence(const ExperimentConfig& cfg, double epsilon, std::uint64_t horizon);

struct DeviationRow {
  std::uint64_t t = 0;
  double median = 0.0;
  double max = 0.0;
  /// 1/√(np) + √(ln n / n).
  double scale = 0.0;
};

struct DeviationReport {
  std::vector<DeviationRow> rows;
  /// max over t ≥ 1 of the per-step median.
  double peak_median = 0.0;
  /// max over t and trials of deviation / scale.
  double peak_ratio = 0.0;
};

/// ‖α(t) − a(t)‖∞ for t ≤ t_max, where a(t) iterates H from the trial's own
/// α(0). Requires t_max ≤ 50.
DeviationReport trajectory_deviation(const ExperimentConfig& cfg, std::uint64_t t_max);

struct EscapeReport {
  double kappa = 0.0;
  std::uint64_t limit = 0;
  std::vector<TrialRecord> records;
  std::uint64_t escaped_within_limit = 0;
  std::optional<double> median;
  std::optional<std::uint64_t> max;
  bool all_within_limit = false;
};

/// First t with |δ2(t)| > kappa, capped at max_steps. `limit_constant`
/// sets the reported limit ceil(C ln n).
EscapeReport escape_time(const ExperimentConfig& cfg, double kappa, double limit_constant);

struct FamilyResult {
  InitFamily family;
  std::vector<TrialRecord> records;
  TrialSummary summary;
};

struct WorstCaseReport {
  std::vector<FamilyResult> families;
  std::uint64_t limit = 0;
  std::optional<std::uint64_t> max_t_cons;
  std::uint64_t timeouts = 0;
  std::uint64_t total_trials = 0;
  /// Share of trials with T_cons above `limit` (timeouts included).
  double fraction_over_limit = 0.0;
};

/// Adversarial initial conditions: half_half, biased_global(±0.1), clustered
/// at the axis extremes and at every existing fixed point ±d, random_density
/// 0.1..0.9, plus the consensus controls exact_counts(n,n) and (0,0).
std::vector<InitFamily> worst_case_families(const ExperimentConfig& cfg);

WorstCaseReport worst_case_scan(const ExperimentConfig& cfg, const std::vector<InitFamily>& families,
                                double limit_constant);

struct ScalingPoint {
  std::uint32_t n = 0;
  std::optional<double> median;
  std::uint64_t timeouts = 0;
};

struct ScalingReport {
  enum class Status { kOk, kRefusedTimeouts, kUndefinedSinglePoint };
  std::vector<ScalingPoint> points;
  Status status = Status::kOk;
  std::optional<double> slope;  ///< least squares of median T_cons on ln n
  std::optional<double> intercept;
};

std::string to_string(ScalingReport::Status s);

/// Requires n_grid strictly ascending.
ScalingReport consensus_time_scaling(const ExperimentConfig& cfg, const std::vector<std::uint32_t>& n_grid);

/// `model,n,p,q,r,init,trial,seed,t_cons,timeout,final_opinion,peak_abs_delta2`.
void write_results_header(std::ostream& out);
void write_results_rows(std::ostream& out, const ExperimentConfig& cfg,
                        const std::vector<TrialRecord>& records);

}  // namespace votedyn

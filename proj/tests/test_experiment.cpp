#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "votedyn/dynamics.hpp"
#include "votedyn/experiment.hpp"
#include "votedyn/fixed_points.hpp"
#include "votedyn/rng.hpp"
#include "votedyn/voting.hpp"

namespace votedyn {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.model = "bo3";
  cfg.n = 200;
  cfg.p = 0.3;
  cfg.r = 0.3;
  cfg.init = BiasedGlobal{0.2};
  cfg.trials = 8;
  cfg.max_steps = 200;
  cfg.master_seed = 77;
  cfg.id = "unit";
  return cfg;
}

std::string csv_of(const ExperimentConfig& cfg, const std::vector<TrialRecord>& recs) {
  std::ostringstream out;
  write_results_header(out);
  write_results_rows(out, cfg, recs);
  return out.str();
}

TEST(Experiment, ResultsIndependentOfWorkerCount) {
  ExperimentConfig cfg = small_config();
  const std::string one = csv_of(cfg, run_experiment(cfg));
  cfg.workers = 4;
  EXPECT_EQ(csv_of(cfg, run_experiment(cfg)), one);
  cfg.shared_graph = true;
  const std::string shared4 = csv_of(cfg, run_experiment(cfg));
  cfg.workers = 1;
  EXPECT_EQ(csv_of(cfg, run_experiment(cfg)), shared4);
}

TEST(Experiment, SeedsAndIdsSeparateStreams) {
  ExperimentConfig a = small_config();
  ExperimentConfig b = a;
  b.id = "other";
  EXPECT_NE(trial_seed(a, 0), trial_seed(b, 0));
  EXPECT_NE(trial_seed(a, 0), trial_seed(a, 1));
  EXPECT_FALSE(trial_graph(a, 0) == trial_graph(a, 1));
  a.shared_graph = true;
  EXPECT_EQ(trial_graph(a, 0), trial_graph(a, 3));
}

TEST(Experiment, ConsensusStartNeedsNoSteps) {
  ExperimentConfig cfg = small_config();
  cfg.trials = 1;
  cfg.max_steps = 0;
  cfg.init = ExactCounts{cfg.n, cfg.n};
  const auto recs = run_experiment(cfg);
  ASSERT_EQ(recs.size(), 1U);
  EXPECT_FALSE(recs[0].timeout);
  EXPECT_EQ(recs[0].t_cons, 0U);
  EXPECT_EQ(recs[0].final_opinion, 1);
  EXPECT_EQ(summarize(recs).consensus_fraction, 1.0);
}

TEST(Experiment, CsvLayout) {
  ExperimentConfig cfg = small_config();
  cfg.trials = 2;
  std::istringstream in(csv_of(cfg, run_experiment(cfg)));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "model,n,p,q,r,init,trial,seed,t_cons,timeout,final_opinion,peak_abs_delta2");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind("bo3,200,0.3,", 0), 0U) << line;
  }
  EXPECT_EQ(rows, 2);
}

TEST(Summary, MedianTreatsTimeoutsAsInfinite) {
  std::vector<TrialRecord> recs(3);
  recs[0].t_cons = 5;
  recs[1].t_cons = 9;
  recs[2].timeout = true;
  recs[2].t_cons = 100;
  TrialSummary s = summarize(recs);
  EXPECT_EQ(*s.median_t_cons, 9.0);
  EXPECT_EQ(*s.max_t_cons, 9U);
  EXPECT_EQ(s.timeouts, 1U);
  recs[1].timeout = true;
  EXPECT_FALSE(median_t_cons(recs).has_value());
  recs.push_back(TrialRecord{});
  recs.back().t_cons = 1;
  EXPECT_FALSE(median_t_cons(recs).has_value());  // (5 + inf) / 2
  EXPECT_FALSE(median_t_cons({}).has_value());
}

TEST(Config, Validation) {
  ExperimentConfig cfg = small_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.p = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.r = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.model = "bo4";
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.init = ExactCounts{cfg.n + 1, 0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_DOUBLE_EQ(small_config().q(), 0.09);
  EXPECT_GE(step_budget(small_config()), 1U);
}

TEST(Sweep, BlocksPerR) {
  ExperimentConfig cfg = small_config();
  cfg.trials = 3;
  const auto blocks = phase_sweep(cfg, {0.05, 0.25});
  ASSERT_EQ(blocks.size(), 2U);
  EXPECT_EQ(blocks[0].r, 0.05);
  EXPECT_EQ(blocks[1].config.r, 0.25);
  EXPECT_EQ(blocks[1].records.size(), 3U);
  EXPECT_NE(blocks[0].config.id, blocks[1].config.id);
}

// Strong coupling converges quickly from a small bias; weak coupling holds the
// split-opinion sink.
TEST(Phase, ContrastAcrossThreshold) {
  ExperimentConfig above = small_config();
  above.n = 500;
  above.trials = 10;
  above.max_steps = 50;
  const TrialSummary fast = summarize(run_experiment(above));
  EXPECT_GE(fast.consensus_fraction, 0.9);

  ExperimentConfig below = above;
  below.r = 0.05;
  below.trials = 4;
  const SinkReport sink = sink_persistence(below, 0.1, 300);
  EXPECT_EQ(sink.escapes, 0U);
  EXPECT_EQ(sink.consensus, 0U);
  EXPECT_NEAR(sink.center.d1, fixed_points_bo3(u_of_r(0.05))[1].location.d1, 1e-15);
}

TEST(Phase, SinkRefusedAboveThreshold) {
  ExperimentConfig cfg = small_config();
  cfg.r = 0.25;
  EXPECT_THROW(sink_persistence(cfg, 0.1, 10), std::invalid_argument);
  cfg.r = 0.05;
  EXPECT_THROW(sink_persistence(cfg, 0.0, 10), std::invalid_argument);
  cfg.model = "best-of-5";
  EXPECT_THROW(sink_persistence(cfg, 0.1, 10), std::invalid_argument);
}

TEST(Escape, ImmediateWhenStartingOutside) {
  ExperimentConfig cfg = small_config();
  cfg.init = Clustered{0.0, 0.5};
  cfg.trials = 3;
  const EscapeReport rep = escape_time(cfg, 0.2, 15);
  for (const auto& r : rep.records) EXPECT_EQ(r.event_step.value_or(99), 0U);
  EXPECT_TRUE(rep.all_within_limit);
  EXPECT_EQ(*rep.median, 0.0);
  EXPECT_EQ(rep.limit, static_cast<std::uint64_t>(std::ceil(15 * std::log(200.0))));
  EXPECT_THROW(escape_time(cfg, 1.0, 15), std::invalid_argument);
}

TEST(Escape, HalfHalfLeavesBand) {
  ExperimentConfig cfg = small_config();
  cfg.init = HalfHalf{};
  cfg.trials = 5;
  cfg.max_steps = 500;
  const EscapeReport rep = escape_time(cfg, 0.2, 15);
  EXPECT_EQ(rep.escaped_within_limit, 5U);
  EXPECT_GT(*rep.max, 0U);
}

TEST(WorstCase, FamiliesAndScan) {
  ExperimentConfig cfg = small_config();
  const auto fams = worst_case_families(cfg);
  EXPECT_GE(fams.size(), 12U);
  cfg.r = 0.05;
  EXPECT_GT(worst_case_families(cfg).size(), fams.size());  // d2* and d3* add clustered starts
  cfg = small_config();
  cfg.trials = 2;
  const WorstCaseReport rep = worst_case_scan(cfg, fams, 25);
  EXPECT_EQ(rep.total_trials, 2 * fams.size());
  EXPECT_EQ(rep.timeouts, 0U);
  EXPECT_LE(*rep.max_t_cons, rep.limit);
  EXPECT_EQ(rep.fraction_over_limit, 0.0);
}

TEST(Scaling, Statuses) {
  ExperimentConfig cfg = small_config();
  cfg.trials = 3;
  const ScalingReport ok = consensus_time_scaling(cfg, {100, 200, 400});
  EXPECT_EQ(ok.status, ScalingReport::Status::kOk);
  ASSERT_TRUE(ok.slope.has_value());
  EXPECT_EQ(ok.points.size(), 3U);
  EXPECT_EQ(consensus_time_scaling(cfg, {200}).status, ScalingReport::Status::kUndefinedSinglePoint);
  ExperimentConfig stuck = cfg;
  stuck.max_steps = 1;
  stuck.init = HalfHalf{};
  const ScalingReport refused = consensus_time_scaling(stuck, {100, 200});
  EXPECT_EQ(refused.status, ScalingReport::Status::kRefusedTimeouts);
  EXPECT_FALSE(refused.slope.has_value());
  EXPECT_EQ(to_string(refused.status), "refused_timeouts");
  EXPECT_THROW(consensus_time_scaling(cfg, {200, 100}), std::invalid_argument);
}

TEST(Deviation, SmallAndBounded) {
  ExperimentConfig cfg = small_config();
  cfg.n = 1000;
  cfg.trials = 10;
  const DeviationReport rep = trajectory_deviation(cfg, 10);
  ASSERT_EQ(rep.rows.size(), 11U);
  EXPECT_EQ(rep.rows[0].max, 0.0);
  EXPECT_LE(rep.peak_ratio, 20.0);
  EXPECT_GT(rep.peak_median, 0.0);
  EXPECT_THROW(trajectory_deviation(cfg, 51), std::invalid_argument);
}

// One step of the process moves δ2 by T2(δ) − δ2 on average, within sampling noise.
TEST(Deviation, DriftOfDelta2MatchesMap) {
  const std::uint32_t n = 1000;
  const double r = 0.3;
  const Graph g = generate_sbm(n, 0.3, 0.3 * r, 5);
  const OpinionState s0 = make_initial(g, Clustered{0.1, 0.3}, 6);
  const DeltaPoint d0 = to_delta(fractions(s0));
  const InducedMap m = InducedMap::from_r(make_rule_bo3(), r);
  double sum = 0.0;
  const int reps = 200;
  for (int k = 0; k < reps; ++k) sum += to_delta(fractions(step(g, s0, m.rule(), derive_key(1, k)))).d2;
  // sd of δ2(1) is below 1/√n; the map itself is accurate to O(1/√(np)).
  EXPECT_NEAR(sum / reps - d0.d2, m.eval_T(d0).d2 - d0.d2, 5.0 / std::sqrt(n * 0.3));
  EXPECT_GT(sum / reps, d0.d2);
}

}  // namespace
}  // namespace votedyn

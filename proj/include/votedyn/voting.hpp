#pragma once

// Synchronous two-opinion voting on a Graph.
//
// Randomness is counter based: within step t of a trial keyed by `trial_key`,
// vertex v consumes draws counter_draw(step_key(trial_key, t), v*kDrawStride + j).
// A step therefore depends only on (graph, state, rule, key), never on the
// order in which vertices are visited.
//
// Isolated vertices keep their current opinion.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "votedyn/graph.hpp"
#include "votedyn/opinion.hpp"
#include "votedyn/rule.hpp"

namespace votedyn {

inline constexpr std::uint64_t kDrawStride = 32;

std::uint64_t step_key(std::uint64_t trial_key, std::uint64_t t);

/// Pr[v ∈ A'] for every vertex.
std::vector<double> adoption_probabilities(const Graph& g, const OpinionState& s,
                                           const VotingRule& rule);

/// One step drawing each vertex's Bernoulli(f_i(deg_A(v)/deg(v))) directly.
OpinionState step_probability(const Graph& g, const OpinionState& s, const VotingRule& rule,
                              std::uint64_t key);

/// Next opinion of a vertex holding `own` after drawing the opinions in
/// `sampled` (true = opinion 1). `sampled` has sampler.draws entries.
bool sampling_decision(const Sampler& sampler, bool own, std::span<const bool> sampled);

/// One step by neighbor sampling with replacement. Throws
/// std::invalid_argument if the rule has no sampler.
OpinionState step_sampling(const Graph& g, const OpinionState& s, const VotingRule& rule,
                           std::uint64_t key);

enum class StepPath { kAuto, kSampling, kProbability };

/// kAuto: sampling when the rule has a sampler, else probability.
OpinionState step(const Graph& g, const OpinionState& s, const VotingRule& rule,
                  std::uint64_t key, StepPath path = StepPath::kAuto);

struct TrajectoryRow {
  std::uint64_t t = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

struct Trajectory {
  enum class Status { kConsensus, kTimeout };

  std::vector<TrajectoryRow> rows;
  Status status = Status::kTimeout;
  /// 1 when A = V, 2 when A = ∅; 0 on timeout.
  int opinion = 0;
  /// T_cons on consensus, steps executed on timeout.
  std::uint64_t steps = 0;
  OpinionState final_state;
};

/// Called with (t, A^(t)) for t = 0, 1, ...; returning false stops the run.
using StepObserver = std::function<bool(std::uint64_t, const OpinionState&)>;

/// Iterates until A ∈ {∅, V}, max_steps is reached, or the observer stops it.
Trajectory simulate(const Graph& g, const OpinionState& s0, const VotingRule& rule,
                    std::uint64_t max_steps, std::uint64_t trial_key, bool record,
                    const StepObserver& observer = {}, StepPath path = StepPath::kAuto);

inline Trajectory run_until_consensus(const Graph& g, const OpinionState& s0,
                                      const VotingRule& rule, std::uint64_t max_steps,
                                      std::uint64_t trial_key, bool record) {
  return simulate(g, s0, rule, max_steps, trial_key, record);
}

/// `t,alpha1,alpha2,delta1,delta2`, 9 significant digits, final `# status=...` comment.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace votedyn

#include "votedyn/voting.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "votedyn/kernels.hpp"
#include "votedyn/rng.hpp"

namespace votedyn {
namespace {

std::vector<std::uint32_t> degrees_into(const Graph& g, const OpinionState& s,
                                        std::vector<std::uint32_t>& deg) {
  const std::uint32_t count = g.vertex_count();
  std::vector<std::uint32_t> deg_a(count);
  deg.resize(count);
  for (Vertex v = 0; v < count; ++v) {
    deg[v] = g.degree(v);
    deg_a[v] = deg_in_set(g, v, s);
  }
  return deg_a;
}

}  // namespace

std::uint64_t step_key(std::uint64_t trial_key, std::uint64_t t) { return derive_key(trial_key, t); }

std::vector<double> adoption_probabilities(const Graph& g, const OpinionState& s,
                                           const VotingRule& rule) {
  const std::uint32_t count = g.vertex_count();
  std::vector<std::uint32_t> deg;
  const std::vector<std::uint32_t> deg_a = degrees_into(g, s, deg);
  std::vector<double> x(count);
  std::vector<double> p1(count);
  std::vector<double> p2(count);
  const auto& k = kernels::active_kernels();
  k.ratio(deg_a, deg, x);
  k.polyval(rule.f1.coeffs(), x, p1);
  k.polyval(rule.f2.coeffs(), x, p2);
  std::vector<double> out(count);
  for (Vertex v = 0; v < count; ++v) {
    const bool member = s.contains(v);
    if (deg[v] == 0) {
      out[v] = member ? 1.0 : 0.0;
    } else {
      out[v] = member ? p1[v] : p2[v];
    }
  }
  return out;
}

OpinionState step_probability(const Graph& g, const OpinionState& s, const VotingRule& rule,
                              std::uint64_t key) {
  const std::vector<double> prob = adoption_probabilities(g, s, rule);
  OpinionState next(g.n());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const double u = to_unit(counter_draw(key, v * kDrawStride));
    next.set(v, u < prob[v]);
  }
  return next;
}

bool sampling_decision(const Sampler& sampler, bool own, std::span<const bool> sampled) {
  if (sampler.kind == Sampler::Kind::kBestOfTwo) {
    return sampled[0] == sampled[1] ? sampled[0] : own;
  }
  unsigned ones = 0;
  for (bool b : sampled) ones += b ? 1U : 0U;
  return 2 * ones > sampled.size();
}

OpinionState step_sampling(const Graph& g, const OpinionState& s, const VotingRule& rule,
                           std::uint64_t key) {
  if (!rule.sampler) throw std::invalid_argument("rule " + rule.name + " has no sampler");
  const Sampler sampler = *rule.sampler;
  if (sampler.draws > kDrawStride) throw std::invalid_argument("too many draws per vertex");
  bool drawn[kDrawStride];
  OpinionState next(g.n());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const auto nb = g.neighbors(v);
    const std::uint64_t deg = nb.size();
    if (deg == 0) {
      next.set(v, s.contains(v));
      continue;
    }
    const std::uint64_t base = v * kDrawStride;
    for (unsigned j = 0; j < sampler.draws; ++j) {
      drawn[j] = s.contains(nb[to_bounded(counter_draw(key, base + j), deg)]);
    }
    next.set(v, sampling_decision(sampler, s.contains(v), std::span<const bool>(drawn, sampler.draws)));
  }
  return next;
}

OpinionState step(const Graph& g, const OpinionState& s, const VotingRule& rule,
                  std::uint64_t key, StepPath path) {
  if (path == StepPath::kAuto) path = rule.sampler ? StepPath::kSampling : StepPath::kProbability;
  return path == StepPath::kSampling ? step_sampling(g, s, rule, key)
                                     : step_probability(g, s, rule, key);
}

Trajectory simulate(const Graph& g, const OpinionState& s0, const VotingRule& rule,
                    std::uint64_t max_steps, std::uint64_t trial_key, bool record,
                    const StepObserver& observer, StepPath path) {
  if (s0.n() != g.n()) throw std::invalid_argument("state and graph sizes differ");
  Trajectory traj;
  OpinionState current = s0;
  std::uint64_t t = 0;
  while (true) {
    if (record) {
      const AlphaPoint a = fractions(current);
      traj.rows.push_back({t, a.a1, a.a2});
    }
    const bool keep_going = !observer || observer(t, current);
    if (current.is_consensus()) {
      traj.status = Trajectory::Status::kConsensus;
      traj.opinion = current.size() == 0 ? 2 : 1;
      break;
    }
    if (!keep_going || t >= max_steps) {
      traj.status = Trajectory::Status::kTimeout;
      break;
    }
    current = step(g, current, rule, step_key(trial_key, t), path);
    ++t;
  }
  traj.steps = t;
  traj.final_state = std::move(current);
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,alpha1,alpha2,delta1,delta2\n";
  char buf[160];
  for (const auto& row : traj.rows) {
    const DeltaPoint d = to_delta({row.alpha1, row.alpha2});
    std::snprintf(buf, sizeof buf, "%llu,%.9g,%.9g,%.9g,%.9g\n",
                  static_cast<unsigned long long>(row.t), row.alpha1, row.alpha2, d.d1, d.d2);
    out << buf;
  }
  if (traj.status == Trajectory::Status::kConsensus) {
    out << "# status=consensus opinion=" << traj.opinion << " t_cons=" << traj.steps << '\n';
  } else {
    out << "# status=timeout steps=" << traj.steps << '\n';
  }
}

}  // namespace votedyn

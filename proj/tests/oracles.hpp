#pragma once

// Brute-force reference computations shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "small_graphs.hpp"
#include "votedyn/concentration.hpp"
#include "votedyn/rule.hpp"
#include "votedyn/voting.hpp"

namespace votedyn::testing {

// Pr[vertex v holds opinion 1 next step] under neighbor sampling, by listing
// every ordered tuple of sampled neighbors.
inline double sampled_adoption(const Graph& g, const OpinionState& s, const Sampler& sampler, Vertex v) {
  const auto nb = g.neighbors(v);
  const std::uint64_t deg = nb.size();
  if (deg == 0) return s.contains(v) ? 1.0 : 0.0;
  std::uint64_t tuples = 1;
  for (unsigned j = 0; j < sampler.draws; ++j) tuples *= deg;
  bool buf[32];
  std::uint64_t hits = 0;
  for (std::uint64_t code = 0; code < tuples; ++code) {
    std::uint64_t c = code;
    for (unsigned j = 0; j < sampler.draws; ++j) {
      buf[j] = s.contains(nb[c % deg]);
      c /= deg;
    }
    if (sampling_decision(sampler, s.contains(v), std::span<const bool>(buf, sampler.draws))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(tuples);
}

// Pr[v ∈ A'] from the rule polynomials with degrees counted directly.
inline double polynomial_adoption(const Graph& g, const OpinionState& s, const VotingRule& rule, Vertex v) {
  std::uint32_t deg = 0;
  std::uint32_t in_a = 0;
  for (Vertex w = 0; w < g.vertex_count(); ++w) {
    if (w != v && g.has_edge(v, w)) {
      ++deg;
      in_a += s.contains(w) ? 1U : 0U;
    }
  }
  if (deg == 0) return s.contains(v) ? 1.0 : 0.0;
  const double x = static_cast<double>(in_a) / deg;
  return s.contains(v) ? rule.f1(x) : rule.f2(x);
}

// Joint law of A' over all 2^(2n) outcomes for independent per-vertex
// Bernoulli(prob[v]) draws.
inline std::vector<double> product_distribution(const std::vector<double>& prob) {
  const std::size_t count = prob.size();
  std::vector<double> dist(std::size_t{1} << count, 1.0);
  for (std::size_t outcome = 0; outcome < dist.size(); ++outcome) {
    double p = 1.0;
    for (std::size_t v = 0; v < count; ++v) p *= ((outcome >> v) & 1U) ? prob[v] : 1.0 - prob[v];
    dist[outcome] = p;
  }
  return dist;
}

inline std::vector<double> sampling_distribution(const Graph& g, const OpinionState& s, const VotingRule& rule) {
  std::vector<double> prob(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) prob[v] = sampled_adoption(g, s, *rule.sampler, v);
  return product_distribution(prob);
}

inline std::vector<double> probability_distribution(const Graph& g, const OpinionState& s, const VotingRule& rule) {
  return product_distribution(adoption_probabilities(g, s, rule));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct EquivalenceResult {
  std::uint64_t graphs = 0;
  std::uint64_t states = 0;
  double max_diff = 0.0;             // sampling vs probability step laws
  double max_polynomial_diff = 0.0;  // adoption_probabilities vs direct polynomial evaluation
};

// Every graph on 2n vertices and every opinion state.
inline EquivalenceResult exhaustive_step_equivalence(std::uint32_t n, const VotingRule& rule) {
  EquivalenceResult res;
  const std::uint64_t graphs = graph_count(n);
  const std::uint64_t states = std::uint64_t{1} << (2 * n);
  for (std::uint64_t gm = 0; gm < graphs; ++gm) {
    const Graph g = graph_from_mask(n, gm);
    ++res.graphs;
    for (std::uint64_t sm = 0; sm < states; ++sm) {
      const OpinionState s = state_from_mask(n, sm);
      ++res.states;
      const std::vector<double> prob = adoption_probabilities(g, s, rule);
      for (Vertex v = 0; v < g.vertex_count(); ++v) {
        res.max_polynomial_diff =
            std::max(res.max_polynomial_diff, std::abs(prob[v] - polynomial_adoption(g, s, rule, v)));
      }
      res.max_diff = std::max(res.max_diff, max_abs_diff(sampling_distribution(g, s, rule), product_distribution(prob)));
    }
  }
  return res;
}

// W(S0; S1..Sl) straight from an adjacency matrix.
inline double naive_w_stat(const std::vector<std::vector<bool>>& adj, const VertexSet& s0,
                           const std::vector<VertexSet>& sets) {
  double total = 0.0;
  for (Vertex s : s0) {
    double prod = 1.0;
    for (const auto& set : sets) {
      std::uint64_t d = 0;
      for (Vertex w : set) d += adj[s][w] ? 1U : 0U;
      prod *= static_cast<double>(d);
    }
    total += prod;
  }
  return total;
}

inline VertexSet set_from_mask(std::uint32_t vertex_count, std::uint64_t mask) {
  VertexSet out;
  for (Vertex v = 0; v < vertex_count; ++v) {
    if ((mask >> v) & 1U) out.push_back(v);
  }
  return out;
}

struct WStatCheck {
  std::uint64_t graphs = 0;
  std::uint64_t cases = 0;
  std::uint64_t mismatches = 0;
};

// Every graph on `vertices` labelled vertices (padded with one isolated vertex
// when odd, since communities have equal size), every S0 and every tuple
// (S1..Sl) with l ≤ 2 over those vertices.
inline WStatCheck exhaustive_w_stat(std::uint32_t vertices) {
  WStatCheck res;
  const std::uint32_t n = (vertices + 1) / 2;
  const auto pairs = all_pairs(vertices);
  const std::uint64_t subsets = std::uint64_t{1} << vertices;
  std::vector<VertexSet> all_sets;
  for (std::uint64_t m = 0; m < subsets; ++m) all_sets.push_back(set_from_mask(vertices, m));
  std::vector<std::vector<VertexSet>> tuples;
  for (const auto& s1 : all_sets) {
    tuples.push_back({s1});
    for (const auto& s2 : all_sets) tuples.push_back({s1, s2});
  }
  for (std::uint64_t gm = 0; gm < (std::uint64_t{1} << pairs.size()); ++gm) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::vector<std::vector<bool>> adj(vertices, std::vector<bool>(vertices, false));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if ((gm >> i) & 1U) {
        edges.push_back(pairs[i]);
        adj[pairs[i].first][pairs[i].second] = adj[pairs[i].second][pairs[i].first] = true;
      }
    }
    const Graph g(n, 1.0, 1.0, 0, edges);
    ++res.graphs;
    for (const auto& s0 : all_sets) {
      for (const auto& tuple : tuples) {
        ++res.cases;
        if (w_stat(g, s0, tuple) != naive_w_stat(adj, s0, tuple)) ++res.mismatches;
      }
    }
  }
  return res;
}

}  // namespace votedyn::testing

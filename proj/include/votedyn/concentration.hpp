#pragma once

// Empirical probes of degree-ratio concentration on a fixed graph.
//
// The goodness properties quantify over every vertex subset, which cannot be
// enumerated. The scans here draw subsets from a handful of families (random
// density, community aligned, tiny, degree extreme) and report the largest
// normalized discrepancy seen, i.e. an empirical constant. Each sample is a
// pure function of derive_key(seed, sample index).

#include <cstdint>
#include <string>
#include <vector>

#include "votedyn/graph.hpp"
#include "votedyn/opinion.hpp"
#include "votedyn/rule.hpp"

namespace votedyn {

/// Sorted list of distinct vertex ids.
using VertexSet = std::vector<Vertex>;

VertexSet all_vertices(const Graph& g);
VertexSet community_vertices(const Graph& g, int community);
VertexSet members(const OpinionState& s);

/// W(S0; S1..Sl) = Σ_{s ∈ S0} Π_i deg_{Si}(s). Requires at least one set.
double w_stat(const Graph& g, const VertexSet& s0, const std::vector<VertexSet>& sets);

/// Expected W under independent edges: Σ_{s ∈ S0} Π_i E[deg_{Si}(s)] with
/// E[deg_S(v)] = p·|S ∩ V_c(v) ∖ {v}| + q·|S ∩ V_other|.
double w_hat(std::uint32_t n, double p, double q, const VertexSet& s0,
             const std::vector<VertexSet>& sets);

struct WStatReport {
  unsigned l = 1;
  std::uint64_t samples = 0;
  /// max |W − Ŵ| / (N (N p)^{l − 1/2}) with N = 2n.
  double max_normalized_dev = 0.0;
  double normalizer = 0.0;
};

/// Requires l ∈ {1, 2, 3} and samples ≥ 1.
WStatReport w_concentration_scan(const Graph& g, unsigned l, std::uint64_t samples,
                                 std::uint64_t seed);

/// (|A_i| p + |A_{3−i}| q) / (n (p + q)) for community i ∈ {1, 2}.
double z_hat(const Graph& g, const OpinionState& a, int community);

/// deg_A(v)/deg(v) for every vertex (0 for isolated vertices).
std::vector<double> neighbor_ratios(const Graph& g, const OpinionState& a);

/// Σ_{v ∈ S ∩ V_i} f(x_v) − |S ∩ V_i| f(ẑ_i) for an explicit S.
double goodness_gap(const Graph& g, const Polynomial& f, const OpinionState& a,
                    const VertexSet& s, int community);

/// sup over S ⊆ V of |goodness_gap|, attained by taking every vertex of V_i
/// on one side of f(ẑ_i).
double p2_sup_gap(const Graph& g, const Polynomial& f, const OpinionState& a, int community);

struct ProbeResult {
  std::uint64_t samples = 0;
  double max_normalized = 0.0;
  /// Which sample produced the maximum.
  std::string worst;
};

/// Normalized by √(n/p); probes f1 and f2 and both communities per sample.
ProbeResult p2_scan(const Graph& g, const VotingRule& rule, std::uint64_t samples,
                    std::uint64_t seed);

/// One-sided gap over S ∈ {A, V∖A, V} normalized by |A| √(ln n / (n p)), for
/// |A| cycling through √n, n / ln n and 0.02 n. Values are clamped below at 0.
ProbeResult p3_scan(const Graph& g, const VotingRule& rule, std::uint64_t samples,
                    std::uint64_t seed);

/// Var[|A'_i| | A] = Σ_{v ∈ V_i} P_v (1 − P_v).
double variance_exact(const Graph& g, const VotingRule& rule, const OpinionState& a, int community);

/// |A_i| g1(ẑ_i) + (n − |A_i|) g2(ẑ_i) with g_j = f_j (1 − f_j).
double variance_ideal(const Graph& g, const VotingRule& rule, const OpinionState& a,
                      int community);

/// max over states and communities of |exact − ideal| / √(n/p).
ProbeResult variance_profile(const Graph& g, const VotingRule& rule,
                             const std::vector<OpinionState>& states);

/// States used by the goodness command for the variance probe.
std::vector<OpinionState> probe_states(const Graph& g, std::uint64_t count, std::uint64_t seed);

struct GoodnessReport {
  std::string rule;
  ProbeResult p2;
  ProbeResult p3;
  ProbeResult variance;
};

GoodnessReport goodness(const Graph& g, const VotingRule& rule, std::uint64_t samples,
                        std::uint64_t seed);

}  // namespace votedyn

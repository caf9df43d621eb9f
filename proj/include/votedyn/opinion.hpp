#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "votedyn/graph.hpp"

namespace votedyn {

/// Set A of opinion-1 vertices over V = V1 ∪ V2, with per-community counts.
class OpinionState {
 public:
  OpinionState() = default;
  /// All vertices hold opinion 2.
  explicit OpinionState(std::uint32_t n);

  static OpinionState empty(std::uint32_t n) { return OpinionState(n); }
  static OpinionState full(std::uint32_t n);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t vertex_count() const noexcept { return 2 * n_; }

  bool contains(Vertex v) const noexcept { return (words_[v >> 6] >> (v & 63)) & 1U; }
  void set(Vertex v, bool opinion1) noexcept;

  /// |A1|, |A2|.
  std::uint32_t count1() const noexcept { return count1_; }
  std::uint32_t count2() const noexcept { return count2_; }
  std::uint32_t size() const noexcept { return count1_ + count2_; }

  bool is_consensus() const noexcept { return size() == 0 || size() == vertex_count(); }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  bool operator==(const OpinionState& other) const = default;

 private:
  std::uint32_t n_ = 0;
  std::uint32_t count1_ = 0;
  std::uint32_t count2_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Point in α-space [0,1]².
struct AlphaPoint {
  double a1 = 0.0;
  double a2 = 0.0;
  bool operator==(const AlphaPoint&) const = default;
};

/// Point in δ-space {|d1| + |d2| ≤ 1}.
struct DeltaPoint {
  double d1 = 0.0;
  double d2 = 0.0;
  bool operator==(const DeltaPoint&) const = default;
};

/// (|A1|/n, |A2|/n).
AlphaPoint fractions(const OpinionState& s);

/// δ = (α1 − α2, α1 + α2 − 1).
DeltaPoint to_delta(AlphaPoint a);

/// Inverse of to_delta. Throws std::invalid_argument outside |d1| + |d2| ≤ 1.
AlphaPoint from_delta(DeltaPoint d);

// Initial-condition families.
struct BiasedGlobal {
  double b = 0.2;  ///< |A| = (1 + b) n, split evenly across communities
};
struct HalfHalf {};
struct Clustered {
  double d1 = 0.0;
  double d2 = 0.0;
};
struct ExactCounts {
  std::uint32_t a1 = 0;
  std::uint32_t a2 = 0;
};
struct RandomDensity {
  double rho = 0.5;
};

using InitFamily = std::variant<BiasedGlobal, HalfHalf, Clustered, ExactCounts, RandomDensity>;

/// Short label such as `clustered(0.5,0)`, used in result files.
std::string describe(const InitFamily& family);

/// Per-community counts (|A1|, |A2|) a family prescribes; nullopt for
/// random_density. Throws std::invalid_argument when infeasible.
std::optional<std::pair<std::uint32_t, std::uint32_t>> target_counts(std::uint32_t n,
                                                                     const InitFamily& family);

/// Draws an initial state. Members are chosen uniformly within each community.
OpinionState make_initial(std::uint32_t n, const InitFamily& family, std::uint64_t seed);
inline OpinionState make_initial(const Graph& g, const InitFamily& family, std::uint64_t seed) {
  return make_initial(g.n(), family, seed);
}

}  // namespace votedyn

#pragma once

// Two-community stochastic block model G(2n, p, q).
//
// Vertices 0..n-1 form community 1 and n..2n-1 community 2. Adjacency is held
// in compressed form (offsets + flat sorted neighbor array). A Graph is
// immutable once built and safe to share between threads.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace votedyn {

using Vertex = std::uint32_t;

class OpinionState;

class Graph {
 public:
  /// Builds a graph from an undirected edge list. Throws std::invalid_argument
  /// on self-loops, duplicate edges, out-of-range ids or bad parameters.
  Graph(std::uint32_t n, double p, double q, std::uint64_t seed,
        std::span<const std::pair<Vertex, Vertex>> edges);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t vertex_count() const noexcept { return 2 * n_; }
  std::uint64_t edge_count() const noexcept { return neighbors_.size() / 2; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// 1 or 2.
  int community(Vertex v) const noexcept { return v < n_ ? 1 : 2; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(Vertex v) const noexcept {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }

  bool has_edge(Vertex u, Vertex v) const;

  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  bool operator==(const Graph& other) const = default;

 private:
  std::uint32_t n_;
  double p_;
  double q_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> offsets_;
  std::vector<Vertex> neighbors_;
};

struct DegreeStats {
  std::uint32_t min_deg = 0;
  std::uint32_t max_deg = 0;
  double mean_deg = 0.0;
  /// max over v of |deg(v) - n(p+q)|.
  double max_abs_dev = 0.0;
  /// max_abs_dev / sqrt(n p ln n); NaN when the denominator vanishes.
  double normalized_dev = 0.0;
};

struct ConnectivityReport {
  bool connected = false;
  bool bipartite = false;
  std::uint32_t components = 0;
  std::uint32_t isolated = 0;
};

/// Vertex count per community at or below which every pair gets its own
/// Bernoulli draw. Larger graphs use geometric skipping per block.
inline constexpr std::uint32_t kPairwiseGenerationLimit = 2000;

/// Samples G(2n, p, q). Deterministic in (n, p, q, seed).
Graph generate_sbm(std::uint32_t n, double p, double q, std::uint64_t seed);

/// The two generation paths, exposed so they can be compared directly.
Graph generate_sbm_pairwise(std::uint32_t n, double p, double q, std::uint64_t seed);
Graph generate_sbm_skipping(std::uint32_t n, double p, double q, std::uint64_t seed);

DegreeStats degree_stats(const Graph& g);
ConnectivityReport connectivity_report(const Graph& g);

/// |S ∩ N(v)| where S is the opinion-1 set of `s`.
std::uint32_t deg_in_set(const Graph& g, Vertex v, const OpinionState& s);

/// Edge-list text format: header `sbm n p q seed`, then one `u v` per line.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);
void save_graph(const std::string& path, const Graph& g);
Graph load_graph(const std::string& path);

/// Shortest decimal text that round-trips the double.
std::string format_real(double x);

}  // namespace votedyn

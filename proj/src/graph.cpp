#include "votedyn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "votedyn/opinion.hpp"
#include "votedyn/rng.hpp"

namespace votedyn {
namespace {

void validate_parameters(std::uint32_t n, double p, double q) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (!(q >= 0.0)) throw std::invalid_argument("q must be non-negative");
  if (q > p) throw std::invalid_argument("q must not exceed p");
  if (n > std::numeric_limits<std::uint32_t>::max() / 2) throw std::invalid_argument("n too large");
}

using EdgeList = std::vector<std::pair<Vertex, Vertex>>;

// Batagelj–Brandes skipping over the pairs {i < j} of `count` vertices
// starting at `base`.
void skip_triangle(Vertex base, std::uint32_t count, double prob, SplitMix64& rng, EdgeList& out) {
  if (prob <= 0.0 || count < 2) return;
  const double log_q = std::log1p(-prob);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const std::int64_t m = count;
  while (v < m) {
    const double r = rng.uniform();
    const double skip = prob >= 1.0 ? 0.0 : std::floor(std::log1p(-r) / log_q);
    w += 1 + static_cast<std::int64_t>(std::min(skip, 9.0e15));
    while (w >= v && v < m) {
      w -= v;
      ++v;
    }
    if (v < m) out.emplace_back(base + static_cast<Vertex>(w), base + static_cast<Vertex>(v));
  }
}

// Same over the full rectangle V1 × V2.
void skip_rectangle(std::uint32_t n, double prob, SplitMix64& rng, EdgeList& out) {
  if (prob <= 0.0) return;
  const double log_q = std::log1p(-prob);
  const std::int64_t total = static_cast<std::int64_t>(n) * n;
  std::int64_t k = -1;
  while (true) {
    const double r = rng.uniform();
    const double skip = prob >= 1.0 ? 0.0 : std::floor(std::log1p(-r) / log_q);
    k += 1 + static_cast<std::int64_t>(std::min(skip, 9.0e15));
    if (k >= total) break;
    out.emplace_back(static_cast<Vertex>(k / n), static_cast<Vertex>(n + k % n));
  }
}

}  // namespace

Graph::Graph(std::uint32_t n, double p, double q, std::uint64_t seed,
             std::span<const std::pair<Vertex, Vertex>> edges)
    : n_(n), p_(p), q_(q), seed_(seed) {
  validate_parameters(n, p, q);
  const std::uint32_t count = 2 * n;
  std::vector<std::uint64_t> degree(count, 0);
  for (const auto& [a, b] : edges) {
    if (a >= count || b >= count) throw std::invalid_argument("vertex id out of range");
    if (a == b) throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
    ++degree[a];
    ++degree[b];
  }
  offsets_.assign(count + 1, 0);
  for (std::uint32_t v = 0; v < count; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  neighbors_.resize(offsets_[count]);
  std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    neighbors_[cursor[a]++] = b;
    neighbors_[cursor[b]++] = a;
  }
  for (std::uint32_t v = 0; v < count; ++v) {
    auto first = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto last = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) {
      throw std::invalid_argument("duplicate edge at vertex " + std::to_string(v));
    }
  }
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < vertex_count(); ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph generate_sbm_pairwise(std::uint32_t n, double p, double q, std::uint64_t seed) {
  validate_parameters(n, p, q);
  SplitMix64 rng(seed);
  EdgeList edges;
  const std::uint32_t count = 2 * n;
  for (Vertex u = 0; u < count; ++u) {
    for (Vertex v = u + 1; v < count; ++v) {
      const double prob = (u < n) == (v < n) ? p : q;
      if (rng.uniform() < prob) edges.emplace_back(u, v);
    }
  }
  return Graph(n, p, q, seed, edges);
}

Graph generate_sbm_skipping(std::uint32_t n, double p, double q, std::uint64_t seed) {
  validate_parameters(n, p, q);
  SplitMix64 rng(seed);
  EdgeList edges;
  skip_triangle(0, n, p, rng, edges);
  skip_triangle(n, n, p, rng, edges);
  skip_rectangle(n, q, rng, edges);
  return Graph(n, p, q, seed, edges);
}

Graph generate_sbm(std::uint32_t n, double p, double q, std::uint64_t seed) {
  if (n <= kPairwiseGenerationLimit) return generate_sbm_pairwise(n, p, q, seed);
  return generate_sbm_skipping(n, p, q, seed);
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats s;
  const std::uint32_t count = g.vertex_count();
  const double expected = static_cast<double>(g.n()) * (g.p() + g.q());
  s.min_deg = std::numeric_limits<std::uint32_t>::max();
  double total = 0.0;
  for (Vertex v = 0; v < count; ++v) {
    const std::uint32_t d = g.degree(v);
    s.min_deg = std::min(s.min_deg, d);
    s.max_deg = std::max(s.max_deg, d);
    total += d;
    s.max_abs_dev = std::max(s.max_abs_dev, std::abs(d - expected));
  }
  s.mean_deg = total / count;
  const double scale = std::sqrt(g.n() * g.p() * std::log(static_cast<double>(g.n())));
  s.normalized_dev = scale > 0.0 ? s.max_abs_dev / scale : std::numeric_limits<double>::quiet_NaN();
  return s;
}

ConnectivityReport connectivity_report(const Graph& g) {
  ConnectivityReport r;
  const std::uint32_t count = g.vertex_count();
  std::vector<int> color(count, -1);
  r.bipartite = true;
  std::queue<Vertex> frontier;
  for (Vertex start = 0; start < count; ++start) {
    if (color[start] != -1) continue;
    ++r.components;
    if (g.degree(start) == 0) ++r.isolated;
    color[start] = 0;
    frontier.push(start);
    while (!frontier.empty()) {
      const Vertex v = frontier.front();
      frontier.pop();
      for (Vertex w : g.neighbors(v)) {
        if (color[w] == -1) {
          color[w] = 1 - color[v];
          frontier.push(w);
        } else if (color[w] == color[v]) {
          r.bipartite = false;
        }
      }
    }
  }
  r.connected = r.components == 1;
  return r;
}

std::uint32_t deg_in_set(const Graph& g, Vertex v, const OpinionState& s) {
  std::uint32_t c = 0;
  for (Vertex w : g.neighbors(v)) c += s.contains(w) ? 1U : 0U;
  return c;
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "sbm " << g.n() << ' ' << format_real(g.p()) << ' ' << format_real(g.q()) << ' '
      << g.seed() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("graph file: missing header");
  std::istringstream header(line);
  std::string tag;
  std::uint64_t n = 0;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t seed = 0;
  if (!(header >> tag >> n >> p >> q >> seed) || tag != "sbm") {
    throw std::invalid_argument("graph file: header must be `sbm n p q seed`");
  }
  std::string rest;
  if (header >> rest) throw std::invalid_argument("graph file: trailing tokens in header");
  if (n == 0 || n > std::numeric_limits<std::uint32_t>::max() / 2) {
    throw std::invalid_argument("graph file: bad n");
  }
  EdgeList edges;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    if (!(row >> a >> b) || (row >> rest)) {
      throw std::invalid_argument("graph file: malformed edge on line " + std::to_string(lineno));
    }
    if (a >= 2 * n || b >= 2 * n) {
      throw std::invalid_argument("graph file: vertex out of range on line " +
                                  std::to_string(lineno));
    }
    edges.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
  }
  return Graph(static_cast<std::uint32_t>(n), p, q, seed, edges);
}

void save_graph(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_graph(out, g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_graph(in);
}

}  // namespace votedyn

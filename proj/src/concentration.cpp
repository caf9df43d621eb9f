#include "votedyn/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "votedyn/rng.hpp"
#include "votedyn/voting.hpp"

namespace votedyn {
namespace {

std::vector<char> membership(std::uint32_t vertex_count, const VertexSet& s) {
  std::vector<char> in(vertex_count, 0);
  for (Vertex v : s) {
    if (v >= vertex_count) throw std::invalid_argument("vertex id out of range");
    in[v] = 1;
  }
  return in;
}

VertexSet random_subset(std::uint32_t vertex_count, double rho, std::uint64_t key) {
  VertexSet out;
  for (Vertex v = 0; v < vertex_count; ++v) {
    if (to_unit(counter_draw(key, v)) < rho) out.push_back(v);
  }
  return out;
}

VertexSet random_small(std::uint32_t vertex_count, std::uint64_t key) {
  SplitMix64 rng(key);
  const std::uint64_t size = 1 + rng.below(std::min<std::uint64_t>(10, vertex_count));
  VertexSet out;
  while (out.size() < size) {
    const auto v = static_cast<Vertex>(rng.below(vertex_count));
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// One set of a W-statistic tuple, drawn from a structured or random family.
VertexSet w_sample_set(const Graph& g, std::uint64_t key) {
  SplitMix64 rng(key);
  switch (rng.below(6)) {
    case 0:
      return all_vertices(g);
    case 1:
      return community_vertices(g, 1);
    case 2:
      return community_vertices(g, 2);
    case 3:
      return random_small(g.vertex_count(), rng());
    default:
      return random_subset(g.vertex_count(), rng.uniform(), rng());
  }
}

OpinionState state_from(std::uint32_t n, const VertexSet& s) {
  OpinionState out(n);
  for (Vertex v : s) out.set(v, true);
  return out;
}

// Opinion-1 sets for the two-sided probe. Returns a label for reporting.
std::string random_state(const Graph& g, std::uint64_t key, OpinionState& out) {
  SplitMix64 rng(key);
  const std::uint32_t n = g.n();
  const std::uint32_t vc = g.vertex_count();
  switch (rng.below(5)) {
    case 0: {
      const double rho = rng.uniform();
      out = state_from(n, random_subset(vc, rho, rng()));
      return "random_density";
    }
    case 1: {
      const double rho1 = rng.uniform();
      const double rho2 = rng.uniform();
      OpinionState s(n);
      const std::uint64_t k = rng();
      for (Vertex v = 0; v < vc; ++v) {
        s.set(v, to_unit(counter_draw(k, v)) < (v < n ? rho1 : rho2));
      }
      out = std::move(s);
      return "community_aligned";
    }
    case 2:
      out = state_from(n, random_small(vc, rng()));
      return "tiny";
    case 3: {
      std::vector<Vertex> order(vc);
      std::iota(order.begin(), order.end(), Vertex{0});
      const bool high = rng.below(2) == 0;
      std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return high ? g.degree(a) > g.degree(b) : g.degree(a) < g.degree(b);
      });
      const auto take = static_cast<std::size_t>(rng.below(vc) + 1);
      OpinionState s(n);
      for (std::size_t i = 0; i < take; ++i) s.set(order[i], true);
      out = std::move(s);
      return high ? "high_degree" : "low_degree";
    }
    default: {
      const auto a1 = static_cast<std::uint32_t>(rng.below(n + 1));
      const auto a2 = static_cast<std::uint32_t>(rng.below(n + 1));
      out = make_initial(n, ExactCounts{a1, a2}, rng());
      return "exact_counts";
    }
  }
}

std::string sample_label(std::uint64_t k, const std::string& family) {
  return "sample " + std::to_string(k) + " (" + family + ")";
}

}  // namespace

VertexSet all_vertices(const Graph& g) {
  VertexSet out(g.vertex_count());
  std::iota(out.begin(), out.end(), Vertex{0});
  return out;
}

VertexSet community_vertices(const Graph& g, int community) {
  if (community != 1 && community != 2) throw std::invalid_argument("community must be 1 or 2");
  VertexSet out(g.n());
  std::iota(out.begin(), out.end(), community == 1 ? Vertex{0} : g.n());
  return out;
}

VertexSet members(const OpinionState& s) {
  VertexSet out;
  out.reserve(s.size());
  for (Vertex v = 0; v < s.vertex_count(); ++v) {
    if (s.contains(v)) out.push_back(v);
  }
  return out;
}

double w_stat(const Graph& g, const VertexSet& s0, const std::vector<VertexSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("w_stat needs at least one set");
  std::vector<std::vector<char>> in;
  in.reserve(sets.size());
  for (const auto& s : sets) in.push_back(membership(g.vertex_count(), s));
  double total = 0.0;
  for (Vertex v : s0) {
    if (v >= g.vertex_count()) throw std::invalid_argument("vertex id out of range");
    double prod = 1.0;
    for (const auto& mask : in) {
      std::uint32_t deg = 0;
      for (Vertex w : g.neighbors(v)) deg += mask[w] ? 1U : 0U;
      prod *= static_cast<double>(deg);
    }
    total += prod;
  }
  return total;
}

double w_hat(std::uint32_t n, double p, double q, const VertexSet& s0,
             const std::vector<VertexSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("w_hat needs at least one set");
  const std::uint32_t vc = 2 * n;
  struct Split {
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<char> in;
  };
  std::vector<Split> split;
  for (const auto& s : sets) {
    Split sp;
    sp.in = membership(vc, s);
    for (Vertex v : s) (v < n ? sp.c1 : sp.c2) += 1.0;
    split.push_back(std::move(sp));
  }
  double total = 0.0;
  for (Vertex v : s0) {
    if (v >= vc) throw std::invalid_argument("vertex id out of range");
    double prod = 1.0;
    for (const auto& sp : split) {
      const double own = (v < n ? sp.c1 : sp.c2) - (sp.in[v] ? 1.0 : 0.0);
      const double other = v < n ? sp.c2 : sp.c1;
      prod *= p * own + q * other;
    }
    total += prod;
  }
  return total;
}

WStatReport w_concentration_scan(const Graph& g, unsigned l, std::uint64_t samples,
                                 std::uint64_t seed) {
  if (l < 1 || l > 3) throw std::invalid_argument("l must be 1, 2 or 3");
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  WStatReport rep;
  rep.l = l;
  const double big_n = static_cast<double>(g.vertex_count());
  rep.normalizer = big_n * std::pow(big_n * g.p(), static_cast<double>(l) - 0.5);
  for (std::uint64_t k = 0; k < samples; ++k) {
    const std::uint64_t key = derive_key(seed, k);
    // The first tuple is (V; V, ..., V); the rest are drawn.
    VertexSet s0 = k == 0 ? all_vertices(g) : w_sample_set(g, derive_key(key, 0));
    std::vector<VertexSet> sets;
    for (unsigned i = 1; i <= l; ++i) {
      sets.push_back(k == 0 ? all_vertices(g) : w_sample_set(g, derive_key(key, i)));
    }
    const double dev = std::abs(w_stat(g, s0, sets) - w_hat(g.n(), g.p(), g.q(), s0, sets));
    if (rep.normalizer > 0.0) rep.max_normalized_dev = std::max(rep.max_normalized_dev, dev / rep.normalizer);
    ++rep.samples;
  }
  return rep;
}

double z_hat(const Graph& g, const OpinionState& a, int community) {
  if (community != 1 && community != 2) throw std::invalid_argument("community must be 1 or 2");
  const double own = community == 1 ? a.count1() : a.count2();
  const double other = community == 1 ? a.count2() : a.count1();
  const double denom = static_cast<double>(g.n()) * (g.p() + g.q());
  if (denom == 0.0) return 0.0;
  return (own * g.p() + other * g.q()) / denom;
}

std::vector<double> neighbor_ratios(const Graph& g, const OpinionState& a) {
  if (a.n() != g.n()) throw std::invalid_argument("state and graph sizes differ");
  std::vector<double> x(g.vertex_count(), 0.0);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const std::uint32_t deg = g.degree(v);
    if (deg > 0) x[v] = static_cast<double>(deg_in_set(g, v, a)) / static_cast<double>(deg);
  }
  return x;
}

double goodness_gap(const Graph& g, const Polynomial& f, const OpinionState& a,
                    const VertexSet& s, int community) {
  const double fz = f(z_hat(g, a, community));
  const std::vector<double> x = neighbor_ratios(g, a);
  double gap = 0.0;
  for (Vertex v : s) {
    if (v >= g.vertex_count()) throw std::invalid_argument("vertex id out of range");
    if (g.community(v) == community) gap += f(x[v]) - fz;
  }
  return gap;
}

namespace {

double sup_gap_from(const Graph& g, const Polynomial& f, const std::vector<double>& x,
                    double fz, int community) {
  const Vertex lo = community == 1 ? 0 : g.n();
  double pos = 0.0;
  double neg = 0.0;
  for (Vertex v = lo; v < lo + g.n(); ++v) {
    const double d = f(x[v]) - fz;
    (d > 0.0 ? pos : neg) += d;
  }
  return std::max(pos, -neg);
}

}  // namespace

double p2_sup_gap(const Graph& g, const Polynomial& f, const OpinionState& a, int community) {
  return sup_gap_from(g, f, neighbor_ratios(g, a), f(z_hat(g, a, community)), community);
}

ProbeResult p2_scan(const Graph& g, const VotingRule& rule, std::uint64_t samples,
                    std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  ProbeResult res;
  const double norm = std::sqrt(static_cast<double>(g.n()) / g.p());
  for (std::uint64_t k = 0; k < samples; ++k) {
    OpinionState a;
    const std::string family = random_state(g, derive_key(seed, k), a);
    const std::vector<double> x = neighbor_ratios(g, a);
    for (int i = 1; i <= 2; ++i) {
      const double z = z_hat(g, a, i);
      for (const Polynomial* f : {&rule.f1, &rule.f2}) {
        const double v = sup_gap_from(g, *f, x, (*f)(z), i) / norm;
        if (v > res.max_normalized || res.worst.empty()) {
          res.max_normalized = std::max(res.max_normalized, v);
          res.worst = sample_label(k, family);
        }
      }
    }
    ++res.samples;
  }
  return res;
}

ProbeResult p3_scan(const Graph& g, const VotingRule& rule, std::uint64_t samples,
                    std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  const double n = g.n();
  const double ln_n = std::log(n);
  const std::uint32_t vc = g.vertex_count();
  const std::uint32_t sizes[] = {
      static_cast<std::uint32_t>(std::lround(std::sqrt(n))),
      ln_n > 0.0 ? static_cast<std::uint32_t>(std::lround(n / ln_n)) : g.n(),
      static_cast<std::uint32_t>(std::lround(0.02 * n)),
  };
  const char* placements[] = {"uniform", "community1", "split"};
  ProbeResult res;
  for (std::uint64_t k = 0; k < samples; ++k) {
    ++res.samples;
    const std::uint32_t size = std::clamp<std::uint32_t>(sizes[k % 3], 1, vc);
    const std::uint64_t placement = (k / 3) % 3;
    if (!(ln_n > 0.0 && g.p() > 0.0)) continue;
    // Partial Fisher-Yates over the chosen pool.
    SplitMix64 rng(derive_key(seed, k));
    std::vector<Vertex> pool;
    if (placement == 1) {
      pool = community_vertices(g, 1);
    } else {
      pool = all_vertices(g);
    }
    const std::uint32_t take = std::min<std::uint32_t>(size, static_cast<std::uint32_t>(pool.size()));
    OpinionState a(g.n());
    if (placement == 2) {
      // A random share of A in community 1, the rest in community 2.
      const auto in1 = static_cast<std::uint32_t>(
          std::min<std::uint64_t>(rng.below(take + 1), g.n()));
      const std::uint32_t in2 = std::min(take - in1, g.n());
      a = make_initial(g.n(), ExactCounts{in1, in2}, rng());
    } else {
      for (std::uint32_t i = 0; i < take; ++i) {
        const auto j = i + static_cast<std::uint32_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        a.set(pool[i], true);
      }
    }
    if (a.size() == 0) continue;
    const double norm_a = a.size() * std::sqrt(ln_n / (n * g.p()));
    const std::vector<double> x = neighbor_ratios(g, a);
    for (int i = 1; i <= 2; ++i) {
      const double z = z_hat(g, a, i);
      const Vertex lo = i == 1 ? 0 : g.n();
      for (const Polynomial* f : {&rule.f1, &rule.f2}) {
        const double fz = (*f)(z);
        // S = A, V∖A and V restricted to V_i.
        double in_a = 0.0;
        double out_a = 0.0;
        for (Vertex v = lo; v < lo + g.n(); ++v) {
          (a.contains(v) ? in_a : out_a) += (*f)(x[v]) - fz;
        }
        for (double gap : {in_a, out_a, in_a + out_a}) {
          const double val = std::max(0.0, gap) / norm_a;
          if (val > res.max_normalized) {
            res.max_normalized = val;
            res.worst = "sample " + std::to_string(k) + " (|A|=" + std::to_string(a.size()) +
                        ", " + placements[placement] + ")";
          }
        }
      }
    }
  }
  return res;
}

double variance_exact(const Graph& g, const VotingRule& rule, const OpinionState& a,
                      int community) {
  if (community != 1 && community != 2) throw std::invalid_argument("community must be 1 or 2");
  const std::vector<double> prob = adoption_probabilities(g, a, rule);
  const Vertex lo = community == 1 ? 0 : g.n();
  double var = 0.0;
  for (Vertex v = lo; v < lo + g.n(); ++v) var += prob[v] * (1.0 - prob[v]);
  return var;
}

double variance_ideal(const Graph& g, const VotingRule& rule, const OpinionState& a,
                      int community) {
  const double z = z_hat(g, a, community);
  const double members = community == 1 ? a.count1() : a.count2();
  const double f1 = rule.f1(z);
  const double f2 = rule.f2(z);
  return members * f1 * (1.0 - f1) + (g.n() - members) * f2 * (1.0 - f2);
}

ProbeResult variance_profile(const Graph& g, const VotingRule& rule,
                             const std::vector<OpinionState>& states) {
  ProbeResult res;
  const double norm = std::sqrt(static_cast<double>(g.n()) / g.p());
  for (std::size_t k = 0; k < states.size(); ++k) {
    ++res.samples;
    for (int i = 1; i <= 2; ++i) {
      const double dev =
          std::abs(variance_exact(g, rule, states[k], i) - variance_ideal(g, rule, states[k], i)) /
          norm;
      if (dev > res.max_normalized || res.worst.empty()) {
        res.max_normalized = std::max(res.max_normalized, dev);
        res.worst = "state " + std::to_string(k);
      }
    }
  }
  return res;
}

std::vector<OpinionState> probe_states(const Graph& g, std::uint64_t count, std::uint64_t seed) {
  std::vector<OpinionState> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    OpinionState a;
    random_state(g, derive_key(seed, k), a);
    out.push_back(std::move(a));
  }
  return out;
}

GoodnessReport goodness(const Graph& g, const VotingRule& rule, std::uint64_t samples,
                        std::uint64_t seed) {
  GoodnessReport rep;
  rep.rule = rule.name;
  rep.p2 = p2_scan(g, rule, samples, derive_key(seed, hash_tag("p2")));
  rep.p3 = p3_scan(g, rule, samples, derive_key(seed, hash_tag("p3")));
  rep.variance = variance_profile(g, rule, probe_states(g, samples, derive_key(seed, hash_tag("var"))));
  return rep;
}

}  // namespace votedyn

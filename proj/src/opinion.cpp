#include "votedyn/opinion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "votedyn/rng.hpp"

namespace votedyn {

OpinionState::OpinionState(std::uint32_t n) : n_(n), words_((2 * static_cast<std::size_t>(n) + 63) / 64, 0) {}

OpinionState OpinionState::full(std::uint32_t n) {
  OpinionState s(n);
  for (Vertex v = 0; v < 2 * n; ++v) s.set(v, true);
  return s;
}

void OpinionState::set(Vertex v, bool opinion1) noexcept {
  const std::uint64_t mask = std::uint64_t{1} << (v & 63);
  std::uint64_t& w = words_[v >> 6];
  const bool was = (w & mask) != 0;
  if (was == opinion1) return;
  std::uint32_t& count = v < n_ ? count1_ : count2_;
  if (opinion1) {
    w |= mask;
    ++count;
  } else {
    w &= ~mask;
    --count;
  }
}

AlphaPoint fractions(const OpinionState& s) {
  const double n = s.n();
  return {s.count1() / n, s.count2() / n};
}

DeltaPoint to_delta(AlphaPoint a) { return {a.a1 - a.a2, a.a1 + a.a2 - 1.0}; }

AlphaPoint from_delta(DeltaPoint d) {
  if (!(std::abs(d.d1) + std::abs(d.d2) <= 1.0 + 1e-12)) {
    throw std::invalid_argument("delta point outside |d1| + |d2| <= 1");
  }
  return {(1.0 + d.d2 + d.d1) * 0.5, (1.0 + d.d2 - d.d1) * 0.5};
}

namespace {

struct Describer {
  std::string operator()(const BiasedGlobal& f) const {
    std::ostringstream s;
    s << "biased_global(" << f.b << ')';
    return s.str();
  }
  std::string operator()(const HalfHalf&) const { return "half_half"; }
  std::string operator()(const Clustered& f) const {
    std::ostringstream s;
    s << "clustered(" << f.d1 << ';' << f.d2 << ')';
    return s.str();
  }
  std::string operator()(const ExactCounts& f) const {
    std::ostringstream s;
    s << "exact_counts(" << f.a1 << ';' << f.a2 << ')';
    return s.str();
  }
  std::string operator()(const RandomDensity& f) const {
    std::ostringstream s;
    s << "random_density(" << f.rho << ')';
    return s.str();
  }
};

std::uint32_t checked_count(double value, std::uint32_t n, const char* what) {
  const double rounded = std::round(value);
  if (!(rounded >= 0.0 && rounded <= n)) {
    throw std::invalid_argument(std::string("infeasible initial count for ") + what);
  }
  return static_cast<std::uint32_t>(rounded);
}

// Marks `k` uniformly chosen vertices of [base, base + n) by partial
// Fisher–Yates.
void choose_members(OpinionState& s, Vertex base, std::uint32_t n, std::uint32_t k,
                    SplitMix64& rng) {
  std::vector<Vertex> pool(n);
  std::iota(pool.begin(), pool.end(), base);
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
    s.set(pool[i], true);
  }
}

}  // namespace

std::string describe(const InitFamily& family) { return std::visit(Describer{}, family); }

std::optional<std::pair<std::uint32_t, std::uint32_t>> target_counts(std::uint32_t n,
                                                                     const InitFamily& family) {
  const double nd = n;
  if (const auto* f = std::get_if<BiasedGlobal>(&family)) {
    const double half = (1.0 + f->b) * nd / 2.0;
    return std::pair{checked_count(half, n, "biased_global"),
                     checked_count(half, n, "biased_global")};
  }
  if (std::holds_alternative<HalfHalf>(family)) {
    return std::pair{checked_count(nd / 2.0, n, "half_half"), checked_count(nd / 2.0, n, "half_half")};
  }
  if (const auto* f = std::get_if<Clustered>(&family)) {
    return std::pair{checked_count(nd * (1.0 + f->d2 + f->d1) / 2.0, n, "clustered"),
                     checked_count(nd * (1.0 + f->d2 - f->d1) / 2.0, n, "clustered")};
  }
  if (const auto* f = std::get_if<ExactCounts>(&family)) {
    if (f->a1 > n || f->a2 > n) throw std::invalid_argument("infeasible initial count for exact_counts");
    return std::pair{f->a1, f->a2};
  }
  const auto& f = std::get<RandomDensity>(family);
  if (!(f.rho >= 0.0 && f.rho <= 1.0)) throw std::invalid_argument("random_density rho must lie in [0, 1]");
  return std::nullopt;
}

OpinionState make_initial(std::uint32_t n, const InitFamily& family, std::uint64_t seed) {
  SplitMix64 rng(seed);
  OpinionState s(n);
  if (const auto counts = target_counts(n, family)) {
    choose_members(s, 0, n, counts->first, rng);
    choose_members(s, n, n, counts->second, rng);
    return s;
  }
  const double rho = std::get<RandomDensity>(family).rho;
  for (Vertex v = 0; v < 2 * n; ++v) s.set(v, rng.uniform() < rho);
  return s;
}

}  // namespace votedyn

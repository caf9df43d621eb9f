#pragma once

// Mean-field maps induced by a voting rule on G(2n, p, q).
//
// With r = q/p and z_i = (a_i + r a_{3-i}) / (1 + r), the α-space map is
//   H_i(a) = a_i f1(z_i) + (1 − a_i) f2(z_i),
// and T is its conjugate under δ = (α1 − α2, α1 + α2 − 1), parameterized by
// u = (1 − r)/(1 + r). Best-of-three and Best-of-two have closed forms for T.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "votedyn/opinion.hpp"
#include "votedyn/rule.hpp"

namespace votedyn {

double u_of_r(double r);
double r_of_u(double u);

enum class MapSpace { kAlpha, kDelta };

class InducedMap {
 public:
  static InducedMap from_r(VotingRule rule, double r);
  static InducedMap from_u(VotingRule rule, double u);

  const VotingRule& rule() const noexcept { return rule_; }
  ModelTag model() const noexcept { return rule_.model; }
  double r() const noexcept { return r_; }
  double u() const noexcept { return u_; }

  AlphaPoint eval_H(AlphaPoint a) const;
  /// Closed form when the model has one, conjugated H otherwise.
  DeltaPoint eval_T(DeltaPoint d) const;
  DeltaPoint eval_T_generic(DeltaPoint d) const;

 private:
  InducedMap(VotingRule rule, double r, double u) : rule_(std::move(rule)), r_(r), u_(u) {}

  VotingRule rule_;
  double r_;
  double u_;
};

DeltaPoint eval_T_bo3(double u, DeltaPoint d);
DeltaPoint eval_T_bo2(double u, DeltaPoint d);

struct MapPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct Orbit {
  MapSpace space = MapSpace::kDelta;
  std::vector<MapPoint> points;
};

/// x0, F(x0), ..., F^t(x0) with F = H or T according to `space`.
Orbit iterate(const InducedMap& m, MapSpace space, MapPoint x0, std::uint64_t t);

/// Writes `# space=... model=... u=...` and `t,x1,x2` rows.
void write_orbit_csv(std::ostream& out, const InducedMap& m, const Orbit& orbit);

enum class FixedPointId { kD1, kD2, kD3, kD4 };

std::string to_string(FixedPointId id);

struct OrbitLimit {
  bool converged = false;
  /// Set when |d| landed on a closed-form fixed point.
  std::optional<FixedPointId> fixed_point;
  DeltaPoint limit;
  std::uint64_t iterations = 0;
};

/// Iterates T until successive points differ by < tol (∞-norm), then matches
/// (|d1|, |d2|) against the closed-form fixed points within 100·tol.
OrbitLimit orbit_limit(const InducedMap& m, DeltaPoint d0, double tol = 1e-10,
                       std::uint64_t max_iter = 100000);

struct ClosureReport {
  std::uint64_t samples = 0;
  double max_violation = 0.0;
  std::uint64_t violations = 0;  ///< images leaving S by more than 1e-12
};

/// Lemma-style check that T maps S = {d1, d2 ≥ 0, d1 + d2 ≤ 1} into itself.
ClosureReport check_S_closed(const InducedMap& m, std::uint64_t samples, std::uint64_t seed);

/// Distance by which a point lies outside S (0 inside).
double S_violation(DeltaPoint d);

}  // namespace votedyn

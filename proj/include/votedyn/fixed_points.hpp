#pragma once

// Fixed points of the closed-form δ-maps and their local classification.

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "votedyn/dynamics.hpp"

namespace votedyn {

struct Matrix2 {
  double j11 = 0.0;
  double j12 = 0.0;
  double j21 = 0.0;
  double j22 = 0.0;

  double trace() const noexcept { return j11 + j22; }
  double det() const noexcept { return j11 * j22 - j12 * j21; }
  double max_abs() const noexcept;
};

Matrix2 operator-(const Matrix2& a, const Matrix2& b);

/// Eigenvalues ordered by modulus, descending (ties: larger real part first).
std::array<std::complex<double>, 2> eigen_2x2(const Matrix2& m);

/// (σ_max, σ_min).
std::pair<double, double> singular_values_2x2(const Matrix2& m);

enum class FixedPointClass { kConsensusSuperattracting, kSink, kSaddle, kSource, kMarginal };

std::string to_string(FixedPointClass c);

/// |λ| within this of 1 counts as marginal.
inline constexpr double kMarginalTol = 1e-9;

FixedPointClass classify(const Matrix2& m);

struct FixedPointLocation {
  FixedPointId id;
  bool exists = false;
  DeltaPoint location;
};

/// d*1..d*4 of the Best-of-three δ-map; d*2 needs u ≥ 2/3, d*3 needs u ≥ 3/4.
std::array<FixedPointLocation, 4> fixed_points_bo3(double u);

/// d*1..d*4 of the Best-of-two δ-map; d*2 needs u ≥ 1/2, d*3 needs u ≥ (√5−1)/2.
std::array<FixedPointLocation, 4> fixed_points_bo2(double u);

/// Dispatches on bo3/bo2; throws std::invalid_argument for generic models.
std::array<FixedPointLocation, 4> fixed_points(ModelTag model, double u);

/// General-form Jacobian of T at d.
Matrix2 jacobian_analytic(ModelTag model, double u, DeltaPoint d);

/// Central-difference Jacobian of m.eval_T at d.
Matrix2 jacobian_numeric(const InducedMap& m, DeltaPoint d, double h = 1e-6);

struct FixedPointReport {
  FixedPointId id;
  bool exists = false;
  DeltaPoint location;
  Matrix2 jacobian;
  std::array<std::complex<double>, 2> eigenvalues;
  std::pair<double, double> singular_values;
  FixedPointClass cls = FixedPointClass::kMarginal;
};

std::vector<FixedPointReport> analyze_fixed_points(ModelTag model, double u);

/// Sign of λ against 1: '+', '1' or '-'.
char eigen_sign(std::complex<double> lambda);

struct EigenTableCell {
  FixedPointId id;
  bool defined = false;
  std::string pattern;  ///< e.g. "(+,-)", "undefined" when the point does not exist
};

struct EigenTableColumn {
  double u = 0.0;
  std::array<EigenTableCell, 4> cells;
};

/// Per-fixed-point (c1, c2) sign patterns with λ1 ≥ λ2.
std::vector<EigenTableColumn> eigen_table(ModelTag model, const std::vector<double>& u_values);

struct ThresholdReport {
  double u_numeric = 0.0;
  double u_analytic = 0.0;
  double r_numeric = 0.0;
  double r_analytic = 0.0;
  int bisection_steps = 0;
};

/// Locates the u where the leading eigenvalue of J at d*2 crosses 1.
ThresholdReport threshold_r(ModelTag model);

struct CompetitiveReport {
  std::uint64_t points = 0;
  std::uint64_t sign_failures = 0;
  std::uint64_t det_failures = 0;
  double min_det = 0.0;
  DeltaPoint argmin_det;
};

/// Scans the grid of S ∖ {(0,1)}: diag ≥ 0, off-diag ≤ 0 and det J > 0.
CompetitiveReport competitive_checks(ModelTag model, double u, double grid_step);

}  // namespace votedyn

#include "votedyn/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace votedyn {
namespace {

// Existence conditions such as 3u − 2 ≥ 0 are evaluated with this much slack
// so that u = 2/3 rounded to a double still counts as the boundary case.
constexpr double kExistSlack = 1e-12;

void check_u(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("u must lie in [0, 1]");
}

double sqrt_clamped(double x) { return std::sqrt(std::max(0.0, x)); }

double golden_u() { return (std::sqrt(5.0) - 1.0) / 2.0; }

DeltaPoint map_unchecked(const InducedMap& m, DeltaPoint d) {
  if (m.model() != ModelTag::kGeneric) return m.eval_T(d);
  // Conjugate without the domain check so differences may step outside S.
  const AlphaPoint a{(1.0 + d.d2 + d.d1) / 2.0, (1.0 + d.d2 - d.d1) / 2.0};
  return to_delta(m.eval_H(a));
}

double signed_size(std::complex<double> z) { return z.imag() == 0.0 ? z.real() : std::abs(z); }

}  // namespace

double Matrix2::max_abs() const noexcept {
  return std::max({std::abs(j11), std::abs(j12), std::abs(j21), std::abs(j22)});
}

Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
  return {a.j11 - b.j11, a.j12 - b.j12, a.j21 - b.j21, a.j22 - b.j22};
}

std::array<std::complex<double>, 2> eigen_2x2(const Matrix2& m) {
  const double half_tr = m.trace() / 2.0;
  const double half_gap = (m.j11 - m.j22) / 2.0;
  // (tr/2)² − det written without cancellation between the two terms.
  const double disc = half_gap * half_gap + m.j12 * m.j21;
  std::array<std::complex<double>, 2> out;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double big = half_tr >= 0.0 ? half_tr + root : half_tr - root;
    const double small = big != 0.0 ? m.det() / big : 0.0;
    out = {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
  } else {
    const double im = std::sqrt(-disc);
    out = {std::complex<double>(half_tr, im), std::complex<double>(half_tr, -im)};
  }
  const double a0 = std::abs(out[0]);
  const double a1 = std::abs(out[1]);
  if (a1 > a0 || (a1 == a0 && out[1].real() > out[0].real())) std::swap(out[0], out[1]);
  return out;
}

std::pair<double, double> singular_values_2x2(const Matrix2& m) {
  const double e = (m.j11 + m.j22) / 2.0;
  const double f = (m.j11 - m.j22) / 2.0;
  const double g = (m.j21 + m.j12) / 2.0;
  const double h = (m.j21 - m.j12) / 2.0;
  const double q = std::hypot(e, h);
  const double r = std::hypot(f, g);
  return {q + r, std::abs(q - r)};
}

std::string to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::kConsensusSuperattracting:
      return "consensus_superattracting";
    case FixedPointClass::kSink:
      return "sink";
    case FixedPointClass::kSaddle:
      return "saddle";
    case FixedPointClass::kSource:
      return "source";
    case FixedPointClass::kMarginal:
      return "marginal";
  }
  return "?";
}

FixedPointClass classify(const Matrix2& m) {
  if (m.max_abs() <= 1e-12) return FixedPointClass::kConsensusSuperattracting;
  const auto ev = eigen_2x2(m);
  const double l1 = std::abs(ev[0]);
  const double l2 = std::abs(ev[1]);
  if (std::abs(l1 - 1.0) <= kMarginalTol || std::abs(l2 - 1.0) <= kMarginalTol) {
    return FixedPointClass::kMarginal;
  }
  if (singular_values_2x2(m).first < 1.0) return FixedPointClass::kSink;
  if (l1 > 1.0 && l2 > 1.0) return FixedPointClass::kSource;
  if (l1 > 1.0 && l2 < 1.0) return FixedPointClass::kSaddle;
  // Spectrally stable but not a contraction in one step.
  return FixedPointClass::kMarginal;
}

std::array<FixedPointLocation, 4> fixed_points_bo3(double u) {
  check_u(u);
  std::array<FixedPointLocation, 4> out{{{FixedPointId::kD1, true, {0.0, 0.0}},
                                         {FixedPointId::kD2, false, {}},
                                         {FixedPointId::kD3, false, {}},
                                         {FixedPointId::kD4, true, {0.0, 1.0}}}};
  if (u > 0.0 && 3.0 * u - 2.0 >= -kExistSlack) {
    out[1].exists = true;
    out[1].location = {sqrt_clamped((3.0 * u - 2.0) / (u * u * u)), 0.0};
  }
  if (u > 0.0 && 4.0 * u - 3.0 >= -kExistSlack) {
    out[2].exists = true;
    out[2].location = {std::sqrt(1.0 / (4.0 * u * u * u)), sqrt_clamped((4.0 * u - 3.0) / (4.0 * u))};
  }
  return out;
}

std::array<FixedPointLocation, 4> fixed_points_bo2(double u) {
  check_u(u);
  std::array<FixedPointLocation, 4> out{{{FixedPointId::kD1, true, {0.0, 0.0}},
                                         {FixedPointId::kD2, false, {}},
                                         {FixedPointId::kD3, false, {}},
                                         {FixedPointId::kD4, true, {0.0, 1.0}}}};
  if (u > 0.0 && 2.0 * u - 1.0 >= -kExistSlack) {
    out[1].exists = true;
    out[1].location = {sqrt_clamped((2.0 * u - 1.0) / (u * u)), 0.0};
  }
  const double s = (u + 1.0) * (u + 1.0);
  if (u > 0.0 && u * u + u - 1.0 >= -kExistSlack) {
    out[2].exists = true;
    out[2].location = {std::sqrt(1.0 / (u * s)), sqrt_clamped((u * u + u - 1.0) / s)};
  }
  return out;
}

std::array<FixedPointLocation, 4> fixed_points(ModelTag model, double u) {
  switch (model) {
    case ModelTag::kBo3:
      return fixed_points_bo3(u);
    case ModelTag::kBo2:
      return fixed_points_bo2(u);
    case ModelTag::kGeneric:
      break;
  }
  throw std::invalid_argument("closed-form fixed points exist only for bo3 and bo2");
}

Matrix2 jacobian_analytic(ModelTag model, double u, DeltaPoint d) {
  const double ud = u * d.d1;
  const double cross = d.d1 * d.d2;
  if (model == ModelTag::kBo3) {
    const double core = 1.0 - ud * ud - d.d2 * d.d2;
    return {1.5 * u * core, 1.5 * (-2.0 * u * cross), 1.5 * (-2.0 * u * u * cross), 1.5 * core};
  }
  if (model == ModelTag::kBo2) {
    const double a = 2.0 * u + 1.0;
    const double b = u * (u + 2.0);
    return {0.5 * (a - 3.0 * ud * ud - a * d.d2 * d.d2), 0.5 * (-2.0 * a * cross),
            0.5 * (-2.0 * b * cross), 0.5 * (3.0 - b * d.d1 * d.d1 - 3.0 * d.d2 * d.d2)};
  }
  throw std::invalid_argument("analytic Jacobian exists only for bo3 and bo2");
}

Matrix2 jacobian_numeric(const InducedMap& m, DeltaPoint d, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  const DeltaPoint p1 = map_unchecked(m, {d.d1 + h, d.d2});
  const DeltaPoint m1 = map_unchecked(m, {d.d1 - h, d.d2});
  const DeltaPoint p2 = map_unchecked(m, {d.d1, d.d2 + h});
  const DeltaPoint m2 = map_unchecked(m, {d.d1, d.d2 - h});
  const double w = 2.0 * h;
  return {(p1.d1 - m1.d1) / w, (p2.d1 - m2.d1) / w, (p1.d2 - m1.d2) / w, (p2.d2 - m2.d2) / w};
}

std::vector<FixedPointReport> analyze_fixed_points(ModelTag model, double u) {
  std::vector<FixedPointReport> out;
  for (const auto& fp : fixed_points(model, u)) {
    FixedPointReport rep;
    rep.id = fp.id;
    rep.exists = fp.exists;
    rep.location = fp.location;
    if (fp.exists) {
      rep.jacobian = jacobian_analytic(model, u, fp.location);
      rep.eigenvalues = eigen_2x2(rep.jacobian);
      rep.singular_values = singular_values_2x2(rep.jacobian);
      rep.cls = classify(rep.jacobian);
    }
    out.push_back(rep);
  }
  return out;
}

char eigen_sign(std::complex<double> lambda) {
  const double v = signed_size(lambda);
  if (std::abs(v - 1.0) <= kMarginalTol) return '1';
  return v > 1.0 ? '+' : '-';
}

std::vector<EigenTableColumn> eigen_table(ModelTag model, const std::vector<double>& u_values) {
  std::vector<EigenTableColumn> out;
  out.reserve(u_values.size());
  for (double u : u_values) {
    EigenTableColumn col;
    col.u = u;
    const auto reports = analyze_fixed_points(model, u);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& rep = reports[i];
      EigenTableCell& cell = col.cells[i];
      cell.id = rep.id;
      cell.defined = rep.exists;
      if (!rep.exists) {
        cell.pattern = "undefined";
        continue;
      }
      auto ev = rep.eigenvalues;
      if (signed_size(ev[1]) > signed_size(ev[0])) std::swap(ev[0], ev[1]);
      cell.pattern = {'(', eigen_sign(ev[0]), ',', eigen_sign(ev[1]), ')'};
    }
    out.push_back(std::move(col));
  }
  return out;
}

ThresholdReport threshold_r(ModelTag model) {
  double lo = 0.0;
  double u_analytic = 0.0;
  if (model == ModelTag::kBo3) {
    lo = 2.0 / 3.0;
    u_analytic = 0.75;
  } else if (model == ModelTag::kBo2) {
    lo = 0.5;
    u_analytic = golden_u();
  } else {
    throw std::invalid_argument("threshold is defined only for bo3 and bo2");
  }
  // Leading eigenvalue at d*2 exceeds 1 just above the birth of d*2 and is 0 at u = 1.
  auto excess = [model](double u) {
    const DeltaPoint d2 = fixed_points(model, u)[1].location;
    return std::abs(eigen_2x2(jacobian_analytic(model, u, d2))[0]) - 1.0;
  };
  double hi = 1.0;
  ThresholdReport rep;
  while (hi - lo > 1e-14 && rep.bisection_steps < 200) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++rep.bisection_steps;
  }
  rep.u_numeric = 0.5 * (lo + hi);
  rep.u_analytic = u_analytic;
  rep.r_numeric = r_of_u(rep.u_numeric);
  rep.r_analytic = model == ModelTag::kBo3 ? 1.0 / 7.0 : std::sqrt(5.0) - 2.0;
  return rep;
}

CompetitiveReport competitive_checks(ModelTag model, double u, double grid_step) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("u must lie in (0, 1)");
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw std::invalid_argument("grid_step must lie in (0, 1]");
  }
  const auto steps = static_cast<std::int64_t>(std::llround(1.0 / grid_step));
  CompetitiveReport rep;
  rep.min_det = INFINITY;
  for (std::int64_t i = 0; i <= steps; ++i) {
    for (std::int64_t j = 0; i + j <= steps; ++j) {
      if (i == 0 && j == steps) continue;
      const DeltaPoint d{static_cast<double>(i) / static_cast<double>(steps),
                         static_cast<double>(j) / static_cast<double>(steps)};
      const Matrix2 jac = jacobian_analytic(model, u, d);
      ++rep.points;
      if (jac.j11 < 0.0 || jac.j22 < 0.0 || jac.j12 > 0.0 || jac.j21 > 0.0) ++rep.sign_failures;
      const double det = jac.det();
      if (!(det > 0.0)) ++rep.det_failures;
      if (det < rep.min_det) {
        rep.min_det = det;
        rep.argmin_det = d;
      }
    }
  }
  return rep;
}

}  // namespace votedyn

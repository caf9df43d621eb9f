#include "votedyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "votedyn/fixed_points.hpp"
#include "votedyn/kernels.hpp"
#include "votedyn/rng.hpp"

namespace votedyn {

double u_of_r(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r must lie in [0, 1]");
  return (1.0 - r) / (1.0 + r);
}

double r_of_u(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("u must lie in [0, 1]");
  return (1.0 - u) / (1.0 + u);
}

InducedMap InducedMap::from_r(VotingRule rule, double r) {
  const double u = u_of_r(r);
  return InducedMap(std::move(rule), r, u);
}

InducedMap InducedMap::from_u(VotingRule rule, double u) {
  const double r = r_of_u(u);
  return InducedMap(std::move(rule), r, u);
}

AlphaPoint InducedMap::eval_H(AlphaPoint a) const {
  const double z1 = (a.a1 + r_ * a.a2) / (1.0 + r_);
  const double z2 = (a.a2 + r_ * a.a1) / (1.0 + r_);
  return {a.a1 * rule_.f1(z1) + (1.0 - a.a1) * rule_.f2(z1),
          a.a2 * rule_.f1(z2) + (1.0 - a.a2) * rule_.f2(z2)};
}

DeltaPoint InducedMap::eval_T_generic(DeltaPoint d) const { return to_delta(eval_H(from_delta(d))); }

DeltaPoint InducedMap::eval_T(DeltaPoint d) const {
  switch (rule_.model) {
    case ModelTag::kBo3:
      return eval_T_bo3(u_, d);
    case ModelTag::kBo2:
      return eval_T_bo2(u_, d);
    case ModelTag::kGeneric:
      break;
  }
  return eval_T_generic(d);
}

DeltaPoint eval_T_bo3(double u, DeltaPoint d) {
  return {kernels::bo3_t1(u, d.d1, d.d2), kernels::bo3_t2(u, d.d1, d.d2)};
}

DeltaPoint eval_T_bo2(double u, DeltaPoint d) {
  return {kernels::bo2_t1(u, d.d1, d.d2), kernels::bo2_t2(u, d.d1, d.d2)};
}

Orbit iterate(const InducedMap& m, MapSpace space, MapPoint x0, std::uint64_t t) {
  Orbit orbit;
  orbit.space = space;
  orbit.points.reserve(t + 1);
  orbit.points.push_back(x0);
  MapPoint x = x0;
  for (std::uint64_t i = 0; i < t; ++i) {
    if (space == MapSpace::kAlpha) {
      const AlphaPoint a = m.eval_H({x.x1, x.x2});
      x = {a.a1, a.a2};
    } else {
      const DeltaPoint d = m.eval_T({x.x1, x.x2});
      x = {d.d1, d.d2};
    }
    orbit.points.push_back(x);
  }
  return orbit;
}

namespace {

const char* model_name(ModelTag tag) {
  switch (tag) {
    case ModelTag::kBo3:
      return "bo3";
    case ModelTag::kBo2:
      return "bo2";
    case ModelTag::kGeneric:
      break;
  }
  return "generic";
}

}  // namespace

void write_orbit_csv(std::ostream& out, const InducedMap& m, const Orbit& orbit) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# space=%s model=%s u=%.17g\n",
                orbit.space == MapSpace::kAlpha ? "alpha" : "delta",
                m.model() == ModelTag::kGeneric ? m.rule().name.c_str() : model_name(m.model()),
                m.u());
  out << buf << "t,x1,x2\n";
  for (std::size_t t = 0; t < orbit.points.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t, orbit.points[t].x1, orbit.points[t].x2);
    out << buf;
  }
}

std::string to_string(FixedPointId id) {
  switch (id) {
    case FixedPointId::kD1:
      return "d1*";
    case FixedPointId::kD2:
      return "d2*";
    case FixedPointId::kD3:
      return "d3*";
    case FixedPointId::kD4:
      return "d4*";
  }
  return "?";
}

OrbitLimit orbit_limit(const InducedMap& m, DeltaPoint d0, double tol, std::uint64_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  OrbitLimit result;
  DeltaPoint d = d0;
  for (std::uint64_t i = 1; i <= max_iter; ++i) {
    const DeltaPoint next = m.eval_T(d);
    const double step = std::max(std::abs(next.d1 - d.d1), std::abs(next.d2 - d.d2));
    d = next;
    if (step < tol) {
      result.converged = true;
      result.iterations = i;
      break;
    }
  }
  result.limit = d;
  if (!result.converged) {
    result.iterations = max_iter;
    return result;
  }
  if (m.model() == ModelTag::kGeneric) return result;
  const DeltaPoint folded{std::abs(d.d1), std::abs(d.d2)};
  double best = 100.0 * tol;
  for (const auto& fp : fixed_points(m.model(), m.u())) {
    if (!fp.exists) continue;
    const double dist = std::max(std::abs(fp.location.d1 - folded.d1),
                                 std::abs(fp.location.d2 - folded.d2));
    if (dist <= best) {
      best = dist;
      result.fixed_point = fp.id;
    }
  }
  return result;
}

double S_violation(DeltaPoint d) {
  return std::max({0.0, -d.d1, -d.d2, d.d1 + d.d2 - 1.0});
}

ClosureReport check_S_closed(const InducedMap& m, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  constexpr double kSlack = 1e-12;
  constexpr std::size_t kChunk = 4096;
  ClosureReport report;
  SplitMix64 rng(seed);
  std::vector<double> d1;
  std::vector<double> d2;
  std::vector<double> o1(kChunk);
  std::vector<double> o2(kChunk);
  d1.reserve(kChunk);
  d2.reserve(kChunk);
  const auto& k = kernels::active_kernels();
  // Corners first, then uniform points of the triangle by reflection.
  const DeltaPoint corners[] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  std::uint64_t remaining = samples;
  std::size_t corner = 0;
  while (remaining > 0) {
    d1.clear();
    d2.clear();
    while (d1.size() < kChunk && remaining > 0) {
      DeltaPoint p;
      if (corner < std::size(corners)) {
        p = corners[corner++];
      } else {
        p = {rng.uniform(), rng.uniform()};
        if (p.d1 + p.d2 > 1.0) p = {1.0 - p.d1, 1.0 - p.d2};
      }
      d1.push_back(p.d1);
      d2.push_back(p.d2);
      --remaining;
    }
    const std::size_t count = d1.size();
    std::span<double> out1(o1.data(), count);
    std::span<double> out2(o2.data(), count);
    if (m.model() == ModelTag::kBo3) {
      k.map_bo3(m.u(), d1, d2, out1, out2);
    } else if (m.model() == ModelTag::kBo2) {
      k.map_bo2(m.u(), d1, d2, out1, out2);
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        const DeltaPoint img = m.eval_T_generic({d1[i], d2[i]});
        out1[i] = img.d1;
        out2[i] = img.d2;
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      const double v = S_violation({out1[i], out2[i]});
      report.max_violation = std::max(report.max_violation, v);
      if (v > kSlack) ++report.violations;
    }
    report.samples += count;
  }
  return report;
}

}  // namespace votedyn

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "votedyn/dynamics.hpp"
#include "votedyn/fixed_points.hpp"
#include "votedyn/rng.hpp"

namespace votedyn {
namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

Matrix2 diag(double a, double b) { return {a, 0.0, 0.0, b}; }

DeltaPoint apply(ModelTag model, double u, DeltaPoint d) {
  return model == ModelTag::kBo3 ? eval_T_bo3(u, d) : eval_T_bo2(u, d);
}

TEST(FixedPoints, LocationsAtUPointEight) {
  const auto b3 = fixed_points_bo3(0.8);
  EXPECT_TRUE(b3[1].exists && b3[2].exists);
  EXPECT_NEAR(b3[1].location.d1, 0.8838834765, 1e-10);
  EXPECT_EQ(b3[1].location.d2, 0.0);
  EXPECT_NEAR(b3[2].location.d1, 0.6987712430, 1e-10);
  EXPECT_NEAR(b3[2].location.d2, 0.25, 1e-15);
  const auto b2 = fixed_points_bo2(0.8);
  EXPECT_NEAR(b2[1].location.d1, 0.9682458366, 1e-10);
  EXPECT_NEAR(b2[2].location.d1, 0.6211299937, 1e-10);
  EXPECT_NEAR(b2[2].location.d2, 0.3685138656, 1e-10);
  EXPECT_EQ(b2[3].location, (DeltaPoint{0.0, 1.0}));
}

TEST(FixedPoints, ExistenceThresholds) {
  EXPECT_FALSE(fixed_points_bo3(0.6)[1].exists);
  EXPECT_TRUE(fixed_points_bo3(2.0 / 3.0)[1].exists);
  EXPECT_EQ(fixed_points_bo3(2.0 / 3.0)[1].location.d1, 0.0);
  EXPECT_FALSE(fixed_points_bo3(0.74)[2].exists);
  EXPECT_TRUE(fixed_points_bo3(0.75)[2].exists);
  EXPECT_FALSE(fixed_points_bo2(0.49)[1].exists);
  EXPECT_TRUE(fixed_points_bo2(0.5)[1].exists);
  EXPECT_FALSE(fixed_points_bo2(0.6)[2].exists);
  EXPECT_TRUE(fixed_points_bo2(kGolden)[2].exists);
  EXPECT_NEAR(fixed_points_bo2(kGolden)[2].location.d2, 0.0, 1e-7);
  EXPECT_FALSE(fixed_points_bo3(0.0)[1].exists);
  EXPECT_THROW(fixed_points_bo3(1.2), std::invalid_argument);
  EXPECT_THROW(fixed_points(ModelTag::kGeneric, 0.5), std::invalid_argument);
}

// Every existing fixed point is fixed, on a fine grid of u.
TEST(FixedPoints, ResidualOnUGrid) {
  for (ModelTag model : {ModelTag::kBo3, ModelTag::kBo2}) {
    for (int i = 0; i <= 100; ++i) {
      const double u = i / 100.0;
      for (const auto& fp : fixed_points(model, u)) {
        if (!fp.exists) continue;
        const DeltaPoint img = apply(model, u, fp.location);
        EXPECT_LE(std::abs(img.d1 - fp.location.d1), 1e-12) << to_string(fp.id) << " u=" << u;
        EXPECT_LE(std::abs(img.d2 - fp.location.d2), 1e-12) << to_string(fp.id) << " u=" << u;
      }
    }
  }
}

TEST(FixedPoints, D3LiesInsideSimplex) {
  for (double u = 0.75; u <= 1.0; u += 0.01) {
    const DeltaPoint d = fixed_points_bo3(u)[2].location;
    EXPECT_EQ(S_violation(d), 0.0) << u;
  }
  for (double u = kGolden; u <= 1.0; u += 0.01) {
    const DeltaPoint d = fixed_points_bo2(u)[2].location;
    EXPECT_LE(S_violation(d), 1e-15) << u;
  }
}

// The ordering of the Best-of-two interior point matters: with the
// coordinates exchanged it stops being fixed.
TEST(FixedPoints, BestOfTwoInteriorOrdering) {
  const DeltaPoint d = fixed_points_bo2(0.8)[2].location;
  const DeltaPoint swapped{d.d2, d.d1};
  const DeltaPoint img = eval_T_bo2(0.8, swapped);
  EXPECT_GT(std::max(std::abs(img.d1 - swapped.d1), std::abs(img.d2 - swapped.d2)), 1e-2);
}

TEST(Jacobian, SpecialFormsBestOfThree) {
  for (double u : {0.7, 0.75, 0.8, 0.9, 1.0}) {
    const auto fp = fixed_points_bo3(u);
    EXPECT_LE((jacobian_analytic(ModelTag::kBo3, u, fp[0].location) - diag(1.5 * u, 1.5)).max_abs(), 1e-15);
    EXPECT_LE((jacobian_analytic(ModelTag::kBo3, u, fp[1].location) - diag(3 * (1 - u), 3 * (1 / u - 1))).max_abs(),
              1e-12);
    EXPECT_LE(jacobian_analytic(ModelTag::kBo3, u, fp[3].location).max_abs(), 1e-15);
    if (!fp[2].exists) continue;
    // Interior point: the factor in front is 3/4.
    const double s = std::sqrt(4 * u - 3);
    const Matrix2 j3{0.75, -0.75 * s / u, -0.75 * s, 0.75 / u};
    EXPECT_LE((jacobian_analytic(ModelTag::kBo3, u, fp[2].location) - j3).max_abs(), 1e-12) << u;
  }
  EXPECT_LE((jacobian_analytic(ModelTag::kBo3, 0.8, {0, 0}) - diag(1.2, 1.5)).max_abs(), 1e-15);
  EXPECT_LE((jacobian_analytic(ModelTag::kBo3, 0.8, fixed_points_bo3(0.8)[1].location) - diag(0.6, 0.75)).max_abs(),
            1e-12);
}

TEST(Jacobian, SpecialFormsBestOfTwo) {
  for (double u : {0.5, 0.62, 0.8, 1.0}) {
    const auto fp = fixed_points_bo2(u);
    EXPECT_LE((jacobian_analytic(ModelTag::kBo2, u, fp[0].location) - diag(u + 0.5, 1.5)).max_abs(), 1e-15);
    EXPECT_LE((jacobian_analytic(ModelTag::kBo2, u, fp[1].location) - diag(2 - 2 * u, (1 - u * u) / u)).max_abs(),
              1e-12);
    EXPECT_LE(jacobian_analytic(ModelTag::kBo2, u, fp[3].location).max_abs(), 1e-15);
  }
  EXPECT_LE((jacobian_analytic(ModelTag::kBo2, 0.8, fixed_points_bo2(0.8)[1].location) - diag(0.4, 0.45)).max_abs(),
            1e-12);
}

// Closed-form interior Jacobian in the expanded polynomial form; it agrees
// with the general expression only at u = 1.
Matrix2 expanded_bo2_interior(double u) {
  const double pre = -1.0 / ((1 + u) * (1 + u));
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  return {pre * (1 + u - 4 * u2 - 8 * u3 + u4 + 3 * u5) / (2 * u),
          pre * (2 * u + 1) * std::sqrt(u2 + u - 1) / std::sqrt(u),
          pre * u * (u + 2) * std::sqrt(u3 + u2 - u),
          pre * (3 - 3 * u - 8 * u2 - 2 * u3 + 3 * u4 + u5) / (2 * u)};
}

TEST(Jacobian, BestOfTwoInteriorExpandedForm) {
  const auto at = [](double u) { return jacobian_analytic(ModelTag::kBo2, u, fixed_points_bo2(u)[2].location); };
  EXPECT_LE((at(1.0) - expanded_bo2_interior(1.0)).max_abs(), 1e-12);
  EXPECT_GT((at(0.8) - expanded_bo2_interior(0.8)).max_abs(), 1e-3);
  // The general form agrees with finite differences at the same point.
  const InducedMap m = InducedMap::from_u(make_rule_bo2(), 0.8);
  EXPECT_LE((at(0.8) - jacobian_numeric(m, fixed_points_bo2(0.8)[2].location)).max_abs(), 1e-6);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  SplitMix64 rng(2024);
  for (const VotingRule& rule : {make_rule_bo3(), make_rule_bo2()}) {
    for (int i = 0; i < 200; ++i) {
      const double u = rng.uniform();
      double a = rng.uniform(), b = rng.uniform();
      if (a + b > 1) a = 1 - a, b = 1 - b;
      const InducedMap m = InducedMap::from_u(rule, u);
      const Matrix2 diff = jacobian_analytic(rule.model, u, {a, b}) - jacobian_numeric(m, {a, b});
      EXPECT_LE(diff.max_abs(), 1e-6) << rule.name << " u=" << u;
    }
  }
  // A generic rule goes through the conjugated map; best-of-3 built generically
  // must agree with the closed form.
  const VotingRule g = make_rule("maj3", make_rule_bo3().f1, make_rule_bo3().f2);
  const InducedMap gm = InducedMap::from_u(g, 0.7);
  EXPECT_LE((jacobian_numeric(gm, {0.2, 0.3}) - jacobian_analytic(ModelTag::kBo3, 0.7, {0.2, 0.3})).max_abs(), 1e-6);
  EXPECT_THROW(jacobian_analytic(ModelTag::kGeneric, 0.5, {}), std::invalid_argument);
  EXPECT_THROW(jacobian_numeric(gm, {}, 0.0), std::invalid_argument);
}

TEST(Spectral, EigenExamples) {
  const auto ev = eigen_2x2(jacobian_analytic(ModelTag::kBo3, 0.8, fixed_points_bo3(0.8)[2].location));
  EXPECT_NEAR(ev[0].real(), 1.2302912, 1e-7);
  EXPECT_NEAR(ev[1].real(), 0.4572088, 1e-7);
  EXPECT_EQ(ev[0].imag(), 0.0);
  const auto rot = eigen_2x2({0.0, -2.0, 2.0, 0.0});
  EXPECT_NEAR(std::abs(rot[0]), 2.0, 1e-15);
  EXPECT_NEAR(std::abs(rot[1].imag()), 2.0, 1e-15);
  const auto neg = eigen_2x2(diag(-3.0, 0.5));
  EXPECT_EQ(neg[0].real(), -3.0);
  EXPECT_EQ(neg[1].real(), 0.5);
}

TEST(Spectral, SingularValueExample) {
  const auto sv = singular_values_2x2({3, 0, 4, 5});
  EXPECT_NEAR(sv.first, 6.7082039, 1e-7);
  EXPECT_NEAR(sv.second, 2.2360679, 1e-7);
}

// trace = λ1 + λ2, det = λ1 λ2, σ1 σ2 = |det|, σ1² + σ2² = ‖J‖_F².
TEST(Spectral, IdentitiesOnRandomMatrices) {
  SplitMix64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Matrix2 m{4 * rng.uniform() - 2, 4 * rng.uniform() - 2, 4 * rng.uniform() - 2, 4 * rng.uniform() - 2};
    const auto ev = eigen_2x2(m);
    const auto sum = ev[0] + ev[1];
    const auto prod = ev[0] * ev[1];
    EXPECT_NEAR(sum.real(), m.trace(), 1e-12);
    EXPECT_NEAR(sum.imag(), 0.0, 1e-12);
    EXPECT_NEAR(prod.real(), m.det(), 1e-12);
    EXPECT_GE(std::abs(ev[0]), std::abs(ev[1]));
    const auto sv = singular_values_2x2(m);
    EXPECT_NEAR(sv.first * sv.second, std::abs(m.det()), 1e-12);
    const double fro = m.j11 * m.j11 + m.j12 * m.j12 + m.j21 * m.j21 + m.j22 * m.j22;
    EXPECT_NEAR(sv.first * sv.first + sv.second * sv.second, fro, 1e-11);
    EXPECT_GE(sv.first + 1e-15, std::abs(ev[0]));
    EXPECT_LE(sv.second, std::abs(ev[1]) + 1e-12);
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(diag(0.9, 1.2857142)), FixedPointClass::kSaddle);
  EXPECT_EQ(classify(diag(1.2, 1.5)), FixedPointClass::kSource);
  EXPECT_EQ(classify(diag(0.6, 0.75)), FixedPointClass::kSink);
  EXPECT_EQ(classify(Matrix2{}), FixedPointClass::kConsensusSuperattracting);
  EXPECT_EQ(classify(diag(1.0, 0.5)), FixedPointClass::kMarginal);
  EXPECT_EQ(classify(diag(1.0 + 1e-10, 0.5)), FixedPointClass::kMarginal);
  // Spectral radius below 1 but stretching in one step.
  EXPECT_EQ(classify({0.5, 10.0, 0.0, 0.5}), FixedPointClass::kMarginal);
  EXPECT_EQ(to_string(FixedPointClass::kSink), "sink");
}

TEST(Classify, AnalyzeAtUPointEight) {
  const auto reps = analyze_fixed_points(ModelTag::kBo3, 0.8);
  ASSERT_EQ(reps.size(), 4U);
  EXPECT_EQ(reps[0].cls, FixedPointClass::kSource);
  EXPECT_EQ(reps[1].cls, FixedPointClass::kSink);
  EXPECT_EQ(reps[2].cls, FixedPointClass::kSaddle);
  EXPECT_EQ(reps[3].cls, FixedPointClass::kConsensusSuperattracting);
  const auto low = analyze_fixed_points(ModelTag::kBo3, 0.25);
  EXPECT_FALSE(low[1].exists);
  EXPECT_FALSE(low[2].exists);
}

std::vector<std::string> row(const std::vector<EigenTableColumn>& cols, std::size_t fp) {
  std::vector<std::string> out;
  for (const auto& c : cols) out.push_back(c.cells[fp].pattern);
  return out;
}

using Row = std::vector<std::string>;

TEST(EigenTable, BestOfThree) {
  const auto cols = eigen_table(ModelTag::kBo3, {0.5, 2.0 / 3.0, 0.7, 0.75, 0.9});
  EXPECT_EQ(row(cols, 0), (Row{"(+,-)", "(+,1)", "(+,+)", "(+,+)", "(+,+)"}));
  EXPECT_EQ(row(cols, 1), (Row{"undefined", "(+,1)", "(+,-)", "(1,-)", "(-,-)"}));
  EXPECT_EQ(row(cols, 2), (Row{"undefined", "undefined", "undefined", "(1,-)", "(+,-)"}));
  EXPECT_EQ(row(cols, 3), (Row{"(-,-)", "(-,-)", "(-,-)", "(-,-)", "(-,-)"}));
  EXPECT_FALSE(cols[0].cells[1].defined);
}

TEST(EigenTable, BestOfTwo) {
  const auto cols = eigen_table(ModelTag::kBo2, {0.4, 0.5, 0.55, kGolden, 0.8});
  EXPECT_EQ(row(cols, 0), (Row{"(+,-)", "(+,1)", "(+,+)", "(+,+)", "(+,+)"}));
  EXPECT_EQ(row(cols, 1), (Row{"undefined", "(+,1)", "(+,-)", "(1,-)", "(-,-)"}));
  EXPECT_EQ(row(cols, 2), (Row{"undefined", "undefined", "undefined", "(1,-)", "(+,-)"}));
  EXPECT_EQ(row(cols, 3), (Row{"(-,-)", "(-,-)", "(-,-)", "(-,-)", "(-,-)"}));
}

TEST(EigenTable, SignHelper) {
  EXPECT_EQ(eigen_sign(1.0), '1');
  EXPECT_EQ(eigen_sign(1.0 + 5e-10), '1');
  EXPECT_EQ(eigen_sign(1.01), '+');
  EXPECT_EQ(eigen_sign(-2.0), '-');
  EXPECT_EQ(eigen_sign(std::complex<double>(0.0, 2.0)), '+');
}

TEST(Threshold, BothModels) {
  const ThresholdReport b3 = threshold_r(ModelTag::kBo3);
  EXPECT_NEAR(b3.r_numeric, 1.0 / 7.0, 1e-9);
  EXPECT_NEAR(b3.u_numeric, 0.75, 1e-9);
  EXPECT_EQ(b3.r_analytic, 1.0 / 7.0);
  const ThresholdReport b2 = threshold_r(ModelTag::kBo2);
  EXPECT_NEAR(b2.r_numeric, std::sqrt(5.0) - 2.0, 1e-9);
  EXPECT_NEAR(b2.u_numeric, kGolden, 1e-9);
  EXPECT_GT(b2.bisection_steps, 10);
  EXPECT_THROW(threshold_r(ModelTag::kGeneric), std::invalid_argument);
}

// The on-axis point changes from saddle to sink as r crosses the threshold.
TEST(Threshold, ClassificationFlips) {
  for (ModelTag model : {ModelTag::kBo3, ModelTag::kBo2}) {
    const double r = threshold_r(model).r_analytic;
    for (double delta : {1e-3, 1e-2}) {
      const double below = u_of_r(r - delta);  // weaker coupling, larger u
      const double above = u_of_r(r + delta);
      EXPECT_EQ(analyze_fixed_points(model, below)[1].cls, FixedPointClass::kSink);
      EXPECT_EQ(analyze_fixed_points(model, above)[1].cls, FixedPointClass::kSaddle);
    }
  }
}

TEST(Competitive, ExampleEntries) {
  const Matrix2 j = jacobian_analytic(ModelTag::kBo3, 0.8, {0.2, 0.1});
  EXPECT_NEAR(j.j12, -0.048, 1e-15);
  EXPECT_NEAR(j.j21, -0.0384, 1e-15);
  EXPECT_GT(j.det(), 0.0);
}

// Best-of-three determinant factors as (9u/4)(1 - (u d1 - d2)^2)(1 - (u d1 + d2)^2).
TEST(Competitive, BestOfThreeDeterminantFactorization) {
  SplitMix64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    double a = rng.uniform(), b = rng.uniform();
    if (a + b > 1) a = 1 - a, b = 1 - b;
    const double minus = u * a - b;
    const double plus = u * a + b;
    const double expected = 2.25 * u * (1 - minus * minus) * (1 - plus * plus);
    EXPECT_NEAR(jacobian_analytic(ModelTag::kBo3, u, {a, b}).det(), expected, 1e-12);
  }
}

TEST(Competitive, GridScan) {
  for (ModelTag model : {ModelTag::kBo3, ModelTag::kBo2}) {
    for (int k = 10; k <= 90; k += 20) {
      const CompetitiveReport rep = competitive_checks(model, k / 100.0, 0.01);
      EXPECT_EQ(rep.points, 5150U);
      EXPECT_EQ(rep.sign_failures, 0U);
      EXPECT_EQ(rep.det_failures, 0U);
      EXPECT_GT(rep.min_det, 0.0);
      EXPECT_LE(S_violation(rep.argmin_det), 0.0);
    }
  }
  EXPECT_THROW(competitive_checks(ModelTag::kBo3, 1.0, 0.01), std::invalid_argument);
  EXPECT_THROW(competitive_checks(ModelTag::kBo3, 0.5, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace votedyn

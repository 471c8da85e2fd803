#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "hmd/errors.hpp"
#include "hmd/solver.hpp"
#include "support.hpp"

using namespace hmd;

namespace {

JointModel unit_square(std::size_t n) {
  return build_product_model(Grid1D::uniform(0.0, 1.0, n), Grid1D::uniform(0.0, 1.0, n));
}

JointModel shifted_square(std::size_t n) {
  return build_product_model(Grid1D::uniform(0.1, 1.0, n), Grid1D::uniform(0.1, 1.0, n));
}

}  // namespace

TEST(ThresholdFromAnchors, ConvexExample) {
  const auto p = DemandCurve::power(2.0);
  const ThresholdRule t = threshold_from_anchors(0.6, 0.4, p);
  EXPECT_DOUBLE_EQ(t.x_bar, 0.6);
  // 0.4 * 1.2 * 0.3 / (0.36 - 0.09)
  EXPECT_NEAR(t.y_bar(0.3), 0.144 / 0.27, 1e-14);
  EXPECT_NEAR(t.y_bar(0.6), 0.4, 1e-14);
  EXPECT_NEAR(t.y_bar(0.6 + 1e-9), 0.4, 1e-6);
}

TEST(ThresholdFromAnchors, AffineIsFlat) {
  const ThresholdRule t = threshold_from_anchors(0.3, 0.7, DemandCurve::affine(0.2, 0.5));
  for (double x : {0.0, 0.1, 0.3, 0.9}) EXPECT_DOUBLE_EQ(t.y_bar(x), 0.7);
}

TEST(ThresholdFromAnchors, FlatDemandSegmentThrows) {
  const auto p = DemandCurve::numeric(
      "kinked", [](double x) { return x < 0.5 ? 0.25 : 0.5 * x; }, {0.0, 1.0});
  const ThresholdRule t = threshold_from_anchors(0.2, 0.5, p);
  EXPECT_THROW(t.y_bar(0.1), InputError);
}

TEST(ThresholdEvaluator, AgreesWithRasterize) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto menu = fixtures::demand_menu();
  for (int k = 0; k < 40; ++k) {
    const JointModel m = fixtures::random_model(rng, 15, 12, k % 3 != 0);
    const auto& p = menu[static_cast<std::size_t>(k) % menu.size()];
    const ThresholdEvaluator ev(m, p);
    const Anchors a{m.x_support().lo + u(rng) * m.x_support().width(),
                    m.y_support().lo + u(rng) * m.y_support().width()};
    const ThresholdRule t = threshold_from_anchors(a.x_nd, a.y_nd, p);
    const TabularRule d = rasterize(t, m);
    const auto ref = fixtures::naive_payoff(m, d.disclose_prob(), [&](double x) { return p(x); });
    const auto e = ev.evaluate(a);
    EXPECT_NEAR(e.payoff, ref.payoff, 1e-12);
    EXPECT_NEAR(e.nd.nd_mass, ref.nd_mass, 1e-12);
    if (ref.nd_mass > 0.0) {
      EXPECT_NEAR(e.nd.x_nd, ref.x_nd, 1e-12);
    }
  }
}

TEST(Solve, UniformSquareLinearDemand) {
  const JointModel m = unit_square(200);
  const auto start = std::chrono::steady_clock::now();
  const SolveResult s = solve_commitment(m, DemandCurve::affine(0.0, 1.0));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 5.0);
  EXPECT_NEAR(s.rule.x_bar, 0.5, 1e-3);
  EXPECT_NEAR(s.rule.threshold_at(0.25, m.y_support()), 0.5, 1e-3);
  EXPECT_NEAR(s.payoff, 0.28125, 1e-3);
  EXPECT_NEAR(s.nd.nd_mass, 0.5, 1e-3);
  ASSERT_FALSE(s.candidates.empty());
  EXPECT_DOUBLE_EQ(s.candidates.front().payoff, s.payoff);
  for (const auto& c : s.near_optimal) EXPECT_GE(c.payoff, s.payoff - 1e-8);
}

TEST(Solve, PayoffMatchesNaiveEvaluation) {
  const JointModel m = shifted_square(80);
  for (const auto& p : {DemandCurve::power(2.0), DemandCurve::power(0.5)}) {
    const SolveResult s = solve_commitment(m, p);
    const TabularRule d = rasterize(s.rule, m);
    const auto ref = fixtures::naive_payoff(m, d.disclose_prob(), [&](double x) { return p(x); });
    EXPECT_NEAR(s.payoff, ref.payoff, 1e-12);
    EXPECT_NEAR(s.nd.x_nd, ref.x_nd, 1e-12);
    const auto foc = foc_residual(m, d, p);
    EXPECT_EQ(foc.interior_violations, 0u);
  }
}

TEST(Solve, AtLeastAsGoodAsAnchorOracle) {
  std::mt19937_64 rng(22);
  const auto menu = fixtures::demand_menu();
  for (int k = 0; k < 5; ++k) {
    const JointModel m = fixtures::random_model(rng, 40, 40);
    const auto& p = menu[static_cast<std::size_t>(k)];
    const SolveResult s = solve_commitment(m, p);
    const OracleResult o = brute_force_oracle(m, p, 15, OracleFamily::kThresholdAnchors);
    EXPECT_LE((o.payoff - s.payoff) / std::abs(s.payoff), 1e-3) << p.name();
  }
}

TEST(Solve, RejectsNonPositiveMeanProfitability) {
  const JointModel m = build_product_model(Grid1D::uniform(0, 1, 20), Grid1D::uniform(-1, 0.5, 20));
  EXPECT_THROW(solve_commitment(m, DemandCurve::affine(0, 1)), InputError);
  SolverSettings cfg;
  cfg.require_positive_mean = false;
  EXPECT_NO_THROW(solve_commitment(m, DemandCurve::affine(0, 1), cfg));
}

TEST(Solve, DeterministicAcrossThreadCounts) {
  const JointModel m = shifted_square(50);
  const auto p = DemandCurve::power(2.0);
  SolverSettings one, four;
  four.threads = 4;
  const SolveResult a = solve_commitment(m, p, one);
  const SolveResult b = solve_commitment(m, p, four);
  EXPECT_EQ(a.payoff, b.payoff);
  EXPECT_EQ(a.rule.x_bar, b.rule.x_bar);
}

TEST(Foc, SteeringRuleHasNoViolations) {
  const JointModel m({0.2, 0.8}, {1.0, 2.0}, Eigen::MatrixXd::Constant(2, 2, 0.25));
  Eigen::MatrixXd d(2, 2);
  d << 1.0, 0.0,
       0.0, 1.0;
  const auto p = DemandCurve::affine(0.0, 1.0);
  const FocReport good = foc_residual(m, TabularRule(d), p);
  EXPECT_EQ(good.violations, 0u);
  EXPECT_EQ(good.sign(0, 0), 1);
  EXPECT_EQ(good.sign(0, 1), -1);
  // Full concealment has the same anchors, so the two disclose-signed cells violate.
  const FocReport bad = foc_residual(m, TabularRule::full_concealment(m), p);
  EXPECT_EQ(bad.violations, 2u);
}

TEST(Foc, InteriorViolationDetected) {
  const JointModel m = unit_square(9);
  const auto p = DemandCurve::affine(0.0, 1.0);
  Eigen::MatrixXd d = rasterize(ThresholdRule{0.5, [](double) { return 0.5; }}, m).disclose_prob();
  // Flip a cell deep inside the disclosure region.
  d(8, 8) = 0.0;
  d(7, 8) = 0.0;
  d(8, 7) = 0.0;
  d(7, 7) = 0.0;
  const FocReport rep = foc_residual(m, TabularRule(d), p);
  EXPECT_GE(rep.violations, 4u);
  EXPECT_GE(rep.interior_violations, 1u);
}

TEST(Oracle, TabularMatchesIndependentEnumeration) {
  std::mt19937_64 rng(23);
  const auto menu = fixtures::demand_menu();
  for (int k = 0; k < 5; ++k) {
    const JointModel m = fixtures::random_discrete_model(rng, 2, 2);
    const auto& p = menu[static_cast<std::size_t>(k)];
    double best = -1e300;
    for (int mask = 0; mask < 16; ++mask) {
      Eigen::MatrixXd d(2, 2);
      for (int c = 0; c < 4; ++c) d(c / 2, c % 2) = (mask >> c) & 1;
      best = std::max(best, fixtures::naive_payoff(m, d, [&](double x) { return p(x); }).payoff);
    }
    const OracleResult o = brute_force_oracle(m, p, 2, OracleFamily::kExhaustiveTabular);
    EXPECT_NEAR(o.payoff, best, 1e-14);
    EXPECT_EQ(o.evaluated, 16u);
  }
}

TEST(Oracle, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(24);
  const JointModel m = fixtures::random_discrete_model(rng, 3, 3);
  const auto p = DemandCurve::power(2.0);
  const OracleResult a = brute_force_oracle(m, p, 3, OracleFamily::kExhaustiveTabular, 1);
  const OracleResult b = brute_force_oracle(m, p, 3, OracleFamily::kExhaustiveTabular, 3);
  EXPECT_EQ(a.payoff, b.payoff);
  EXPECT_EQ(a.rule, b.rule);
  EXPECT_EQ(a.evaluated, 512u);
}

TEST(Oracle, AnchorGridReachesUniformOptimum) {
  const JointModel m = unit_square(100);
  const OracleResult o = brute_force_oracle(m, DemandCurve::affine(0.0, 1.0), 25,
                                            OracleFamily::kThresholdAnchors);
  ASSERT_TRUE(o.anchors.has_value());
  EXPECT_NEAR(o.anchors->x_nd, 0.5, 1e-12);
  EXPECT_NEAR(o.anchors->y_nd, 0.5, 1e-12);
  EXPECT_NEAR(o.payoff, 0.28125, 1e-3);
  EXPECT_EQ(o.evaluated, 625u);
}

TEST(Oracle, Budgets) {
  const JointModel m = unit_square(10);
  const auto p = DemandCurve::affine(0.0, 1.0);
  EXPECT_THROW(brute_force_oracle(m, p, 31, OracleFamily::kThresholdAnchors), BudgetError);
  EXPECT_THROW(brute_force_oracle(m, p, 5, OracleFamily::kExhaustiveTabular), BudgetError);
  EXPECT_THROW(brute_force_oracle(m, p, 0, OracleFamily::kThresholdAnchors), InputError);
}

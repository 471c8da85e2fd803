#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hmd/equilibrium.hpp"
#include "hmd/errors.hpp"
#include "support.hpp"

using namespace hmd;

namespace {

JointModel signed_square(std::size_t n) {
  return build_product_model(Grid1D::uniform(0.0, 1.0, n), Grid1D::uniform(-1.0, 1.0, n));
}

// E[x | (x - t) y < 0] - t by direct summation.
double naive_gap(const JointModel& m, double t) {
  double w = 0.0, s = 0.0;
  for (std::size_t j = 0; j < m.ny(); ++j) {
    for (std::size_t i = 0; i < m.nx(); ++i) {
      if ((m.x(i) - t) * m.y(j) < 0.0) {
        w += m.mass()(j, i);
        s += m.mass()(j, i) * m.x(i);
      }
    }
  }
  return s / w - t;
}

}  // namespace

TEST(NoCommitment, SignedUniformThresholdIsOneHalf) {
  const JointModel m = signed_square(200);
  const EquilibriumResult r = solve_no_commitment(m);
  EXPECT_EQ(r.regime, EquilibriumRegime::kPartialDisclosure);
  EXPECT_NEAR(r.x_hat, 0.5, 1e-6);
  EXPECT_LE(std::abs(r.residual), 1e-8);
  EXPECT_NEAR(r.nd_mass, 0.5, 1e-2);
  EXPECT_NEAR(naive_gap(m, r.x_hat), 0.0, 1e-8);
  EXPECT_STREQ(to_string(r.regime), "partial_disclosure");
}

TEST(NoCommitment, RootsMatchNaiveBisection) {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 10; ++k) {
    const JointModel m = fixtures::random_model(rng, 40, 30, false);
    const EquilibriumResult r = solve_no_commitment(m);
    ASSERT_EQ(r.regime, EquilibriumRegime::kPartialDisclosure);
    for (const auto& root : r.roots) {
      const auto g = consistency_gap(m, root.x_hat);
      ASSERT_TRUE(g.has_value());
      EXPECT_NEAR(*g, naive_gap(m, root.x_hat), 1e-12);
      EXPECT_LE(std::abs(*g), 1e-8);
      EXPECT_LE(r.roots.front().x_hat, root.x_hat);
      EXPECT_GE(r.nd_mass, root.nd_mass - 1e-12);
    }
  }
}

TEST(NoCommitment, OneSignedProfitabilityUnravels) {
  const Grid1D x = Grid1D::uniform(0.2, 0.9, 30);
  const JointModel pos = build_product_model(x, Grid1D::uniform(0.1, 1.0, 10));
  const EquilibriumResult rp = solve_no_commitment(pos);
  EXPECT_EQ(rp.regime, EquilibriumRegime::kUnravelFullDisclosure);
  EXPECT_DOUBLE_EQ(rp.x_hat, 0.2);
  EXPECT_EQ(equilibrium_rule(rp, pos), TabularRule::full_disclosure(pos));
  EXPECT_FALSE(consistency_gap(pos, 0.1).has_value());

  const JointModel neg = build_product_model(x, Grid1D::uniform(-1.0, -0.1, 10));
  const EquilibriumResult rn = solve_no_commitment(neg);
  EXPECT_EQ(rn.regime, EquilibriumRegime::kUnravelFullDisclosure);
  EXPECT_DOUBLE_EQ(rn.x_hat, 0.9);
  EXPECT_EQ(equilibrium_rule(rn, neg), TabularRule::full_disclosure(neg));
}

TEST(NoCommitment, EquilibriumRuleShape) {
  const JointModel m = signed_square(10);
  const EquilibriumResult r = solve_no_commitment(m);
  const TabularRule d = equilibrium_rule(r, m);
  for (std::size_t j = 0; j < m.ny(); ++j) {
    for (std::size_t i = 0; i < m.nx(); ++i) {
      EXPECT_EQ(d(j, i), (m.x(i) - r.x_hat) * m.y(j) >= 0.0 ? 1.0 : 0.0);
    }
  }
}

TEST(Transparent, UnravelsWithCertificate) {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 5; ++k) {
    const JointModel m = fixtures::random_model(rng, 20, 12, k % 2 == 0);
    const TransparentEquilibrium e = solve_no_commitment_transparent(m);
    EXPECT_EQ(e.rule, TabularRule::full_disclosure(m));
    EXPECT_TRUE(e.certificate.passed);
    EXPECT_FALSE(e.certificate.vacuous);
    EXPECT_GT(e.certificate.checked, 0u);
    const TransparentEquilibrium ep = solve_no_commitment_transparent(m, DemandCurve::power(2.0));
    EXPECT_TRUE(ep.certificate.passed);
  }
}

TEST(Transparent, SingleValueIsVacuous) {
  const JointModel m = build_product_model(Grid1D::point_mass(0.5), Grid1D::uniform(-1, 1, 4));
  const TransparentEquilibrium e = solve_no_commitment_transparent(m);
  EXPECT_TRUE(e.certificate.vacuous);
  EXPECT_TRUE(e.certificate.passed);
}

TEST(Coincidence, SignedUniformCoincides) {
  const JointModel m = signed_square(100);
  const CoincidenceVerdict v = commitment_coincidence(m, DemandCurve::affine(0.0, 1.0), 1e-6);
  EXPECT_FALSE(v.degenerate);
  EXPECT_TRUE(v.coincide);
  EXPECT_NEAR(v.commitment_x_bar, 0.5, 1e-6);
  EXPECT_NEAR(v.commitment_y_bar, 0.0, 1e-6);
  ASSERT_TRUE(v.shared_threshold.has_value());
  EXPECT_NEAR(*v.shared_threshold, 0.5, 1e-6);
}

TEST(Coincidence, ZeroProfitabilityIsDegenerate) {
  const JointModel m = build_product_model(Grid1D::uniform(0, 1, 10), Grid1D::point_mass(0.0));
  const CoincidenceVerdict v = commitment_coincidence(m, DemandCurve::affine(0.0, 1.0));
  EXPECT_TRUE(v.degenerate);
  EXPECT_TRUE(v.coincide);
}

TEST(Coincidence, PositiveMeanDoesNotCoincide) {
  const JointModel m = build_product_model(Grid1D::uniform(0, 1, 60), Grid1D::uniform(-0.5, 1.0, 60));
  const CoincidenceVerdict v = commitment_coincidence(m, DemandCurve::affine(0.0, 1.0));
  EXPECT_FALSE(v.coincide);
  EXPECT_GT(v.commitment_y_bar, 0.0);
  EXPECT_THROW(commitment_coincidence(m, DemandCurve::power(2.0)), UnsupportedAssumption);
}

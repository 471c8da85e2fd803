#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "hmd/demand.hpp"
#include "hmd/errors.hpp"
#include "hmd/grid.hpp"
#include "hmd/joint_model.hpp"
#include "hmd/signal_family.hpp"
#include "support.hpp"

using namespace hmd;

namespace {

// Composite Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST(Grid, UniformCellMidpoints) {
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.point(0), 0.125);
  EXPECT_DOUBLE_EQ(g.point(3), 0.875);
  for (double w : g.weights()) EXPECT_DOUBLE_EQ(w, 0.25);
  EXPECT_DOUBLE_EQ(g.mean(), 0.5);
  EXPECT_DOUBLE_EQ(g.support().lo, 0.0);
  EXPECT_DOUBLE_EQ(g.support().hi, 1.0);
}

TEST(Grid, UniformVarianceApproachesContinuous) {
  // Midpoint rule variance is 1/12 - h^2/12.
  const std::size_t n = 200;
  const Grid1D g = Grid1D::uniform(0.0, 1.0, n);
  const double h = 1.0 / n;
  EXPECT_NEAR(g.variance(), 1.0 / 12.0 - h * h / 12.0, 1e-14);
}

TEST(Grid, BetaCellMassesMatchQuadrature) {
  const double a = 2.5, b = 3.5;
  const Grid1D g = Grid1D::beta(a, b, 0.2, 0.8, 12);
  const double norm = std::tgamma(a + b) / (std::tgamma(a) * std::tgamma(b));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double lo = 0.2 + 0.05 * i, hi = lo + 0.05;
    const double mass = simpson(
        [&](double x) {
          const double u = std::clamp((x - 0.2) / 0.6, 0.0, 1.0);
          return norm * std::pow(u, a - 1) * std::pow(1 - u, b - 1) / 0.6;
        },
        lo, hi);
    EXPECT_NEAR(g.weight(i), mass, 1e-8) << "cell " << i;
  }
}

TEST(Grid, TriangularMeanAndMasses) {
  const Grid1D g = Grid1D::triangular(0.0, 0.3, 1.0, 400);
  EXPECT_NEAR(g.mean(), (0.0 + 0.3 + 1.0) / 3.0, 1e-5);
  EXPECT_NEAR(std::accumulate(g.weights().begin(), g.weights().end(), 0.0), 1.0, 1e-14);
}

TEST(Grid, PointMassIsDegenerate) {
  const Grid1D g = Grid1D::point_mass(0.5);
  EXPECT_TRUE(g.is_degenerate());
  EXPECT_DOUBLE_EQ(g.variance(), 0.0);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(Grid1D({0.2, 0.1}, {0.5, 0.5}), ModelError);
  EXPECT_THROW(Grid1D({0.1, 0.2}, {0.5, -0.5}), ModelError);
  EXPECT_THROW(Grid1D({0.1, 0.2}, {0.0, 0.0}), ModelError);
  EXPECT_THROW(Grid1D::uniform(1.0, 0.0, 3), ModelError);
  EXPECT_THROW(Grid1D::beta(-1.0, 1.0, 0.0, 1.0, 3), ModelError);
}

TEST(JointModel, ProductModelFactorizes) {
  const Grid1D x = Grid1D::uniform(0.0, 1.0, 5);
  const Grid1D y = Grid1D::triangular(-1.0, 0.0, 2.0, 7);
  const JointModel m = build_product_model(x, y);
  EXPECT_EQ(m.nx(), 5u);
  EXPECT_EQ(m.ny(), 7u);
  for (std::size_t j = 0; j < m.ny(); ++j) {
    for (std::size_t i = 0; i < m.nx(); ++i) {
      EXPECT_NEAR(m.mass()(j, i), x.weight(i) * y.weight(j), 1e-15);
    }
  }
  EXPECT_NEAR(m.cov_xy(), 0.0, 1e-15);
}

TEST(JointModel, FgmKeepsMarginals) {
  std::mt19937_64 rng(7);
  for (double rho : {-1.0, -0.3, 0.0, 0.8, 1.0}) {
    const Grid1D x = fixtures::random_grid(rng, 0.1, 0.9, 17);
    const Grid1D y = fixtures::random_grid(rng, 0.0, 2.0, 11);
    const JointModel m = build_fgm_model(x, y, rho);
    for (std::size_t i = 0; i < m.nx(); ++i) EXPECT_NEAR(m.mass().col(i).sum(), x.weight(i), 1e-14);
    for (std::size_t j = 0; j < m.ny(); ++j) EXPECT_NEAR(m.mass().row(j).sum(), y.weight(j), 1e-14);
    EXPECT_GE(m.mass().minCoeff(), 0.0);
    if (rho > 0.0) {
      EXPECT_GT(m.cov_xy(), 0.0);
    } else if (rho < 0.0) {
      EXPECT_LT(m.cov_xy(), 0.0);
    }
  }
  EXPECT_THROW(build_fgm_model(Grid1D::uniform(0, 1, 3), Grid1D::uniform(0, 1, 3), 1.5), ModelError);
}

TEST(JointModel, ConditionalsAndExpectation) {
  Eigen::MatrixXd mass(2, 3);
  mass << 0.1, 0.2, 0.1,
          0.0, 0.0, 0.6;
  const JointModel m({0.0, 0.5, 1.0}, {-1.0, 1.0}, mass);
  const Grid1D row0 = conditional_x_given_y(m, 0);
  EXPECT_NEAR(row0.weight(1), 0.5, 1e-15);
  EXPECT_NEAR(row0.mean(), 0.5, 1e-15);
  EXPECT_THROW(conditional_y_given_x(m, 5), InputError);
  const Grid1D col2 = conditional_y_given_x(m, 2);
  EXPECT_NEAR(col2.weight(1), 6.0 / 7.0, 1e-15);
  const auto means = conditional_mean_x(m);
  EXPECT_NEAR(means[1], 1.0, 1e-15);
  EXPECT_NEAR(m.expect([](double x, double y) { return x * y; }), -0.2 + 0.6 - 0.1 * 0.0, 1e-15);
  EXPECT_NEAR(m.mean_x(), 0.1 + 0.7, 1e-15);

  Eigen::MatrixXd empty_row(2, 2);
  empty_row << 0.5, 0.5, 0.0, 0.0;
  const JointModel z({0.0, 1.0}, {0.0, 1.0}, empty_row);
  EXPECT_THROW(conditional_x_given_y(z, 1), ConditioningError);
  EXPECT_NEAR(conditional_mean_x(z)[1], z.mean_x(), 1e-15);
}

TEST(JointModel, RejectsBadMass) {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.5, 0.5, 0.5;
  EXPECT_THROW(JointModel({0.0, 1.0}, {0.0, 1.0}, bad), ModelError);
  Eigen::MatrixXd neg(2, 2);
  neg << 0.5, 0.6, 0.0, -0.1;
  EXPECT_THROW(JointModel({0.0, 1.0}, {0.0, 1.0}, neg), ModelError);
  EXPECT_THROW(JointModel({0.0, 1.0, 2.0}, {0.0, 1.0}, Eigen::MatrixXd::Constant(2, 2, 0.25)), ModelError);
}

TEST(Demand, FactoriesAndCurvatureTags) {
  const auto lin = DemandCurve::affine(0.1, 0.8);
  EXPECT_TRUE(lin.is_affine());
  EXPECT_DOUBLE_EQ(lin(0.5), 0.5);
  EXPECT_DOUBLE_EQ(lin.derivative(0.3), 0.8);
  EXPECT_EQ(DemandCurve::power(2.0).curvature(), Curvature::kStrictlyConvex);
  EXPECT_EQ(DemandCurve::power(0.5).curvature(), Curvature::kStrictlyConcave);
  EXPECT_EQ(DemandCurve::power(1.0).curvature(), Curvature::kAffine);
  EXPECT_EQ(DemandCurve::logistic(0.5, 6.0).curvature(), Curvature::kOther);
  EXPECT_NEAR(DemandCurve::power(0.5).derivative(0.25), 1.0, 1e-12);
  const auto lg = DemandCurve::logistic(0.5, 6.0);
  const double h = 1e-6;
  EXPECT_NEAR(lg.derivative(0.3), (lg(0.3 + h) - lg(0.3 - h)) / (2 * h), 1e-8);
}

TEST(Demand, ClassifyOnGrid) {
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 50);
  EXPECT_EQ(classify_curvature(DemandCurve::power(3.0), g), Curvature::kStrictlyConvex);
  EXPECT_EQ(classify_curvature(DemandCurve::affine(0.0, 1.0), g), Curvature::kAffine);
  EXPECT_EQ(classify_curvature(DemandCurve::logistic(0.5, 8.0), g), Curvature::kOther);
  EXPECT_THROW(classify_curvature(DemandCurve::affine(0.0, 1.0), Grid1D::uniform(0, 1, 2)), InputError);
}

TEST(Demand, NumericMatchesAnalytic) {
  const auto p = DemandCurve::numeric("cube", [](double x) { return x * x * x; }, {0.0, 1.0});
  EXPECT_NEAR(p.derivative(0.5), 0.75, 1e-8);
  EXPECT_EQ(p.curvature(), Curvature::kStrictlyConvex);
}

TEST(Demand, Validation) {
  const Grid1D g = Grid1D::uniform(0.0, 1.0, 20);
  EXPECT_NO_THROW(DemandCurve::affine(0.0, 1.0).validate(g));
  EXPECT_THROW(DemandCurve::affine(0.5, 1.0).validate(g), InputError);
  const auto flat = DemandCurve::numeric("flat", [](double) { return 0.5; }, {0.0, 1.0});
  EXPECT_THROW(flat.validate(g), InputError);
  EXPECT_THROW(DemandCurve::affine(0.0, -1.0), InputError);
}

TEST(SignalFamily, UniformReplacementSupports) {
  const auto fam = uniform_replacement_family(40, Grid1D::uniform(0.0, 1.0, 10),
                                              CostFunction::power(1.0 / 32.0, 2.0));
  for (double th : {0.0, 0.3, 1.0}) {
    const Interval s = fam.support_at(th);
    EXPECT_NEAR(s.lo, (1.0 - th) / 2.0, 1e-15);
    EXPECT_NEAR(s.hi, (1.0 + th) / 2.0, 1e-15);
    const JointModel m = fam.model_at(th);
    EXPECT_NEAR(m.mean_x(), 0.5, 1e-14);
    for (double mu : conditional_mean_x(m)) EXPECT_NEAR(mu, 0.5, 1e-14);
  }
  EXPECT_EQ(fam.model_at(0.0).nx(), 1u);
  EXPECT_THROW(fam.model_at(1.2), DomainError);
  EXPECT_NEAR(fam.cost(0.5), 0.25 / 32.0, 1e-16);
}

TEST(SignalFamily, CostFunctions) {
  const auto tab = CostFunction::tabulated({0.0, 0.5, 1.0}, {0.0, 0.1, 0.4});
  EXPECT_NEAR(tab(0.25), 0.05, 1e-15);
  EXPECT_NEAR(tab(0.75), 0.25, 1e-15);
  EXPECT_THROW(CostFunction::tabulated({0.0, 1.0}, {0.2, 0.1}), InputError);
  EXPECT_THROW(CostFunction::power(1.0, 0.5), InputError);
}

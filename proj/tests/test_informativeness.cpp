#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "hmd/informativeness.hpp"

using namespace hmd;

namespace {

// E[(X - t)^+]; equal means plus pointwise dominance of this transform is the convex order.
double stop_loss(const PosteriorDistribution& g, double t) {
  double s = 0.0;
  for (const Atom& a : g.atoms()) s += a.mass * std::max(a.value - t, 0.0);
  return s / g.total_mass();
}

PosteriorDistribution random_distribution(std::mt19937_64& rng, int atoms) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Atom> v;
  for (int k = 0; k < atoms; ++k) v.push_back({u(rng), 0.05 + u(rng)});
  double total = 0.0;
  for (const Atom& a : v) total += a.mass;
  for (Atom& a : v) a.mass /= total;
  return PosteriorDistribution(v);
}

// Splits one atom into two around it, keeping the mean.
PosteriorDistribution spread_one(std::mt19937_64& rng, const PosteriorDistribution& h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Atom> v = h.atoms();
  const std::size_t k = static_cast<std::size_t>(u(rng) * static_cast<double>(v.size())) % v.size();
  const Atom a = v[k];
  const double left = 0.02 + 0.2 * u(rng);
  const double right = 0.02 + 0.2 * u(rng);
  // Masses so that the two new atoms average back to a.value.
  const double wl = a.mass * right / (left + right);
  v[k] = {a.value - left, wl};
  v.push_back({a.value + right, a.mass - wl});
  return PosteriorDistribution(v);
}

// Shift the mean so that h matches g.
PosteriorDistribution recentre(const PosteriorDistribution& h, double mean) {
  std::vector<Atom> v = h.atoms();
  const double shift = mean - h.mean();
  for (Atom& a : v) a.value += shift;
  return PosteriorDistribution(v);
}

}  // namespace

TEST(Mps, PointMassAgainstTwoPoint) {
  const PosteriorDistribution h({{0.5, 1.0}});
  const PosteriorDistribution g({{0.0, 0.5}, {1.0, 0.5}});
  const MpsVerdict v = mps_compare(g, h);
  EXPECT_EQ(v.relation, MpsRelation::kMpsOf);
  EXPECT_NEAR(v.max_gap, 0.25, 1e-15);
  EXPECT_EQ(mps_compare(h, g).relation, MpsRelation::kMpsBy);
  EXPECT_STREQ(to_string(v.relation), "mps_of");
}

TEST(Mps, Reflexive) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    const auto g = random_distribution(rng, 1 + k % 7);
    const MpsVerdict v = mps_compare(g, g);
    EXPECT_EQ(v.relation, MpsRelation::kEqual);
    EXPECT_EQ(v.max_violation, 0.0);
  }
}

TEST(Mps, SpreadingIsDetected) {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 100; ++k) {
    const auto h = random_distribution(rng, 2 + k % 5);
    const auto g = spread_one(rng, h);
    EXPECT_NEAR(g.mean(), h.mean(), 1e-14);
    EXPECT_EQ(mps_compare(g, h).relation, MpsRelation::kMpsOf);
    EXPECT_EQ(mps_compare(h, g).relation, MpsRelation::kMpsBy);
    EXPECT_GT(completion_score(g), completion_score(h));
    // Transitive along a chain of spreads.
    const auto gg = spread_one(rng, g);
    EXPECT_EQ(mps_compare(gg, h).relation, MpsRelation::kMpsOf);
  }
}

TEST(Mps, AgreesWithStopLossTransform) {
  std::mt19937_64 rng(33);
  int incomparable = 0;
  for (int k = 0; k < 200; ++k) {
    const auto g = random_distribution(rng, 3 + k % 4);
    const auto h = recentre(random_distribution(rng, 3 + k % 3), g.mean());
    std::vector<double> ts;
    for (const Atom& a : g.atoms()) ts.push_back(a.value);
    for (const Atom& a : h.atoms()) ts.push_back(a.value);
    bool g_dominates = true, h_dominates = true;
    for (double t : ts) {
      const double diff = stop_loss(g, t) - stop_loss(h, t);
      if (diff < -1e-9) g_dominates = false;
      if (diff > 1e-9) h_dominates = false;
    }
    const MpsRelation r = mps_compare(g, h).relation;
    if (g_dominates && h_dominates) {
      EXPECT_EQ(r, MpsRelation::kEqual);
    } else if (g_dominates) {
      EXPECT_EQ(r, MpsRelation::kMpsOf);
    } else if (h_dominates) {
      EXPECT_EQ(r, MpsRelation::kMpsBy);
    } else {
      EXPECT_EQ(r, MpsRelation::kIncomparable);
      ++incomparable;
    }
  }
  EXPECT_GT(incomparable, 0);
}

TEST(Mps, EqualVarianceDistinctLawsAreIncomparable) {
  const PosteriorDistribution g({{0.0, 0.25}, {2.0 / 3.0, 0.75}});
  const PosteriorDistribution h({{1.0 / 3.0, 0.75}, {1.0, 0.25}});
  EXPECT_NEAR(g.variance(), h.variance(), 1e-15);
  const MpsVerdict v = mps_compare(g, h);
  EXPECT_EQ(v.relation, MpsRelation::kIncomparable);
  EXPECT_GT(v.max_violation, 0.0);
}

TEST(Mps, MeanMismatch) {
  const PosteriorDistribution g({{0.2, 1.0}});
  const PosteriorDistribution h({{0.3, 1.0}});
  const MpsVerdict v = mps_compare(g, h);
  EXPECT_TRUE(v.mean_mismatch);
  EXPECT_EQ(v.relation, MpsRelation::kIncomparable);
  EXPECT_NEAR(v.max_violation, 0.1, 1e-15);
}

TEST(Mps, ToleranceAbsorbsRoundoff) {
  const PosteriorDistribution g({{0.0, 0.5}, {1.0, 0.5}});
  const PosteriorDistribution h({{0.0, 0.5 + 1e-12}, {1.0, 0.5 - 1e-12}});
  EXPECT_EQ(mps_compare(g, h).relation, MpsRelation::kEqual);
  EXPECT_NE(mps_compare(g, h, 0.0).relation, MpsRelation::kEqual);
}

TEST(Completion, ConvexFunctionalIsMonotone) {
  std::mt19937_64 rng(34);
  const auto score = convex_functional_score([](double x) { return std::exp(3.0 * x); });
  for (int k = 0; k < 30; ++k) {
    const auto h = random_distribution(rng, 4);
    const auto g = spread_one(rng, h);
    EXPECT_GE(score(g), score(h) - 1e-12);
  }
}

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hmd/demand.hpp"
#include "hmd/joint_model.hpp"

namespace hmd {

/// Per-cell disclosure probabilities d(y_j, x_i), rows = profitability.
class TabularRule {
 public:
  explicit TabularRule(Eigen::MatrixXd disclose_prob);

  static TabularRule constant(const JointModel& m, double value);
  static TabularRule full_disclosure(const JointModel& m) { return constant(m, 1.0); }
  static TabularRule full_concealment(const JointModel& m) { return constant(m, 0.0); }

  const Eigen::MatrixXd& disclose_prob() const { return d_; }
  double operator()(std::size_t y_index, std::size_t x_index) const { return d_(y_index, x_index); }
  std::size_t rows() const { return static_cast<std::size_t>(d_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(d_.cols()); }
  bool is_binary() const;

  bool operator==(const TabularRule& other) const { return d_ == other.d_; }

 private:
  Eigen::MatrixXd d_;
};

/// Disclose iff (x - x_bar)(y - y_bar(x)) >= 0. y_bar is stored unclamped;
/// evaluation against a model clamps it to the model's profitability support.
struct ThresholdRule {
  double x_bar = 0.0;
  std::function<double(double)> y_bar;

  double threshold_at(double x, const Interval& y_support) const;
  bool discloses(double x, double y, const Interval& y_support) const;
};

struct NonDisclosurePosterior {
  double x_nd = 0.0;
  double y_nd = 0.0;
  double nd_mass = 0.0;

  bool off_path() const { return nd_mass <= 0.0; }
};

struct Atom {
  double value = 0.0;
  double mass = 0.0;
};

/// Finite distribution of buyer posterior means, atoms sorted by value.
class PosteriorDistribution {
 public:
  /// Sorts atoms, drops zero-mass atoms and merges atoms closer than merge_tol.
  explicit PosteriorDistribution(std::vector<Atom> atoms, double merge_tol = 1e-9);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const;
  double mean() const;
  double variance() const;
  /// P(X <= t).
  double cdf(double t) const;

 private:
  std::vector<Atom> atoms_;
};

/// Seller payoff E[y P(y, d)] split as E(y) E[P] + Cov[y, P].
struct PayoffDecomposition {
  double payoff = 0.0;
  double mean_term = 0.0;
  double cov_term = 0.0;
  double expected_sale_prob = 0.0;
};

/// Posterior means after non-disclosure. When every realization is disclosed
/// the event is off-path: x_nd = offpath_default (E(x) if unset), y_nd = E(y).
NonDisclosurePosterior nd_posterior(const JointModel& m, const TabularRule& d,
                                    std::optional<double> offpath_default = std::nullopt);

/// P(y_j, d): sale probability conditional on profitability y_j.
double sale_prob_given_y(const JointModel& m, const TabularRule& d, const DemandCurve& p,
                         const NonDisclosurePosterior& nd, std::size_t y_index);

/// P(y_j, d) for every row; zero-mass rows are reported as p(x_nd).
std::vector<double> sale_probs(const JointModel& m, const TabularRule& d, const DemandCurve& p,
                               const NonDisclosurePosterior& nd);

PayoffDecomposition seller_payoff(const JointModel& m, const TabularRule& d, const DemandCurve& p);

/// F^B: one atom per disclosed value plus one atom at x_nd.
PosteriorDistribution buyer_posterior_distribution(const JointModel& m, const TabularRule& d);

/// Cell (j, i) discloses iff (x_i - x_bar)(y_j - y_bar(x_i)) >= 0 with y_bar
/// clamped to the profitability support. Ties disclose.
TabularRule rasterize(const ThresholdRule& t, const JointModel& m);

/// Reassigns disclosure within each value column so that the column's
/// disclosed mass is unchanged but disclosure goes to the lowest
/// profitabilities when x <= x_nd and to the highest when x > x_nd.
/// Leaves x_nd and E[P] unchanged and weakly raises Cov[y, P].
TabularRule rearrange_to_threshold(const JointModel& m, const TabularRule& d);

}  // namespace hmd

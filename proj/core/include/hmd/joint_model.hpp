#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hmd/grid.hpp"

namespace hmd {

/// Joint distribution of (posterior-mean value x, profitability y) on a grid.
///
/// mass(j, i) is the probability of the cell with profitability y_j and value
/// x_i: rows index profitability, columns index value. Immutable after
/// construction.
class JointModel {
 public:
  JointModel(std::vector<double> x_points, std::vector<double> y_points, Eigen::MatrixXd mass);
  JointModel(std::vector<double> x_points, std::vector<double> y_points, Eigen::MatrixXd mass,
             Interval x_support, Interval y_support);

  std::size_t nx() const { return x_points_.size(); }
  std::size_t ny() const { return y_points_.size(); }
  std::span<const double> x_points() const { return x_points_; }
  std::span<const double> y_points() const { return y_points_; }
  double x(std::size_t i) const { return x_points_[i]; }
  double y(std::size_t j) const { return y_points_[j]; }
  const Eigen::MatrixXd& mass() const { return mass_; }

  const Grid1D& x_marginal() const { return x_marginal_; }
  const Grid1D& y_marginal() const { return y_marginal_; }
  const Interval& x_support() const { return x_marginal_.support(); }
  const Interval& y_support() const { return y_marginal_.support(); }

  double mean_x() const { return x_marginal_.mean(); }
  double mean_y() const { return y_marginal_.mean(); }
  double cov_xy() const;

  /// E[f(x, y)] under the joint mass.
  double expect(const std::function<double(double, double)>& f) const;

 private:
  std::vector<double> x_points_;
  std::vector<double> y_points_;
  Eigen::MatrixXd mass_;
  Grid1D x_marginal_;
  Grid1D y_marginal_;
};

/// Independent value and profitability.
JointModel build_product_model(const Grid1D& x_dist, const Grid1D& y_dist);

/// Farlie-Gumbel-Morgenstern coupling of two marginals with dependence
/// parameter rho in [-1, 1], evaluated at cell mid-ranks. Marginals are
/// reproduced exactly.
JointModel build_fgm_model(const Grid1D& x_dist, const Grid1D& y_dist, double rho);

/// Row distribution F_{X|y_j}. Throws ConditioningError on a zero-mass row.
Grid1D conditional_x_given_y(const JointModel& m, std::size_t y_index);

/// Column distribution F_{Y|x_i}. Throws ConditioningError on a zero-mass column.
Grid1D conditional_y_given_x(const JointModel& m, std::size_t x_index);

/// E[x | y_j] for every row; zero-mass rows get the unconditional mean.
std::vector<double> conditional_mean_x(const JointModel& m);

}  // namespace hmd

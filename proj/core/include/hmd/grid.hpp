#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hmd {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v, double slack = 0.0) const { return v >= lo - slack && v <= hi + slack; }
};

/// Discrete probability distribution on an ordered set of abscissae.
///
/// Each point carries the probability mass of one quadrature cell. Points are
/// strictly increasing and weights are normalized to sum to one on
/// construction. The support interval defaults to [front, back] but factory
/// functions that discretize a continuous law record the law's full support.
class Grid1D {
 public:
  Grid1D(std::vector<double> points, std::vector<double> weights);
  Grid1D(std::vector<double> points, std::vector<double> weights, Interval support);

  /// Cell-midpoint discretization of U[lo, hi].
  static Grid1D uniform(double lo, double hi, std::size_t cells);
  /// Single atom.
  static Grid1D point_mass(double x);
  /// Beta(a, b) rescaled to [lo, hi]; cell masses are exact cdf differences.
  static Grid1D beta(double a, double b, double lo, double hi, std::size_t cells);
  /// Triangular law on [lo, hi] with the given mode; exact cell masses.
  static Grid1D triangular(double lo, double mode, double hi, std::size_t cells);
  /// Midpoint rule for an arbitrary nonnegative density on [lo, hi].
  static Grid1D from_density(double lo, double hi, std::size_t cells,
                             const std::function<double(double)>& density);

  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  double point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const Interval& support() const { return support_; }

  double mean() const;
  double variance() const;
  bool is_degenerate() const;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  Interval support_;
};

}  // namespace hmd

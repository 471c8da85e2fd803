#include "hmd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "hmd/errors.hpp"

namespace hmd {

namespace {

void check_cells(std::size_t cells) {
  if (cells == 0) throw ModelError("grid needs at least one cell");
}

void check_bounds(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(hi > lo)) {
    throw ModelError("grid bounds must be finite with lo < hi");
  }
}

std::vector<double> midpoints(double lo, double hi, std::size_t cells) {
  std::vector<double> pts(cells);
  const double h = (hi - lo) / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i) pts[i] = lo + (static_cast<double>(i) + 0.5) * h;
  return pts;
}

std::vector<double> edges(double lo, double hi, std::size_t cells) {
  std::vector<double> e(cells + 1);
  const double h = (hi - lo) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) e[i] = lo + static_cast<double>(i) * h;
  e[cells] = hi;
  return e;
}

}  // namespace

Grid1D::Grid1D(std::vector<double> points, std::vector<double> weights)
    : Grid1D(points, std::move(weights),
             points.empty() ? Interval{} : Interval{points.front(), points.back()}) {}

Grid1D::Grid1D(std::vector<double> points, std::vector<double> weights, Interval support)
    : points_(std::move(points)), weights_(std::move(weights)), support_(support) {
  if (points_.empty()) throw ModelError("grid must have at least one point");
  if (points_.size() != weights_.size()) throw ModelError("grid points and weights differ in length");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw ModelError("grid point is not finite");
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw ModelError("grid points must be strictly increasing (index " + std::to_string(i) + ")");
    }
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw ModelError("grid weights must be finite and nonnegative (index " + std::to_string(i) + ")");
    }
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (!(total > 0.0)) throw ModelError("grid weights sum to zero");
  for (double& w : weights_) w /= total;
  if (!(support_.lo <= points_.front() && support_.hi >= points_.back())) {
    throw ModelError("grid support must contain every point");
  }
}

Grid1D Grid1D::uniform(double lo, double hi, std::size_t cells) {
  check_cells(cells);
  check_bounds(lo, hi);
  return Grid1D(midpoints(lo, hi, cells), std::vector<double>(cells, 1.0), Interval{lo, hi});
}

Grid1D Grid1D::point_mass(double x) { return Grid1D({x}, {1.0}, Interval{x, x}); }

Grid1D Grid1D::beta(double a, double b, double lo, double hi, std::size_t cells) {
  check_cells(cells);
  check_bounds(lo, hi);
  if (!(a > 0.0 && b > 0.0)) throw ModelError("beta shape parameters must be positive");
  const auto e = edges(0.0, 1.0, cells);
  std::vector<double> w(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    w[i] = boost::math::ibeta(a, b, e[i + 1]) - boost::math::ibeta(a, b, e[i]);
  }
  return Grid1D(midpoints(lo, hi, cells), std::move(w), Interval{lo, hi});
}

Grid1D Grid1D::triangular(double lo, double mode, double hi, std::size_t cells) {
  check_cells(cells);
  check_bounds(lo, hi);
  if (mode < lo || mode > hi) throw ModelError("triangular mode outside [lo, hi]");
  auto cdf = [&](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    if (x <= mode) return (x - lo) * (x - lo) / ((hi - lo) * (mode - lo));
    return 1.0 - (hi - x) * (hi - x) / ((hi - lo) * (hi - mode));
  };
  const auto e = edges(lo, hi, cells);
  std::vector<double> w(cells);
  for (std::size_t i = 0; i < cells; ++i) w[i] = cdf(e[i + 1]) - cdf(e[i]);
  return Grid1D(midpoints(lo, hi, cells), std::move(w), Interval{lo, hi});
}

Grid1D Grid1D::from_density(double lo, double hi, std::size_t cells,
                            const std::function<double(double)>& density) {
  check_cells(cells);
  check_bounds(lo, hi);
  auto pts = midpoints(lo, hi, cells);
  std::vector<double> w(cells);
  std::transform(pts.begin(), pts.end(), w.begin(), [&](double x) { return density(x); });
  return Grid1D(std::move(pts), std::move(w), Interval{lo, hi});
}

double Grid1D::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += points_[i] * weights_[i];
  return s;
}

double Grid1D::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += (points_[i] - mu) * (points_[i] - mu) * weights_[i];
  return s;
}

bool Grid1D::is_degenerate() const {
  return std::count_if(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; }) <= 1;
}

}  // namespace hmd

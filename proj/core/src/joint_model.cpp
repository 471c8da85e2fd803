#include "hmd/joint_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hmd/errors.hpp"

namespace hmd {

namespace {


Eigen::MatrixXd checked_mass(const std::vector<double>& xs, const std::vector<double>& ys,
                             Eigen::MatrixXd mass) {
  if (static_cast<std::size_t>(mass.rows()) != ys.size() ||
      static_cast<std::size_t>(mass.cols()) != xs.size()) {
    throw ModelError("joint mass must be ny x nx");
  }
  if (!mass.allFinite() || (mass.array() < 0.0).any()) {
    throw ModelError("joint mass entries must be finite and nonnegative");
  }
  const double total = mass.sum();
  if (std::abs(total - 1.0) > 1e-6) {
    throw ModelError("joint mass must sum to one (got " + std::to_string(total) + ")");
  }
  mass /= total;
  return mass;
}

std::vector<double> column_sums(const Eigen::MatrixXd& mass) {
  std::vector<double> v(static_cast<std::size_t>(mass.cols()));
  for (Eigen::Index i = 0; i < mass.cols(); ++i) v[static_cast<std::size_t>(i)] = mass.col(i).sum();
  return v;
}

std::vector<double> row_sums(const Eigen::MatrixXd& mass) {
  std::vector<double> v(static_cast<std::size_t>(mass.rows()));
  for (Eigen::Index j = 0; j < mass.rows(); ++j) v[static_cast<std::size_t>(j)] = mass.row(j).sum();
  return v;
}

Interval default_support(const std::vector<double>& pts) {
  if (pts.empty()) throw ModelError("joint model needs nonempty grids");
  return {pts.front(), pts.back()};
}

}  // namespace

JointModel::JointModel(std::vector<double> x_points, std::vector<double> y_points,
                       Eigen::MatrixXd mass)
    : JointModel(x_points, y_points, std::move(mass), default_support(x_points),
                 default_support(y_points)) {}

JointModel::JointModel(std::vector<double> x_points, std::vector<double> y_points,
                       Eigen::MatrixXd mass, Interval x_support, Interval y_support)
    : x_points_(std::move(x_points)),
      y_points_(std::move(y_points)),
      mass_(checked_mass(x_points_, y_points_, std::move(mass))),
      x_marginal_(x_points_, column_sums(mass_), x_support),
      y_marginal_(y_points_, row_sums(mass_), y_support) {
  // Rounding in the sum grows with the number of cells.
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(mass_.size() + 16);
  if (std::abs(mass_.sum() - 1.0) > tol) throw ModelError("joint mass normalization failed");
}

double JointModel::cov_xy() const {
  const double mx = mean_x();
  const double my = mean_y();
  return expect([mx, my](double x, double y) { return (x - mx) * (y - my); });
}

double JointModel::expect(const std::function<double(double, double)>& f) const {
  double s = 0.0;
  for (std::size_t j = 0; j < ny(); ++j) {
    for (std::size_t i = 0; i < nx(); ++i) {
      const double w = mass_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (w > 0.0) s += w * f(x_points_[i], y_points_[j]);
    }
  }
  return s;
}

JointModel build_product_model(const Grid1D& x_dist, const Grid1D& y_dist) {
  Eigen::Map<const Eigen::VectorXd> wx(x_dist.weights().data(),
                                       static_cast<Eigen::Index>(x_dist.size()));
  Eigen::Map<const Eigen::VectorXd> wy(y_dist.weights().data(),
                                       static_cast<Eigen::Index>(y_dist.size()));
  Eigen::MatrixXd mass = wy * wx.transpose();
  return JointModel({x_dist.points().begin(), x_dist.points().end()},
                    {y_dist.points().begin(), y_dist.points().end()}, std::move(mass),
                    x_dist.support(), y_dist.support());
}

JointModel build_fgm_model(const Grid1D& x_dist, const Grid1D& y_dist, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw ModelError("FGM dependence must lie in [-1, 1]");
  auto midranks = [](const Grid1D& g) {
    std::vector<double> u(g.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      u[i] = cum + 0.5 * g.weight(i);
      cum += g.weight(i);
    }
    return u;
  };
  const auto u = midranks(x_dist);
  const auto v = midranks(y_dist);
  Eigen::MatrixXd mass(static_cast<Eigen::Index>(y_dist.size()),
                       static_cast<Eigen::Index>(x_dist.size()));
  for (std::size_t j = 0; j < y_dist.size(); ++j) {
    for (std::size_t i = 0; i < x_dist.size(); ++i) {
      mass(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          x_dist.weight(i) * y_dist.weight(j) * (1.0 + rho * (1.0 - 2.0 * u[i]) * (1.0 - 2.0 * v[j]));
    }
  }
  return JointModel({x_dist.points().begin(), x_dist.points().end()},
                    {y_dist.points().begin(), y_dist.points().end()}, std::move(mass),
                    x_dist.support(), y_dist.support());
}

Grid1D conditional_x_given_y(const JointModel& m, std::size_t y_index) {
  if (y_index >= m.ny()) throw InputError("profitability index out of range");
  const auto row = m.mass().row(static_cast<Eigen::Index>(y_index));
  if (!(row.sum() > 0.0)) {
    throw ConditioningError("profitability cell " + std::to_string(y_index) + " has zero mass");
  }
  std::vector<double> w(m.nx());
  for (std::size_t i = 0; i < m.nx(); ++i) w[i] = row(static_cast<Eigen::Index>(i));
  return Grid1D({m.x_points().begin(), m.x_points().end()}, std::move(w), m.x_support());
}

Grid1D conditional_y_given_x(const JointModel& m, std::size_t x_index) {
  if (x_index >= m.nx()) throw InputError("value index out of range");
  const auto col = m.mass().col(static_cast<Eigen::Index>(x_index));
  if (!(col.sum() > 0.0)) {
    throw ConditioningError("value cell " + std::to_string(x_index) + " has zero mass");
  }
  std::vector<double> w(m.ny());
  for (std::size_t j = 0; j < m.ny(); ++j) w[j] = col(static_cast<Eigen::Index>(j));
  return Grid1D({m.y_points().begin(), m.y_points().end()}, std::move(w), m.y_support());
}

std::vector<double> conditional_mean_x(const JointModel& m) {
  std::vector<double> out(m.ny(), m.mean_x());
  for (std::size_t j = 0; j < m.ny(); ++j) {
    const auto row = m.mass().row(static_cast<Eigen::Index>(j));
    const double w = row.sum();
    if (!(w > 0.0)) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < m.nx(); ++i) s += row(static_cast<Eigen::Index>(i)) * m.x(i);
    out[j] = s / w;
  }
  return out;
}

}  // namespace hmd

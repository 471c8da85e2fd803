#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmd/demand.hpp"
#include "hmd/disclosure.hpp"
#include "hmd/grid.hpp"
#include "hmd/joint_model.hpp"

namespace hmd::fixtures {

// Straight double loop over cells; shares nothing with the library's payoff code.
struct NaivePayoff {
  double payoff = 0.0;
  double x_nd = 0.0;
  double y_nd = 0.0;
  double nd_mass = 0.0;
};

inline NaivePayoff naive_payoff(const JointModel& m, const Eigen::MatrixXd& d,
                                const std::function<double(double)>& p) {
  NaivePayoff out;
  double sx = 0.0, sy = 0.0;
  for (Eigen::Index j = 0; j < d.rows(); ++j) {
    for (Eigen::Index i = 0; i < d.cols(); ++i) {
      const double w = (1.0 - d(j, i)) * m.mass()(j, i);
      out.nd_mass += w;
      sx += w * m.x(static_cast<std::size_t>(i));
      sy += w * m.y(static_cast<std::size_t>(j));
    }
  }
  out.x_nd = out.nd_mass > 0.0 ? sx / out.nd_mass : m.mean_x();
  out.y_nd = out.nd_mass > 0.0 ? sy / out.nd_mass : m.mean_y();
  const double p_nd = p(out.x_nd);
  for (Eigen::Index j = 0; j < d.rows(); ++j) {
    for (Eigen::Index i = 0; i < d.cols(); ++i) {
      const double di = d(j, i);
      const double x = m.x(static_cast<std::size_t>(i));
      const double y = m.y(static_cast<std::size_t>(j));
      out.payoff += m.mass()(j, i) * y * (di * p(x) + (1.0 - di) * p_nd);
    }
  }
  return out;
}

inline Grid1D random_grid(std::mt19937_64& rng, double lo, double hi, std::size_t cells) {
  std::uniform_real_distribution<double> u(0.5, 4.0);
  return Grid1D::beta(u(rng), u(rng), lo, hi, cells);
}

// Beta marginals on random supports, optionally FGM-coupled.
inline JointModel random_model(std::mt19937_64& rng, std::size_t nx, std::size_t ny,
                               bool positive_y = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double xlo = 0.05 + 0.2 * u(rng);
  const double xhi = xlo + 0.4 + 0.35 * u(rng);
  const double ylo = positive_y ? 0.05 + 0.3 * u(rng) : -1.0 + 0.5 * u(rng);
  const double yhi = positive_y ? ylo + 0.3 + 0.6 * u(rng) : 0.3 + 0.7 * u(rng);
  const Grid1D x = random_grid(rng, xlo, xhi, nx);
  const Grid1D y = random_grid(rng, ylo, yhi, ny);
  const double rho = 2.0 * u(rng) - 1.0;
  return build_fgm_model(x, y, rho);
}

// Small model with arbitrary positive cell masses.
inline JointModel random_discrete_model(std::mt19937_64& rng, std::size_t nx, std::size_t ny) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs, ys;
  double x = 0.1 + 0.2 * u(rng), y = 0.1 + 0.2 * u(rng);
  for (std::size_t i = 0; i < nx; ++i) {
    xs.push_back(x);
    x += 0.1 + 0.3 * u(rng);
  }
  for (std::size_t j = 0; j < ny; ++j) {
    ys.push_back(y);
    y += 0.1 + 0.3 * u(rng);
  }
  Eigen::MatrixXd mass(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nx));
  for (Eigen::Index j = 0; j < mass.rows(); ++j) {
    for (Eigen::Index i = 0; i < mass.cols(); ++i) mass(j, i) = 0.05 + u(rng);
  }
  mass /= mass.sum();
  return JointModel(xs, ys, mass);
}

inline TabularRule random_rule(std::mt19937_64& rng, const JointModel& m, bool binary) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd d(static_cast<Eigen::Index>(m.ny()), static_cast<Eigen::Index>(m.nx()));
  for (Eigen::Index j = 0; j < d.rows(); ++j) {
    for (Eigen::Index i = 0; i < d.cols(); ++i) d(j, i) = binary ? (u(rng) < 0.5 ? 0.0 : 1.0) : u(rng);
  }
  return TabularRule(d);
}

// Mixed-curvature demand menu used by randomized checks.
inline std::vector<DemandCurve> demand_menu() {
  return {DemandCurve::affine(0.1, 0.8), DemandCurve::power(2.0), DemandCurve::power(0.5),
          DemandCurve::power(3.0, 0.9, 0.05), DemandCurve::logistic(0.5, 6.0)};
}

}  // namespace hmd::fixtures

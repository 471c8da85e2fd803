#include "hmd/disclosure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hmd/errors.hpp"

namespace hmd {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void check_shape(const JointModel& m, const TabularRule& d) {
  if (d.rows() != m.ny() || d.cols() != m.nx()) {
    throw InputError("rule shape " + std::to_string(d.rows()) + "x" + std::to_string(d.cols()) +
                     " does not match model " + std::to_string(m.ny()) + "x" +
                     std::to_string(m.nx()));
  }
}

}  // namespace

TabularRule::TabularRule(Eigen::MatrixXd disclose_prob) : d_(std::move(disclose_prob)) {
  if (!d_.allFinite() || (d_.array() < 0.0).any() || (d_.array() > 1.0).any()) {
    throw InputError("disclosure probabilities must lie in [0,1]");
  }
}

TabularRule TabularRule::constant(const JointModel& m, double value) {
  return TabularRule(Eigen::MatrixXd::Constant(idx(m.ny()), idx(m.nx()), value));
}

bool TabularRule::is_binary() const {
  return ((d_.array() == 0.0) || (d_.array() == 1.0)).all();
}

double ThresholdRule::threshold_at(double x, const Interval& y_support) const {
  return std::clamp(y_bar(x), y_support.lo, y_support.hi);
}

bool ThresholdRule::discloses(double x, double y, const Interval& y_support) const {
  return (x - x_bar) * (y - threshold_at(x, y_support)) >= 0.0;
}

PosteriorDistribution::PosteriorDistribution(std::vector<Atom> atoms, double merge_tol) {
  std::erase_if(atoms, [](const Atom& a) { return !(a.mass > 0.0); });
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  for (const Atom& a : atoms) {
    if (!atoms_.empty() && a.value - atoms_.back().value < merge_tol) {
      Atom& last = atoms_.back();
      const double mass = last.mass + a.mass;
      last.value = (last.value * last.mass + a.value * a.mass) / mass;
      last.mass = mass;
    } else {
      atoms_.push_back(a);
    }
  }
}

double PosteriorDistribution::total_mass() const {
  return std::accumulate(atoms_.begin(), atoms_.end(), 0.0,
                         [](double s, const Atom& a) { return s + a.mass; });
}

double PosteriorDistribution::mean() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.value * a.mass;
  return s / total_mass();
}

double PosteriorDistribution::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (const Atom& a : atoms_) s += (a.value - mu) * (a.value - mu) * a.mass;
  return s / total_mass();
}

double PosteriorDistribution::cdf(double t) const {
  double s = 0.0;
  for (const Atom& a : atoms_) {
    if (a.value > t) break;
    s += a.mass;
  }
  return s;
}

NonDisclosurePosterior nd_posterior(const JointModel& m, const TabularRule& d,
                                    std::optional<double> offpath_default) {
  check_shape(m, d);
  const double fallback = offpath_default.value_or(m.mean_x());
  if (!m.x_support().contains(fallback, 1e-12)) {
    throw InputError("off-path default must lie in the value support");
  }
  double mass = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t j = 0; j < m.ny(); ++j) {
    for (std::size_t i = 0; i < m.nx(); ++i) {
      const double w = (1.0 - d(j, i)) * m.mass()(idx(j), idx(i));
      mass += w;
      sx += w * m.x(i);
      sy += w * m.y(j);
    }
  }
  if (!(mass > 0.0)) return {fallback, m.mean_y(), 0.0};
  return {sx / mass, sy / mass, mass};
}

double sale_prob_given_y(const JointModel& m, const TabularRule& d, const DemandCurve& p,
                         const NonDisclosurePosterior& nd, std::size_t y_index) {
  check_shape(m, d);
  if (y_index >= m.ny()) throw InputError("profitability index out of range");
  const auto row = m.mass().row(idx(y_index));
  const double w = row.sum();
  if (!(w > 0.0)) {
    throw ConditioningError("profitability cell " + std::to_string(y_index) + " has zero mass");
  }
  const double p_nd = p(nd.x_nd);
  double s = 0.0;
  for (std::size_t i = 0; i < m.nx(); ++i) {
    const double di = d(y_index, i);
    s += row(idx(i)) * (di * p(m.x(i)) + (1.0 - di) * p_nd);
  }
  return s / w;
}

std::vector<double> sale_probs(const JointModel& m, const TabularRule& d, const DemandCurve& p,
                               const NonDisclosurePosterior& nd) {
  check_shape(m, d);
  std::vector<double> px(m.nx());
  for (std::size_t i = 0; i < m.nx(); ++i) px[i] = p(m.x(i));
  const double p_nd = p(nd.x_nd);
  std::vector<double> out(m.ny(), p_nd);
  for (std::size_t j = 0; j < m.ny(); ++j) {
    const auto row = m.mass().row(idx(j));
    const double w = row.sum();
    if (!(w > 0.0)) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < m.nx(); ++i) {
      const double di = d(j, i);
      s += row(idx(i)) * (di * px[i] + (1.0 - di) * p_nd);
    }
    out[j] = s / w;
  }
  return out;
}

PayoffDecomposition seller_payoff(const JointModel& m, const TabularRule& d, const DemandCurve& p) {
  const auto nd = nd_posterior(m, d);
  const auto probs = sale_probs(m, d, p, nd);
  const Grid1D& fy = m.y_marginal();
  const double ey = fy.mean();
  double payoff = 0.0;
  double ep = 0.0;
  for (std::size_t j = 0; j < m.ny(); ++j) {
    payoff += fy.weight(j) * m.y(j) * probs[j];
    ep += fy.weight(j) * probs[j];
  }
  double cov = 0.0;
  for (std::size_t j = 0; j < m.ny(); ++j) {
    cov += fy.weight(j) * (m.y(j) - ey) * (probs[j] - ep);
  }
  return {payoff, ey * ep, cov, ep};
}

PosteriorDistribution buyer_posterior_distribution(const JointModel& m, const TabularRule& d) {
  const auto nd = nd_posterior(m, d);
  std::vector<Atom> atoms;
  atoms.reserve(m.nx() + 1);
  for (std::size_t i = 0; i < m.nx(); ++i) {
    double disclosed = 0.0;
    for (std::size_t j = 0; j < m.ny(); ++j) disclosed += d(j, i) * m.mass()(idx(j), idx(i));
    atoms.push_back({m.x(i), disclosed});
  }
  atoms.push_back({nd.x_nd, nd.nd_mass});
  return PosteriorDistribution(std::move(atoms));
}

TabularRule rasterize(const ThresholdRule& t, const JointModel& m) {
  Eigen::MatrixXd d(idx(m.ny()), idx(m.nx()));
  for (std::size_t i = 0; i < m.nx(); ++i) {
    const double dx = m.x(i) - t.x_bar;
    const double ybar = t.threshold_at(m.x(i), m.y_support());
    for (std::size_t j = 0; j < m.ny(); ++j) {
      d(idx(j), idx(i)) = dx * (m.y(j) - ybar) >= 0.0 ? 1.0 : 0.0;
    }
  }
  return TabularRule(std::move(d));
}

TabularRule rearrange_to_threshold(const JointModel& m, const TabularRule& d) {
  const auto nd = nd_posterior(m, d);
  Eigen::MatrixXd out(idx(m.ny()), idx(m.nx()));
  std::vector<std::size_t> order(m.ny());
  for (std::size_t i = 0; i < m.nx(); ++i) {
    double remaining = 0.0;
    for (std::size_t j = 0; j < m.ny(); ++j) remaining += d(j, i) * m.mass()(idx(j), idx(i));
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Bad news goes to the least profitable objects, good news to the most.
    if (m.x(i) > nd.x_nd) std::reverse(order.begin(), order.end());
    for (std::size_t j : order) {
      const double w = m.mass()(idx(j), idx(i));
      if (!(w > 0.0)) {
        out(idx(j), idx(i)) = remaining > 0.0 ? 1.0 : 0.0;
        continue;
      }
      const double take = std::min(w, remaining);
      out(idx(j), idx(i)) = std::clamp(take / w, 0.0, 1.0);
      remaining -= take;
    }
  }
  return TabularRule(std::move(out));
}

}  // namespace hmd

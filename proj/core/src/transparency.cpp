#include "hmd/transparency.hpp"

#include <cmath>
#include <string>

#include "hmd/errors.hpp"

namespace hmd {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

double row_mean_x(const JointModel& m, std::size_t j) {
  double w = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < m.nx(); ++i) {
    w += m.mass()(idx(j), idx(i));
    s += m.mass()(idx(j), idx(i)) * m.x(i);
  }
  return w > 0.0 ? s / w : m.mean_x();
}

// Best Dye cutoff for row j: for y > 0 disclose the values x_k..x_{n-1}, for
// y < 0 disclose x_0..x_{k-1}. Returns the disclosure row.
Eigen::RowVectorXd best_cutoff_row(const JointModel& m, const DemandCurve& p, std::size_t j) {
  const std::size_t n = m.nx();
  const double y = m.y(j);
  const auto row = m.mass().row(idx(j));
  // Prefix sums over value cells.
  std::vector<double> cm(n + 1, 0.0), cx(n + 1, 0.0), cp(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = row(idx(i));
    cm[i + 1] = cm[i] + w;
    cx[i + 1] = cx[i] + w * m.x(i);
    cp[i + 1] = cp[i] + w * p(m.x(i));
  }
  const double fallback = row_mean_x(m, j);
  double best_value = 0.0;
  std::size_t best_k = 0;
  bool have = false;
  for (std::size_t k = 0; k <= n; ++k) {
    double conceal_m, conceal_x, disclosed;
    if (y > 0.0) {
      conceal_m = cm[k];
      conceal_x = cx[k];
      disclosed = cp[n] - cp[k];
    } else {
      conceal_m = cm[n] - cm[k];
      conceal_x = cx[n] - cx[k];
      disclosed = cp[k];
    }
    const double x_nd = conceal_m > 0.0 ? conceal_x / conceal_m : fallback;
    const double value = y * (disclosed + conceal_m * p(x_nd));
    if (!have || value > best_value + 1e-15) {
      best_value = value;
      best_k = k;
      have = true;
    }
  }
  Eigen::RowVectorXd d(idx(n));
  for (std::size_t i = 0; i < n; ++i) {
    d(idx(i)) = (y > 0.0) == (i >= best_k) ? 1.0 : 0.0;
  }
  return d;
}

}  // namespace

std::vector<double> transparent_nd_posteriors(const JointModel& m, const TabularRule& d) {
  if (d.rows() != m.ny() || d.cols() != m.nx()) throw InputError("rule shape does not match model");
  std::vector<double> out(m.ny());
  for (std::size_t j = 0; j < m.ny(); ++j) {
    double w = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < m.nx(); ++i) {
      const double c = (1.0 - d(j, i)) * m.mass()(idx(j), idx(i));
      w += c;
      s += c * m.x(i);
    }
    out[j] = w > 0.0 ? s / w : row_mean_x(m, j);
  }
  return out;
}

double transparent_value(const JointModel& m, const TabularRule& d, const DemandCurve& p) {
  const auto nd = transparent_nd_posteriors(m, d);
  double total = 0.0;
  for (std::size_t j = 0; j < m.ny(); ++j) {
    const double p_nd = p(nd[j]);
    double s = 0.0;
    for (std::size_t i = 0; i < m.nx(); ++i) {
      const double di = d(j, i);
      s += m.mass()(idx(j), idx(i)) * (di * p(m.x(i)) + (1.0 - di) * p_nd);
    }
    total += m.y(j) * s;
  }
  return total;
}

TransparentSolution solve_transparent(const JointModel& m, const DemandCurve& p) {
  Eigen::MatrixXd d(idx(m.ny()), idx(m.nx()));
  const Curvature c = p.curvature();
  std::string convention;
  switch (c) {
    case Curvature::kAffine:
      convention = "affine demand: indifferent, full disclosure chosen";
      break;
    case Curvature::kStrictlyConcave:
    case Curvature::kStrictlyConvex:
      convention = "curvature of sign(y) p; y = 0 rows disclose";
      break;
    case Curvature::kOther:
      convention = "mixed curvature: best cutoff per row; y = 0 rows disclose";
      break;
  }
  for (std::size_t j = 0; j < m.ny(); ++j) {
    const double y = m.y(j);
    if (y == 0.0 || c == Curvature::kAffine) {
      d.row(idx(j)).setOnes();
    } else if (c == Curvature::kOther) {
      d.row(idx(j)) = best_cutoff_row(m, p, j);
    } else {
      // sign(y) p concave: pooling raises the objective, so conceal.
      const bool concave = (c == Curvature::kStrictlyConcave) == (y > 0.0);
      d.row(idx(j)).setConstant(concave ? 0.0 : 1.0);
    }
  }
  TransparentSolution sol{TabularRule(std::move(d)), {}, {}, 0.0, convention};
  sol.per_y_x_nd = transparent_nd_posteriors(m, sol.rule);
  sol.per_y_payoff.resize(m.ny());
  const Grid1D& fy = m.y_marginal();
  for (std::size_t j = 0; j < m.ny(); ++j) {
    const double w = fy.weight(j);
    if (!(w > 0.0)) {
      sol.per_y_payoff[j] = m.y(j) * p(sol.per_y_x_nd[j]);
      continue;
    }
    const double p_nd = p(sol.per_y_x_nd[j]);
    double s = 0.0;
    for (std::size_t i = 0; i < m.nx(); ++i) {
      const double di = sol.rule(j, i);
      s += m.mass()(idx(j), idx(i)) * (di * p(m.x(i)) + (1.0 - di) * p_nd);
    }
    sol.per_y_payoff[j] = m.y(j) * s / w;
    sol.total_value += w * sol.per_y_payoff[j];
  }
  return sol;
}

double mixed_objective_value(const JointModel& m, const DemandCurve& p, const TabularRule& d,
                             double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("tau must lie in [0,1]");
  return tau * transparent_value(m, d, p) + (1.0 - tau) * seller_payoff(m, d, p).payoff;
}

PosteriorDistribution transparent_buyer_distribution(const JointModel& m, const TabularRule& d) {
  const auto nd = transparent_nd_posteriors(m, d);
  std::vector<Atom> atoms;
  atoms.reserve(m.nx() + m.ny());
  for (std::size_t i = 0; i < m.nx(); ++i) {
    double disclosed = 0.0;
    for (std::size_t j = 0; j < m.ny(); ++j) disclosed += d(j, i) * m.mass()(idx(j), idx(i));
    atoms.push_back({m.x(i), disclosed});
  }
  for (std::size_t j = 0; j < m.ny(); ++j) {
    double concealed = 0.0;
    for (std::size_t i = 0; i < m.nx(); ++i) concealed += (1.0 - d(j, i)) * m.mass()(idx(j), idx(i));
    atoms.push_back({nd[j], concealed});
  }
  return PosteriorDistribution(std::move(atoms));
}

MpsVerdict compare_informativeness(const JointModel& m, const DemandCurve& p,
                                   const SolveResult& hidden, const TransparentSolution& transparent,
                                   double tol) {
  (void)p;
  const auto g = buyer_posterior_distribution(m, rasterize(hidden.rule, m));
  const auto h = transparent_buyer_distribution(m, transparent.rule);
  const double width = m.x_support().width() > 0.0 ? m.x_support().width() : 1.0;
  if (std::abs(g.mean() - h.mean()) > 1e-9 * width) {
    throw ConsistencyError("buyer posterior means differ across regimes: " +
                           std::to_string(g.mean()) + " vs " + std::to_string(h.mean()));
  }
  return mps_compare(g, h, tol);
}

std::vector<RegimeRow> transparency_report(const JointModel& m, const DemandCurve& p,
                                           const SolveResult& hidden,
                                           const TransparentSolution& transparent) {
  const TabularRule hidden_rule = rasterize(hidden.rule, m);
  const auto pay = seller_payoff(m, hidden_rule, p);
  const auto g = buyer_posterior_distribution(m, hidden_rule);
  const auto h = transparent_buyer_distribution(m, transparent.rule);
  const MpsVerdict v = compare_informativeness(m, p, hidden, transparent);
  const MpsVerdict rv = mps_compare(h, g);

  double ep_transparent = 0.0;
  for (std::size_t j = 0; j < m.ny(); ++j) {
    const double p_nd = p(transparent.per_y_x_nd[j]);
    for (std::size_t i = 0; i < m.nx(); ++i) {
      const double di = transparent.rule(j, i);
      ep_transparent += m.mass()(idx(j), idx(i)) * (di * p(m.x(i)) + (1.0 - di) * p_nd);
    }
  }
  return {
      {"hidden", pay.expected_sale_prob, pay.payoff, g.variance(), to_string(v.relation)},
      {"transparent", ep_transparent, transparent.total_value, h.variance(),
       to_string(rv.relation)},
  };
}

}  // namespace hmd

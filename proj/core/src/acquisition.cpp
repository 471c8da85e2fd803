#include "hmd/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hmd/errors.hpp"

namespace hmd {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_affine(const DemandCurve& p) {
  if (!p.is_affine() || !p.affine_coefficients()) {
    throw UnsupportedAssumption("precision choice requires affine demand, got " + p.name());
  }
}

bool unimodal(const std::vector<double>& v, double slack) {
  bool descending = false;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double step = v[k] - v[k - 1];
    if (step < -slack) descending = true;
    if (descending && step > slack) return false;
  }
  return true;
}

PosteriorDistribution atoms_of(const Grid1D& g) {
  std::vector<Atom> atoms;
  atoms.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) atoms.push_back({g.point(i), g.weight(i)});
  return PosteriorDistribution(std::move(atoms));
}

bool reflection_symmetric(const std::vector<double>& pts, const std::vector<double>& w,
                          double tol) {
  std::vector<std::size_t> keep;
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (w[i] > 0.0) {
      keep.push_back(i);
      total += w[i];
    }
  }
  if (keep.empty()) return true;
  double mu = 0.0;
  for (std::size_t i : keep) mu += pts[i] * w[i] / total;
  const double scale = std::max(1.0, std::abs(pts[keep.back()] - pts[keep.front()]));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const std::size_t a = keep[k];
    const std::size_t b = keep[keep.size() - 1 - k];
    if (std::abs(pts[a] + pts[b] - 2.0 * mu) > tol * scale) return false;
    if (std::abs(w[a] - w[b]) / total > tol) return false;
  }
  return true;
}

}  // namespace

double transparent_value_affine(const JointModel& m, const DemandCurve& p) {
  require_affine(p);
  const auto [a, b] = *p.affine_coefficients();
  const auto cond = conditional_mean_x(m);
  const Grid1D& fy = m.y_marginal();
  double s = 0.0;
  for (std::size_t j = 0; j < m.ny(); ++j) s += fy.weight(j) * m.y(j) * cond[j];
  return a * m.mean_y() + b * s;
}

PrecisionEvaluator::PrecisionEvaluator(const SignalFamily& fam, const DemandCurve& p,
                                       SolverSettings cfg)
    : fam_(fam), p_(p), cfg_(cfg) {}

const SolveResult& PrecisionEvaluator::solve(double theta) {
  auto it = solves_.find(theta);
  if (it == solves_.end()) {
    it = solves_.emplace(theta, solve_commitment(fam_.model_at(theta), p_, cfg_)).first;
  }
  return it->second;
}

PrecisionValue PrecisionEvaluator::value(double theta, double tau) {
  require_affine(p_);
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("tau must lie in [0,1]");
  const double pi0 = solve(theta).payoff;
  auto it = pi1_.find(theta);
  if (it == pi1_.end()) {
    it = pi1_.emplace(theta, transparent_value_affine(fam_.model_at(theta), p_)).first;
  }
  const double pi1 = it->second;
  return {theta, pi0, pi1, tau * pi1 + (1.0 - tau) * pi0};
}

PrecisionValue value_of_precision(const SignalFamily& fam, const DemandCurve& p, double theta,
                                  double tau, const SolverSettings& cfg) {
  PrecisionEvaluator eval(fam, p, cfg);
  return eval.value(theta, tau);
}

AcquisitionResult optimize_precision(PrecisionEvaluator& eval, double tau,
                                     const PrecisionSearch& search) {
  require_affine(eval.demand());
  if (search.curve_samples < 3 || search.dense_samples < 2 || !(search.bracket_tol > 0.0)) {
    throw InputError("invalid precision search settings");
  }
  const SignalFamily& fam = eval.family();
  const double lo = fam.precision_domain().lo;
  const double hi = fam.precision_domain().hi;
  auto net = [&](double theta) { return eval.value(theta, tau).mixed - fam.cost(theta); };
  auto at = [&](int k, int n) {
    return k == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  };

  AcquisitionResult res;
  res.tau = tau;
  const int n = search.curve_samples;
  std::vector<double> nets(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = at(k, n);
    res.value_curve.push_back(eval.value(theta, tau));
    nets[static_cast<std::size_t>(k)] = res.value_curve.back().mixed - fam.cost(theta);
  }

  double best_theta = lo;
  double best_net = nets[0];
  auto consider = [&](double theta, double v) {
    if (v > best_net + 1e-15 || (std::abs(v - best_net) <= 1e-15 && theta < best_theta)) {
      best_theta = theta;
      best_net = v;
    }
  };
  for (int k = 1; k < n; ++k) consider(at(k, n), nets[static_cast<std::size_t>(k)]);

  if (!unimodal(nets, 1e-12)) {
    res.fallback_used = true;
    res.warning = "net value curve is not unimodal; used dense grid argmax";
    for (int k = 0; k < search.dense_samples; ++k) {
      const double theta = at(k, search.dense_samples);
      consider(theta, net(theta));
    }
  } else {
    const auto kstar = static_cast<int>(std::max_element(nets.begin(), nets.end()) - nets.begin());
    double a = at(std::max(kstar - 1, 0), n);
    double b = at(std::min(kstar + 1, n - 1), n);
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = net(c);
    double fd = net(d);
    while (b - a > search.bracket_tol) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - r * (b - a);
        fc = net(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + r * (b - a);
        fd = net(d);
      }
    }
    consider(c, fc);
    consider(d, fd);
    const double mid = 0.5 * (a + b);
    consider(mid, net(mid));
    consider(lo, net(lo));
    consider(hi, net(hi));
  }

  const PrecisionValue v = eval.value(best_theta, tau);
  const SolveResult& s = eval.solve(best_theta);
  res.theta_star = best_theta;
  res.rule = s.rule;
  res.nd = s.nd;
  res.gross_value = v.mixed;
  res.net_value = v.mixed - fam.cost(best_theta);
  return res;
}

AcquisitionResult optimize_precision(const SignalFamily& fam, const DemandCurve& p, double tau,
                                     const SolverSettings& cfg, const PrecisionSearch& search) {
  PrecisionEvaluator eval(fam, p, cfg);
  return optimize_precision(eval, tau, search);
}

RegularityReport check_regular(const JointModel& m) {
  RegularityReport rep;
  const std::size_t nx = m.nx();
  const std::size_t ny = m.ny();
  if (nx < 2 || ny < 2) return rep;
  // Quadrant sums over i <= a, j <= b of mass, x-mass and y-mass.
  const Index rx = idx(nx), ry = idx(ny);
  Eigen::MatrixXd qm = Eigen::MatrixXd::Zero(ry + 1, rx + 1);
  Eigen::MatrixXd qx = qm, qy = qm;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double w = m.mass()(idx(j), idx(i));
      const Index J = idx(j + 1), I = idx(i + 1);
      qm(J, I) = w + qm(J - 1, I) + qm(J, I - 1) - qm(J - 1, I - 1);
      qx(J, I) = w * m.x(i) + qx(J - 1, I) + qx(J, I - 1) - qx(J - 1, I - 1);
      qy(J, I) = w * m.y(j) + qy(J - 1, I) + qy(J, I - 1) - qy(J - 1, I - 1);
    }
  }
  // Anchor (a, b) sits between x_a, x_{a+1} and y_b, y_{b+1}.
  const std::size_t na = nx - 1;
  const std::size_t nb = ny - 1;
  Eigen::MatrixXd res_x = Eigen::MatrixXd::Constant(idx(nb), idx(na), std::nan(""));
  Eigen::MatrixXd res_y = res_x;
  auto sum = [&](const Eigen::MatrixXd& q, Index a, Index b) {
    // Event: (x <= x_a, y > y_b) or (x > x_a, y <= y_b).
    const double low_x_high_y = q(ry, a + 1) - q(b + 1, a + 1);
    const double high_x_low_y = q(b + 1, rx) - q(b + 1, a + 1);
    return low_x_high_y + high_x_low_y;
  };
  for (std::size_t a = 0; a < na; ++a) {
    const double xh = 0.5 * (m.x(a) + m.x(a + 1));
    for (std::size_t b = 0; b < nb; ++b) {
      const double yh = 0.5 * (m.y(b) + m.y(b + 1));
      const double mass = sum(qm, idx(a), idx(b));
      if (!(mass > 1e-300)) continue;
      res_x(idx(b), idx(a)) = sum(qx, idx(a), idx(b)) / mass - xh;
      res_y(idx(b), idx(a)) = sum(qy, idx(a), idx(b)) / mass - yh;
    }
  }
  auto changes = [](double v0, double v1, double v2, double v3) {
    const double lo = std::min({v0, v1, v2, v3});
    const double hi = std::max({v0, v1, v2, v3});
    return lo <= 0.0 && hi >= 0.0;
  };
  struct Cell {
    std::size_t a, b;
  };
  std::vector<Cell> flagged;
  for (std::size_t a = 0; a + 1 < na; ++a) {
    for (std::size_t b = 0; b + 1 < nb; ++b) {
      const Index A = idx(a), B = idx(b);
      const double x0 = res_x(B, A), x1 = res_x(B, A + 1), x2 = res_x(B + 1, A), x3 = res_x(B + 1, A + 1);
      const double y0 = res_y(B, A), y1 = res_y(B, A + 1), y2 = res_y(B + 1, A), y3 = res_y(B + 1, A + 1);
      if (std::isnan(x0 + x1 + x2 + x3 + y0 + y1 + y2 + y3)) continue;
      if (changes(x0, x1, x2, x3) && changes(y0, y1, y2, y3)) flagged.push_back({a, b});
    }
  }
  // Single-linkage clusters with Chebyshev radius 2.
  std::vector<int> label(flagged.size(), -1);
  int clusters = 0;
  for (std::size_t s = 0; s < flagged.size(); ++s) {
    if (label[s] >= 0) continue;
    label[s] = clusters;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < flagged.size(); ++v) {
        if (label[v] >= 0) continue;
        const auto da = std::max(flagged[u].a, flagged[v].a) - std::min(flagged[u].a, flagged[v].a);
        const auto db = std::max(flagged[u].b, flagged[v].b) - std::min(flagged[u].b, flagged[v].b);
        if (da <= 2 && db <= 2) {
          label[v] = clusters;
          stack.push_back(v);
        }
      }
    }
    ++clusters;
  }
  rep.root_clusters = static_cast<std::size_t>(clusters);
  for (int c = 0; c < clusters; ++c) {
    bool interior = true;
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < flagged.size(); ++s) {
      if (label[s] != c) continue;
      const Cell& cell = flagged[s];
      if (cell.a == 0 || cell.b == 0 || cell.a + 2 == na || cell.b + 2 == nb) interior = false;
      // Cell centre: midway between its corner anchors.
      sx += 0.25 * (m.x(cell.a) + 2.0 * m.x(cell.a + 1) + m.x(cell.a + 2));
      sy += 0.25 * (m.y(cell.b) + 2.0 * m.y(cell.b + 1) + m.y(cell.b + 2));
      ++count;
    }
    const Anchors centre{sx / static_cast<double>(count), sy / static_cast<double>(count)};
    rep.cluster_centers.push_back(centre);
    if (interior) {
      ++rep.interior_clusters;
      rep.anchors = centre;
    }
  }
  rep.regular = rep.interior_clusters == 1;
  if (!rep.regular) rep.anchors.reset();
  return rep;
}

bool check_symmetric(const JointModel& m, double tol) {
  std::vector<double> pts, w;
  pts.assign(m.x_points().begin(), m.x_points().end());
  for (std::size_t j = 0; j < m.ny(); ++j) {
    w.resize(m.nx());
    for (std::size_t i = 0; i < m.nx(); ++i) w[i] = m.mass()(idx(j), idx(i));
    if (!reflection_symmetric(pts, w, tol)) return false;
  }
  pts.assign(m.y_points().begin(), m.y_points().end());
  for (std::size_t i = 0; i < m.nx(); ++i) {
    w.resize(m.ny());
    for (std::size_t j = 0; j < m.ny(); ++j) w[j] = m.mass()(idx(j), idx(i));
    if (!reflection_symmetric(pts, w, tol)) return false;
  }
  return true;
}

PosteriorDistribution optimal_buyer_distribution(PrecisionEvaluator& eval, double theta) {
  const JointModel m = eval.model(theta);
  return buyer_posterior_distribution(m, rasterize(eval.solve(theta).rule, m));
}

TauComparison compare_across_tau(PrecisionEvaluator& eval, double tau_hi, double tau_lo,
                                 const PrecisionSearch& search) {
  if (!(tau_hi > tau_lo)) throw InputError("compare_across_tau needs tau_hi > tau_lo");
  AcquisitionResult hi = optimize_precision(eval, tau_hi, search);
  AcquisitionResult lo = optimize_precision(eval, tau_lo, search);
  PosteriorDistribution fb_hi = optimal_buyer_distribution(eval, hi.theta_star);
  PosteriorDistribution fb_lo = optimal_buyer_distribution(eval, lo.theta_star);
  const MpsVerdict verdict = mps_compare(fb_lo, fb_hi);
  const JointModel m_hi = eval.model(hi.theta_star);
  const JointModel m_lo = eval.model(lo.theta_star);
  const bool rs = check_regular(m_hi).regular && check_symmetric(m_hi) &&
                  check_regular(m_lo).regular && check_symmetric(m_lo);
  if (rs && verdict.relation != MpsRelation::kMpsOf && verdict.relation != MpsRelation::kEqual) {
    throw ConsistencyError(std::string("regular symmetric signals but lower transparency F^B is ") +
                           to_string(verdict.relation) + " relative to higher transparency F^B");
  }
  return {verdict, std::move(hi), std::move(lo), std::move(fb_hi), std::move(fb_lo), rs};
}

FamilyCheck verify_signal_family(const SignalFamily& fam, const std::vector<double>& thetas) {
  FamilyCheck out;
  std::vector<double> ts = thetas;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.empty()) return out;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    if (!(fam.cost(ts[k]) > fam.cost(ts[k - 1]))) out.cost_increasing = false;
  }
  const Interval dom = fam.precision_domain();
  if (dom.contains(0.0)) {
    const JointModel m0 = fam.model_at(0.0);
    for (std::size_t j = 0; j < m0.ny(); ++j) {
      if (!(m0.y_marginal().weight(j) > 0.0)) continue;
      if (!conditional_x_given_y(m0, j).is_degenerate()) out.degenerate_at_zero = false;
    }
  }
  std::vector<JointModel> models;
  for (double t : ts) models.push_back(fam.model_at(t));
  const auto base_means = conditional_mean_x(models.front());
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto means = conditional_mean_x(models[k]);
    if (means.size() != base_means.size()) {
      out.conditional_means_invariant = false;
      continue;
    }
    for (std::size_t j = 0; j < means.size(); ++j) {
      if (std::abs(means[j] - base_means[j]) > 1e-9) out.conditional_means_invariant = false;
    }
  }
  for (std::size_t k = 1; k < models.size(); ++k) {
    const JointModel& a = models[k - 1];
    const JointModel& b = models[k];
    if (a.ny() != b.ny()) {
      out.mps_chain = false;
      continue;
    }
    for (std::size_t j = 0; j < a.ny(); ++j) {
      if (!(a.y_marginal().weight(j) > 0.0)) continue;
      const MpsVerdict v = mps_compare(atoms_of(conditional_x_given_y(b, j)),
                                       atoms_of(conditional_x_given_y(a, j)));
      if (v.relation != MpsRelation::kMpsOf && v.relation != MpsRelation::kEqual) out.mps_chain = false;
    }
  }
  return out;
}

bool precision_is_beneficial(PrecisionEvaluator& eval, const std::vector<double>& thetas,
                             const CompletionScore& score, double tol) {
  std::vector<double> ts = thetas;
  std::sort(ts.begin(), ts.end());
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const double s = score(optimal_buyer_distribution(eval, t));
    if (s < prev - tol) return false;
    prev = std::max(prev, s);
  }
  return true;
}

}  // namespace hmd

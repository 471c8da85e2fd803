#include "hmd/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "hmd/errors.hpp"

namespace hmd {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

struct Event {
  double mass = 0.0;
  double x_mass = 0.0;
};

Event concealment_event(const JointModel& m, double x_hat) {
  Event e;
  for (std::size_t i = 0; i < m.nx(); ++i) {
    const double dx = m.x(i) - x_hat;
    if (dx == 0.0) continue;
    for (std::size_t j = 0; j < m.ny(); ++j) {
      if (dx * m.y(j) < 0.0) {
        const double w = m.mass()(idx(j), idx(i));
        e.mass += w;
        e.x_mass += w * m.x(i);
      }
    }
  }
  return e;
}

// Positive-mass profitability range.
std::pair<double, double> y_range(const JointModel& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.ny(); ++j) {
    if (!(m.y_marginal().weight(j) > 0.0)) continue;
    lo = std::min(lo, m.y(j));
    hi = std::max(hi, m.y(j));
  }
  return {lo, hi};
}

struct RowAtoms {
  std::vector<double> x;
  std::vector<double> w;
};

RowAtoms row_atoms(const JointModel& m, std::size_t j) {
  RowAtoms r;
  for (std::size_t i = 0; i < m.nx(); ++i) {
    const double w = m.mass()(idx(j), idx(i));
    if (w > 0.0) {
      r.x.push_back(m.x(i));
      r.w.push_back(w);
    }
  }
  return r;
}

// For y > 0: every concealment set of the lowest values has a top cell that
// strictly prefers disclosure, and nobody gains against the lowest belief.
// For y < 0 the order is reversed. `better(a, b)` says belief a is strictly
// better than belief b for this row's seller.
template <class Better>
bool row_certificate(const RowAtoms& r, bool positive, Better better, std::size_t& checked) {
  const std::size_t n = r.x.size();
  double cm = 0.0;
  double cx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = positive ? k : n - 1 - k;
    cm += r.w[i];
    cx += r.w[i] * r.x[i];
    if (k == 0) continue;
    ++checked;
    if (!better(r.x[i], cx / cm)) return false;
  }
  const double sceptic = positive ? r.x.front() : r.x.back();
  for (double x : r.x) {
    ++checked;
    if (better(sceptic, x)) return false;
  }
  return true;
}

TransparentEquilibrium transparent_impl(
    const JointModel& m, const std::function<bool(double, double, double)>& better) {
  TransparentEquilibrium out{TabularRule::full_disclosure(m), {}};
  bool any_choice = false;
  for (std::size_t j = 0; j < m.ny(); ++j) {
    const double y = m.y(j);
    if (y == 0.0) continue;
    const RowAtoms r = row_atoms(m, j);
    if (r.x.size() < 2) continue;
    any_choice = true;
    const bool ok = row_certificate(
        r, y > 0.0, [&](double a, double b) { return better(y, a, b); }, out.certificate.checked);
    if (!ok) {
      out.certificate.passed = false;
      throw ConsistencyError("profitable concealment found at y = " + std::to_string(y));
    }
  }
  out.certificate.vacuous = !any_choice;
  return out;
}

}  // namespace

const char* to_string(EquilibriumRegime r) {
  switch (r) {
    case EquilibriumRegime::kUnravelFullDisclosure: return "unravel_full_disclosure";
    case EquilibriumRegime::kPartialDisclosure: return "partial_disclosure";
  }
  return "unravel_full_disclosure";
}

std::optional<double> consistency_gap(const JointModel& m, double x_hat) {
  const Event e = concealment_event(m, x_hat);
  if (!(e.mass > 0.0)) return std::nullopt;
  return e.x_mass / e.mass - x_hat;
}

EquilibriumResult solve_no_commitment(const JointModel& m, double tol) {
  EquilibriumResult res;
  const auto [ylo, yhi] = y_range(m);
  if (ylo >= 0.0 || yhi <= 0.0) {
    // Scepticism after an off-path concealment.
    res.regime = EquilibriumRegime::kUnravelFullDisclosure;
    res.x_hat = ylo >= 0.0 ? m.x_support().lo : m.x_support().hi;
    return res;
  }
  res.regime = EquilibriumRegime::kPartialDisclosure;

  std::vector<double> scan{m.x_support().lo};
  for (std::size_t i = 0; i < m.nx(); ++i) {
    if (i > 0) scan.push_back(0.5 * (m.x(i - 1) + m.x(i)));
    scan.push_back(m.x(i));
  }
  scan.push_back(m.x_support().hi);
  std::sort(scan.begin(), scan.end());
  scan.erase(std::unique(scan.begin(), scan.end()), scan.end());

  std::vector<std::optional<double>> g(scan.size());
  for (std::size_t k = 0; k < scan.size(); ++k) g[k] = consistency_gap(m, scan[k]);

  auto add_root = [&](double x) {
    const auto gx = consistency_gap(m, x);
    if (!gx || std::abs(*gx) > tol) {
      res.rejected_crossings.push_back(x);
      return;
    }
    for (const auto& r : res.roots) {
      if (std::abs(r.x_hat - x) <= 1e-9) return;
    }
    res.roots.push_back({x, *gx, concealment_event(m, x).mass});
  };

  for (std::size_t k = 0; k < scan.size(); ++k) {
    if (g[k] && *g[k] == 0.0) add_root(scan[k]);
  }
  for (std::size_t k = 0; k + 1 < scan.size(); ++k) {
    if (!g[k] || !g[k + 1]) continue;
    if (!((*g[k] > 0.0 && *g[k + 1] < 0.0) || (*g[k] < 0.0 && *g[k + 1] > 0.0))) continue;
    double a = scan[k];
    double b = scan[k + 1];
    double ga = *g[k];
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      const auto gm = consistency_gap(m, mid);
      if (!gm) break;
      if (*gm == 0.0) {
        a = b = mid;
        break;
      }
      if ((*gm > 0.0) == (ga > 0.0)) {
        a = mid;
        ga = *gm;
      } else {
        b = mid;
      }
    }
    // Prefer the end with the smaller gap.
    const auto ga_end = consistency_gap(m, a);
    const auto gb_end = consistency_gap(m, b);
    double pick = a;
    if (!ga_end || (gb_end && std::abs(*gb_end) < std::abs(*ga_end))) pick = b;
    add_root(pick);
  }

  if (res.roots.empty()) {
    throw ConsistencyError("no equilibrium threshold found; " +
                           std::to_string(res.rejected_crossings.size()) +
                           " crossings fell on jumps of the consistency gap");
  }
  std::sort(res.roots.begin(), res.roots.end(),
            [](const EquilibriumRoot& a, const EquilibriumRoot& b) { return a.x_hat < b.x_hat; });
  const EquilibriumRoot* best = &res.roots.front();
  for (const auto& r : res.roots) {
    if (r.nd_mass > best->nd_mass + 1e-12) best = &r;
  }
  res.x_hat = best->x_hat;
  res.residual = best->residual;
  res.nd_mass = best->nd_mass;
  return res;
}

TabularRule equilibrium_rule(const EquilibriumResult& res, const JointModel& m) {
  if (res.regime == EquilibriumRegime::kUnravelFullDisclosure) return TabularRule::full_disclosure(m);
  Eigen::MatrixXd d(idx(m.ny()), idx(m.nx()));
  for (std::size_t i = 0; i < m.nx(); ++i) {
    for (std::size_t j = 0; j < m.ny(); ++j) {
      d(idx(j), idx(i)) = (m.x(i) - res.x_hat) * m.y(j) >= 0.0 ? 1.0 : 0.0;
    }
  }
  return TabularRule(std::move(d));
}

CoincidenceVerdict commitment_coincidence(const JointModel& m, const DemandCurve& p, double tol,
                                          const SolverSettings& cfg) {
  if (!p.is_affine()) throw UnsupportedAssumption("coincidence check requires affine demand");
  CoincidenceVerdict v;
  const auto [ylo, yhi] = y_range(m);
  if (ylo == 0.0 && yhi == 0.0) {
    // Every threshold is payoff-equivalent and every belief is consistent.
    v.degenerate = true;
    v.coincide = true;
    return v;
  }
  SolverSettings c = cfg;
  c.require_positive_mean = false;
  const SolveResult sol = solve_commitment(m, p, c);
  v.commitment_x_bar = sol.rule.x_bar;
  v.commitment_y_bar = sol.rule.y_bar(sol.rule.x_bar);
  const EquilibriumResult eq = solve_no_commitment(m);
  if (std::abs(v.commitment_y_bar) > tol || eq.regime != EquilibriumRegime::kPartialDisclosure) {
    return v;
  }
  for (const auto& r : eq.roots) {
    if (std::abs(r.x_hat - v.commitment_x_bar) <= tol) {
      v.coincide = true;
      v.shared_threshold = r.x_hat;
      break;
    }
  }
  return v;
}

TransparentEquilibrium solve_no_commitment_transparent(const JointModel& m) {
  return transparent_impl(m, [](double y, double a, double b) { return y > 0.0 ? a > b : a < b; });
}

TransparentEquilibrium solve_no_commitment_transparent(const JointModel& m, const DemandCurve& p) {
  return transparent_impl(m, [&p](double y, double a, double b) { return y * p(a) > y * p(b); });
}

}  // namespace hmd

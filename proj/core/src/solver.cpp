#include "hmd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "hmd/errors.hpp"
#include "hmd/parallel.hpp"

namespace hmd {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

constexpr double kPayoffTie = 1e-12;
constexpr double kDuplicate = 1e-7;
constexpr std::size_t kSweepStarts = 16;

double quantile(const Grid1D& g, double q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += g.weight(i);
    if (acc >= q) return g.point(i);
  }
  return g.point(g.size() - 1);
}

bool better(const FixedPointCandidate& a, const FixedPointCandidate& b) {
  if (std::abs(a.payoff - b.payoff) > kPayoffTie) return a.payoff > b.payoff;
  if (a.anchors.x_nd != b.anchors.x_nd) return a.anchors.x_nd < b.anchors.x_nd;
  return a.anchors.y_nd < b.anchors.y_nd;
}

struct StartOutcome {
  std::optional<FixedPointCandidate> converged;
  FixedPointCandidate last;
};

StartOutcome iterate_from(const ThresholdEvaluator& ev, Anchors a, const SolverSettings& cfg,
                          double flip_mass, double span) {
  constexpr int kStall = 40;
  StartOutcome out;
  out.last.residual = std::numeric_limits<double>::infinity();
  double last_nd_mass = 0.0;
  auto residual = [](const Anchors& from, const NonDisclosurePosterior& nd) {
    return std::max(std::abs(nd.x_nd - from.x_nd), std::abs(nd.y_nd - from.y_nd));
  };
  int stall = 0;
  for (int it = 1; it <= cfg.max_iter && stall < kStall; ++it) {
    const auto e = ev.evaluate(a);
    const double r = residual(a, e.nd);
    if (r < 0.5 * out.last.residual) {
      stall = 0;
    } else {
      ++stall;
    }
    if (r < out.last.residual) {
      out.last = {a, e.payoff, r, it};
      last_nd_mass = e.nd.nd_mass;
    }
    if (r <= cfg.tol) {
      out.converged = FixedPointCandidate{a, e.payoff, r, it};
      return out;
    }
    // The anchor map is piecewise constant, so its image is often already a fixed point.
    const Anchors t{e.nd.x_nd, e.nd.y_nd};
    const auto et = ev.evaluate(t);
    const double rt = residual(t, et.nd);
    if (rt <= cfg.tol) {
      out.converged = FixedPointCandidate{t, et.payoff, rt, it};
      return out;
    }
    a.x_nd += cfg.damping * (t.x_nd - a.x_nd);
    a.y_nd += cfg.damping * (t.y_nd - a.y_nd);
  }
  if (cfg.accept_cell_flip && last_nd_mass > flip_mass) {
    const double bound = flip_mass * span / (last_nd_mass - flip_mass);
    if (out.last.residual <= bound) {
      out.converged = out.last;
      out.converged->grid_limited = true;
    }
  }
  return out;
}

}  // namespace

ThresholdRule threshold_from_anchors(double x_nd, double y_nd, const DemandCurve& p) {
  if (p.is_affine()) {
    return ThresholdRule{x_nd, [y_nd](double) { return y_nd; }};
  }
  const double p_nd = p(x_nd);
  const double slope = p.derivative(x_nd);
  auto eval = p;
  return ThresholdRule{x_nd, [=](double x) {
                         if (std::abs(x - x_nd) <= 1e-12 * std::max(1.0, std::abs(x_nd))) {
                           return y_nd;
                         }
                         const double den = p_nd - eval(x);
                         if (den == 0.0) {
                           throw InputError("demand is flat between " + std::to_string(x) +
                                            " and " + std::to_string(x_nd));
                         }
                         return y_nd * slope * (x_nd - x) / den;
                       }};
}

ThresholdEvaluator::ThresholdEvaluator(const JointModel& m, const DemandCurve& p)
    : m_(m),
      p_(p),
      px_(m.nx()),
      cum_mass_(Eigen::MatrixXd::Zero(idx(m.ny() + 1), idx(m.nx()))),
      cum_ymass_(Eigen::MatrixXd::Zero(idx(m.ny() + 1), idx(m.nx()))) {
  for (std::size_t i = 0; i < m.nx(); ++i) {
    px_[i] = p(m.x(i));
    for (std::size_t j = 0; j < m.ny(); ++j) {
      const double w = m.mass()(idx(j), idx(i));
      cum_mass_(idx(j + 1), idx(i)) = cum_mass_(idx(j), idx(i)) + w;
      cum_ymass_(idx(j + 1), idx(i)) = cum_ymass_(idx(j), idx(i)) + w * m.y(j);
    }
  }
}

ThresholdEvaluator::Evaluation ThresholdEvaluator::evaluate(const Anchors& a) const {
  return evaluate(threshold_from_anchors(a.x_nd, a.y_nd, p_));
}

ThresholdEvaluator::Evaluation ThresholdEvaluator::evaluate(const ThresholdRule& rule) const {
  const auto ys = m_.y_points();
  const Index top = idx(m_.ny());
  double nd_mass = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double disclosed = 0.0;
  for (std::size_t i = 0; i < m_.nx(); ++i) {
    const double x = m_.x(i);
    const double dx = x - rule.x_bar;
    const Index col = idx(i);
    double cm = 0.0;
    double cy = 0.0;
    if (dx > 0.0) {
      // Conceal y < y_bar.
      const double ybar = rule.threshold_at(x, m_.y_support());
      const Index k = std::lower_bound(ys.begin(), ys.end(), ybar) - ys.begin();
      cm = cum_mass_(k, col);
      cy = cum_ymass_(k, col);
    } else if (dx < 0.0) {
      // Conceal y > y_bar.
      const double ybar = rule.threshold_at(x, m_.y_support());
      const Index k = std::upper_bound(ys.begin(), ys.end(), ybar) - ys.begin();
      cm = cum_mass_(top, col) - cum_mass_(k, col);
      cy = cum_ymass_(top, col) - cum_ymass_(k, col);
    }
    nd_mass += cm;
    sx += cm * x;
    sy += cy;
    disclosed += px_[i] * (cum_ymass_(top, col) - cy);
  }
  Evaluation out;
  if (!(nd_mass > 0.0)) {
    out.nd = {m_.mean_x(), m_.mean_y(), 0.0};
    out.payoff = disclosed;
    return out;
  }
  out.nd = {sx / nd_mass, sy / nd_mass, nd_mass};
  out.payoff = disclosed + p_(out.nd.x_nd) * sy;
  return out;
}

SolveResult solve_commitment(const JointModel& m, const DemandCurve& p, const SolverSettings& cfg) {
  if (cfg.require_positive_mean && !(m.mean_y() > 0.0)) {
    throw InputError("commitment solver requires E(y) > 0, got " + std::to_string(m.mean_y()));
  }
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || !(cfg.damping > 0.0 && cfg.damping <= 1.0) ||
      cfg.anchor_grid < 1) {
    throw InputError("invalid solver settings");
  }
  const ThresholdEvaluator ev(m, p);
  const Interval xs = m.x_support();
  const Interval ys = m.y_support();

  std::vector<Anchors> starts;
  for (double qx : {0.25, 0.5, 0.75}) {
    for (double qy : {0.25, 0.5, 0.75}) {
      starts.push_back({quantile(m.x_marginal(), qx), quantile(m.y_marginal(), qy)});
    }
  }

  const auto g = static_cast<std::size_t>(cfg.anchor_grid);
  std::vector<FixedPointCandidate> sweep(g * g);
  parallel_for(g * g, cfg.threads, [&](std::size_t k) {
    const Anchors a{xs.lo + (static_cast<double>(k / g) + 0.5) / static_cast<double>(g) * xs.width(),
                    ys.lo + (static_cast<double>(k % g) + 0.5) / static_cast<double>(g) * ys.width()};
    sweep[k] = {a, ev.evaluate(a).payoff, 0.0, 0};
  });
  std::stable_sort(sweep.begin(), sweep.end(), better);
  for (std::size_t k = 0; k < std::min(kSweepStarts, sweep.size()); ++k) {
    starts.push_back(sweep[k].anchors);
  }

  if (cfg.seed_jitter > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-cfg.seed_jitter, cfg.seed_jitter);
    for (Anchors& a : starts) {
      a.x_nd = std::clamp(a.x_nd + u(rng) * xs.width(), xs.lo, xs.hi);
      a.y_nd = std::clamp(a.y_nd + u(rng) * ys.width(), ys.lo, ys.hi);
    }
  }

  const double flip_mass = 2.0 * m.mass().maxCoeff();
  const double span = std::max(xs.width(), ys.width());
  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t k) {
    outcomes[k] = iterate_from(ev, starts[k], cfg, flip_mass, span);
  });

  std::vector<FixedPointCandidate> found;
  std::optional<FixedPointCandidate> incumbent;
  for (const auto& o : outcomes) {
    if (!incumbent || o.last.residual < incumbent->residual) incumbent = o.last;
    if (!o.converged) continue;
    const auto dup = std::find_if(found.begin(), found.end(), [&](const FixedPointCandidate& c) {
      return std::abs(c.anchors.x_nd - o.converged->anchors.x_nd) <= kDuplicate &&
             std::abs(c.anchors.y_nd - o.converged->anchors.y_nd) <= kDuplicate;
    });
    if (dup == found.end()) found.push_back(*o.converged);
  }
  if (found.empty()) {
    throw SolverError("no self-consistent threshold rule within " + std::to_string(cfg.max_iter) +
                          " iterations",
                      incumbent);
  }
  std::stable_sort(found.begin(), found.end(), better);

  const FixedPointCandidate& best = found.front();
  SolveResult res;
  res.rule = threshold_from_anchors(best.anchors.x_nd, best.anchors.y_nd, p);
  res.nd = ev.evaluate(best.anchors).nd;
  res.payoff = best.payoff;
  res.iterations = best.iterations;
  res.residual = best.residual;
  res.grid_limited = best.grid_limited;
  for (const auto& c : found) {
    if (best.payoff - c.payoff <= cfg.tol) res.near_optimal.push_back(c);
  }
  res.candidates = std::move(found);
  return res;
}

FocReport foc_residual(const JointModel& m, const TabularRule& d, const DemandCurve& p) {
  FocReport rep;
  rep.nd = nd_posterior(m, d);
  const double p_nd = p(rep.nd.x_nd);
  const double slope = p.derivative(rep.nd.x_nd);
  const Index ny = idx(m.ny());
  const Index nx = idx(m.nx());
  rep.sign = Eigen::MatrixXi::Zero(ny, nx);
  rep.violation = Eigen::MatrixXi::Zero(ny, nx);
  for (Index i = 0; i < nx; ++i) {
    const double x = m.x(static_cast<std::size_t>(i));
    const double px = p(x);
    for (Index j = 0; j < ny; ++j) {
      const double y = m.y(static_cast<std::size_t>(j));
      const double g = y * (px - p_nd) - rep.nd.y_nd * slope * (x - rep.nd.x_nd);
      const int s = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
      rep.sign(j, i) = s;
      const double dj = d(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
      if ((s > 0 && dj < 1.0) || (s < 0 && dj > 0.0)) rep.violation(j, i) = 1;
    }
  }
  const auto& dp = d.disclose_prob();
  for (Index i = 0; i < nx; ++i) {
    for (Index j = 0; j < ny; ++j) {
      if (!rep.violation(j, i)) continue;
      ++rep.violations;
      bool boundary = false;
      for (Index dj = -1; dj <= 1 && !boundary; ++dj) {
        for (Index di = -1; di <= 1; ++di) {
          const Index jj = j + dj;
          const Index ii = i + di;
          if (jj < 0 || jj >= ny || ii < 0 || ii >= nx) continue;
          if (dp(jj, ii) != dp(j, i)) {
            boundary = true;
            break;
          }
        }
      }
      if (!boundary) ++rep.interior_violations;
    }
  }
  return rep;
}

namespace {

std::vector<std::size_t> block_edges(std::size_t cells, std::size_t blocks) {
  std::vector<std::size_t> e(blocks + 1);
  for (std::size_t b = 0; b <= blocks; ++b) e[b] = b * cells / blocks;
  return e;
}

OracleResult anchor_oracle(const JointModel& m, const DemandCurve& p, int n, int threads) {
  const auto g = static_cast<std::size_t>(n);
  const Interval xs = m.x_support();
  const Interval ys = m.y_support();
  std::vector<Anchors> grid(g * g);
  std::vector<double> payoff(g * g);
  parallel_for(g * g, threads, [&](std::size_t k) {
    const Anchors a{xs.lo + (static_cast<double>(k / g) + 0.5) / static_cast<double>(g) * xs.width(),
                    ys.lo + (static_cast<double>(k % g) + 0.5) / static_cast<double>(g) * ys.width()};
    grid[k] = a;
    payoff[k] = seller_payoff(m, rasterize(threshold_from_anchors(a.x_nd, a.y_nd, p), m), p).payoff;
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (payoff[k] > payoff[best] + kPayoffTie) best = k;
  }
  const Anchors a = grid[best];
  return {rasterize(threshold_from_anchors(a.x_nd, a.y_nd, p), m), payoff[best], a, grid.size()};
}

OracleResult tabular_oracle(const JointModel& m, const DemandCurve& p, int n, int threads) {
  const auto bx = std::min<std::size_t>(static_cast<std::size_t>(n), m.nx());
  const auto by = std::min<std::size_t>(static_cast<std::size_t>(n), m.ny());
  const auto ex = block_edges(m.nx(), bx);
  const auto ey = block_edges(m.ny(), by);
  const std::size_t blocks = bx * by;
  // Block aggregates: mass, x-mass, y-mass, and y p(x)-mass.
  std::vector<double> bm(blocks, 0.0), bxm(blocks, 0.0), bym(blocks, 0.0), byp(blocks, 0.0);
  for (std::size_t r = 0; r < by; ++r) {
    for (std::size_t c = 0; c < bx; ++c) {
      const std::size_t b = r * bx + c;
      for (std::size_t j = ey[r]; j < ey[r + 1]; ++j) {
        for (std::size_t i = ex[c]; i < ex[c + 1]; ++i) {
          const double w = m.mass()(idx(j), idx(i));
          bm[b] += w;
          bxm[b] += w * m.x(i);
          bym[b] += w * m.y(j);
          byp[b] += w * m.y(j) * p(m.x(i));
        }
      }
    }
  }
  const std::size_t count = std::size_t{1} << blocks;
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<std::pair<double, std::size_t>> chunk_best(chunks, {-1e300, 0});
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto& cb = chunk_best[c];
    const std::size_t hi = std::min(count, (c + 1) * kChunk);
    for (std::size_t mask = c * kChunk; mask < hi; ++mask) {
      double nm = 0.0, nx = 0.0, nyv = 0.0, disclosed = 0.0;
      for (std::size_t b = 0; b < blocks; ++b) {
        if (mask >> b & 1U) {
          disclosed += byp[b];
        } else {
          nm += bm[b];
          nx += bxm[b];
          nyv += bym[b];
        }
      }
      const double value = nm > 0.0 ? disclosed + p(nx / nm) * nyv : disclosed;
      if (value > cb.first + kPayoffTie) cb = {value, mask};
    }
  });
  auto best = chunk_best.front();
  for (const auto& cb : chunk_best) {
    if (cb.first > best.first + kPayoffTie) best = cb;
  }
  Eigen::MatrixXd d(idx(m.ny()), idx(m.nx()));
  for (std::size_t r = 0; r < by; ++r) {
    for (std::size_t c = 0; c < bx; ++c) {
      const double v = (best.second >> (r * bx + c) & 1U) ? 1.0 : 0.0;
      for (std::size_t j = ey[r]; j < ey[r + 1]; ++j) {
        for (std::size_t i = ex[c]; i < ex[c + 1]; ++i) d(idx(j), idx(i)) = v;
      }
    }
  }
  TabularRule rule(std::move(d));
  const double payoff = seller_payoff(m, rule, p).payoff;
  return {std::move(rule), payoff, std::nullopt, count};
}

}  // namespace

OracleResult brute_force_oracle(const JointModel& m, const DemandCurve& p, int n,
                                OracleFamily family, int threads) {
  if (n < 1) throw InputError("oracle grid size must be positive");
  switch (family) {
    case OracleFamily::kThresholdAnchors:
      if (n > 30) throw BudgetError("anchor oracle limited to n <= 30, got " + std::to_string(n));
      return anchor_oracle(m, p, n, threads);
    case OracleFamily::kExhaustiveTabular:
      if (n > 4) throw BudgetError("tabular oracle limited to n <= 4, got " + std::to_string(n));
      return tabular_oracle(m, p, n, threads);
  }
  throw InputError("unknown oracle family");
}

}  // namespace hmd

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmd/demand.hpp"
#include "hmd/disclosure.hpp"
#include "hmd/joint_model.hpp"

namespace hmd {

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 500;
  int anchor_grid = 25;
  double damping = 0.5;
  // Random perturbation of the multi-start seeds, as a fraction of the support width.
  double seed_jitter = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  // The commitment problem assumes E(y) > 0; callers studying the
  // no-commitment game may switch the check off.
  bool require_positive_mean = true;
  // On a grid the anchor map can cycle between rules that differ in one or
  // two boundary cells, so no rule is exactly self-consistent. When set, a
  // stalled iteration is accepted if its residual is within the shift of the
  // non-disclosure means caused by flipping two cells.
  bool accept_cell_flip = true;
};

/// Non-disclosure posterior means that pin down a threshold rule.
struct Anchors {
  double x_nd = 0.0;
  double y_nd = 0.0;
};

struct FixedPointCandidate {
  Anchors anchors;
  double payoff = 0.0;
  double residual = 0.0;
  int iterations = 0;
  // Accepted through the cell-flip bound rather than tol.
  bool grid_limited = false;
};

struct SolveResult {
  ThresholdRule rule;
  NonDisclosurePosterior nd;
  double payoff = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool grid_limited = false;
  // Every distinct self-consistent candidate found, best first.
  std::vector<FixedPointCandidate> candidates;
  // Candidates whose payoff is within tol of the optimum.
  std::vector<FixedPointCandidate> near_optimal;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::optional<FixedPointCandidate> incumbent)
      : std::runtime_error(what), incumbent_(incumbent) {}
  const std::optional<FixedPointCandidate>& incumbent() const { return incumbent_; }

 private:
  std::optional<FixedPointCandidate> incumbent_;
};

/// Threshold rule implied by non-disclosure anchors:
///   x_bar = x_nd,
///   y_bar(x) = y_nd p'(x_nd)(x_nd - x) / (p(x_nd) - p(x)),
/// with y_bar(x_nd) = y_nd and y_bar == y_nd for affine p. Evaluating y_bar
/// at x != x_nd with p(x) == p(x_nd) throws InputError.
ThresholdRule threshold_from_anchors(double x_nd, double y_nd, const DemandCurve& p);

/// Fast evaluation of threshold rules on a fixed model via per-column prefix
/// sums over profitability. Agrees with rasterize + seller_payoff.
class ThresholdEvaluator {
 public:
  struct Evaluation {
    NonDisclosurePosterior nd;
    double payoff = 0.0;
  };

  ThresholdEvaluator(const JointModel& m, const DemandCurve& p);

  Evaluation evaluate(const Anchors& a) const;
  Evaluation evaluate(const ThresholdRule& rule) const;

 private:
  const JointModel& m_;
  const DemandCurve& p_;
  std::vector<double> px_;
  // cum_mass_(j, i) = sum_{j' < j} mass(j', i); rows = ny + 1.
  Eigen::MatrixXd cum_mass_;
  Eigen::MatrixXd cum_ymass_;
};

/// Optimal disclosure under commitment, searched over the two-parameter
/// threshold family with self-consistency x_bar = x_nd, y_bar(x_nd) = y_nd.
///
/// Candidates come from damped fixed-point iteration on the anchor map
/// (anchors -> rule -> recomputed anchors) started from a 3x3 quantile grid
/// and from the best points of an anchor_grid x anchor_grid sweep. The best
/// self-consistent candidate by (payoff desc, x_bar asc) is returned.
/// Throws InputError if E(y) <= 0 (unless disabled) and SolverError when no
/// candidate reaches the tolerance.
SolveResult solve_commitment(const JointModel& m, const DemandCurve& p,
                             const SolverSettings& cfg = {});

/// Per-cell sign of dPi/dd(y,x) = y(p(x) - p(x_nd)) - y_nd p'(x_nd)(x - x_nd).
struct FocReport {
  Eigen::MatrixXi sign;       // +1, 0, -1 per cell
  Eigen::MatrixXi violation;  // 1 where d contradicts the sign
  std::size_t violations = 0;
  // Violations not adjacent (8-neighbourhood) to a change in the rule.
  std::size_t interior_violations = 0;
  NonDisclosurePosterior nd;
};

/// Uses the off-path convention of nd_posterior when nothing is concealed.
FocReport foc_residual(const JointModel& m, const TabularRule& d, const DemandCurve& p);

enum class OracleFamily {
  kThresholdAnchors,   // n x n anchor grid, rules from threshold_from_anchors
  kExhaustiveTabular,  // every {0,1} rule constant on an n x n block partition
};

struct OracleResult {
  TabularRule rule;
  double payoff = 0.0;
  std::optional<Anchors> anchors;
  std::size_t evaluated = 0;
};

/// Ground truth by enumeration; independent of solve_commitment. Budgets:
/// n <= 30 for anchors, n <= 4 for exhaustive tabular (2^(n^2) rules).
OracleResult brute_force_oracle(const JointModel& m, const DemandCurve& p, int n,
                                OracleFamily family, int threads = 1);

}  // namespace hmd

#pragma once

#include <string>
#include <vector>

#include "hmd/demand.hpp"
#include "hmd/disclosure.hpp"
#include "hmd/informativeness.hpp"
#include "hmd/joint_model.hpp"
#include "hmd/solver.hpp"

namespace hmd {

/// Seller's problem when the buyer also observes profitability: one
/// independent disclosure problem per y.
struct TransparentSolution {
  TabularRule rule;                   // row j is d_{y_j}
  std::vector<double> per_y_x_nd;     // buyer's posterior after non-disclosure, given y_j
  std::vector<double> per_y_payoff;   // y_j P(y_j, d_{y_j})
  double total_value = 0.0;           // sum_j F_Y(y_j) per_y_payoff[j]
  std::string convention;             // how indifference was resolved
};

/// Per-row posterior after non-disclosure, given the buyer knows y_j.
/// Off-path rows use E(x | y_j).
std::vector<double> transparent_nd_posteriors(const JointModel& m, const TabularRule& d);

/// Pi^1(d): seller payoff when y is observed by the buyer.
double transparent_value(const JointModel& m, const TabularRule& d, const DemandCurve& p);

/// Optimal transparent policy. sign(y) p strictly concave: conceal all;
/// strictly convex: disclose all; affine or y = 0: disclose all (indifference,
/// canonical choice). Mixed curvature: best Dye cutoff per row, disclosing
/// x >= t when y > 0 and x <= t when y < 0.
TransparentSolution solve_transparent(const JointModel& m, const DemandCurve& p);

/// tau Pi^1(d) + (1 - tau) Pi^0(d).
double mixed_objective_value(const JointModel& m, const DemandCurve& p, const TabularRule& d,
                             double tau);

/// F^B when y is observed: mixture over y of the per-y posterior distributions.
PosteriorDistribution transparent_buyer_distribution(const JointModel& m, const TabularRule& d);

/// mps_compare(F^B hidden, F^B transparent). Throws ConsistencyError on a mean mismatch.
MpsVerdict compare_informativeness(const JointModel& m, const DemandCurve& p,
                                   const SolveResult& hidden, const TransparentSolution& transparent,
                                   double tol = -1.0);

struct RegimeRow {
  std::string regime;
  double expected_sale_prob = 0.0;
  double payoff = 0.0;
  double fb_variance = 0.0;
  std::string verdict;
};

/// Report rows for the hidden-motives optimum and the transparent benchmark.
std::vector<RegimeRow> transparency_report(const JointModel& m, const DemandCurve& p,
                                           const SolveResult& hidden,
                                           const TransparentSolution& transparent);

}  // namespace hmd

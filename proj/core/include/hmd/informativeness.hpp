#pragma once

#include <functional>

#include "hmd/disclosure.hpp"

namespace hmd {

enum class MpsRelation { kMpsOf, kMpsBy, kEqual, kIncomparable };

const char* to_string(MpsRelation r);

/// Outcome of comparing G against H in the convex (mean-preserving spread) order.
struct MpsVerdict {
  MpsRelation relation = MpsRelation::kIncomparable;
  // Largest tolerance breach of the reported relation; for incomparable, the
  // smaller of the two directional breaches.
  double max_violation = 0.0;
  // max_t of the integrated cdf difference I_G(t) - I_H(t); positive means G
  // is strictly more spread somewhere.
  double max_gap = 0.0;
  double min_gap = 0.0;
  bool mean_mismatch = false;
};

/// G is an MPS of H iff means agree and
///   int_{x_min}^t (F_G - F_H) >= -tol for every t.
/// Integrated cdfs are piecewise linear between support points, so checking
/// the merged support is exact. A negative tol selects the default
/// 1e-9 * (support width).
MpsVerdict mps_compare(const PosteriorDistribution& g, const PosteriorDistribution& h,
                       double tol = -1.0);

using CompletionScore = std::function<double(const PosteriorDistribution&)>;

/// Variance of posterior means; the default completion of the Blackwell order.
double completion_score(const PosteriorDistribution& g);

/// E[phi(X)] for a caller-supplied convex phi; MPS-monotone for any convex phi.
CompletionScore convex_functional_score(std::function<double(double)> phi);

}  // namespace hmd

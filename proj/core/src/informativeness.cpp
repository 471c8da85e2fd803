#include "hmd/informativeness.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hmd {

const char* to_string(MpsRelation r) {
  switch (r) {
    case MpsRelation::kMpsOf: return "mps_of";
    case MpsRelation::kMpsBy: return "mps_by";
    case MpsRelation::kEqual: return "equal";
    case MpsRelation::kIncomparable: return "incomparable";
  }
  return "incomparable";
}

MpsVerdict mps_compare(const PosteriorDistribution& g, const PosteriorDistribution& h, double tol) {
  MpsVerdict v;
  const auto& ga = g.atoms();
  const auto& ha = h.atoms();
  if (ga.empty() || ha.empty()) {
    v.mean_mismatch = true;
    return v;
  }
  const double lo = std::min(ga.front().value, ha.front().value);
  const double hi = std::max(ga.back().value, ha.back().value);
  if (tol < 0.0) tol = 1e-9 * (hi > lo ? hi - lo : 1.0);

  if (std::abs(g.mean() - h.mean()) > tol) {
    v.mean_mismatch = true;
    v.relation = MpsRelation::kIncomparable;
    v.max_violation = std::abs(g.mean() - h.mean());
    return v;
  }

  std::vector<double> support;
  support.reserve(ga.size() + ha.size());
  for (const Atom& a : ga) support.push_back(a.value);
  for (const Atom& a : ha) support.push_back(a.value);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  const double gm = g.total_mass();
  const double hm = h.total_mass();
  std::size_t gi = 0;
  std::size_t hi_idx = 0;
  double fg = 0.0;
  double fh = 0.0;
  double ig = 0.0;
  double ih = 0.0;
  double max_gap = 0.0;
  double min_gap = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (k > 0) {
      const double dt = support[k] - support[k - 1];
      ig += fg * dt;
      ih += fh * dt;
      const double gap = ig - ih;
      max_gap = std::max(max_gap, gap);
      min_gap = std::min(min_gap, gap);
    }
    while (gi < ga.size() && ga[gi].value <= support[k]) fg += ga[gi++].mass / gm;
    while (hi_idx < ha.size() && ha[hi_idx].value <= support[k]) fh += ha[hi_idx++].mass / hm;
  }
  v.max_gap = max_gap;
  v.min_gap = min_gap;

  const bool g_spreads = min_gap >= -tol;
  const bool h_spreads = max_gap <= tol;
  if (g_spreads && h_spreads) {
    v.relation = MpsRelation::kEqual;
    v.max_violation = std::max(-min_gap, max_gap);
  } else if (g_spreads) {
    v.relation = MpsRelation::kMpsOf;
    v.max_violation = std::max(0.0, -min_gap);
  } else if (h_spreads) {
    v.relation = MpsRelation::kMpsBy;
    v.max_violation = std::max(0.0, max_gap);
  } else {
    v.relation = MpsRelation::kIncomparable;
    v.max_violation = std::min(-min_gap, max_gap);
  }
  return v;
}

double completion_score(const PosteriorDistribution& g) { return g.variance(); }

CompletionScore convex_functional_score(std::function<double(double)> phi) {
  return [phi = std::move(phi)](const PosteriorDistribution& g) {
    double s = 0.0;
    for (const Atom& a : g.atoms()) s += a.mass * phi(a.value);
    return s / g.total_mass();
  };
}

}  // namespace hmd

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmd/demand.hpp"
#include "hmd/informativeness.hpp"
#include "hmd/signal_family.hpp"
#include "hmd/solver.hpp"

namespace hmd {

struct PrecisionValue {
  double theta = 0.0;
  double pi0 = 0.0;  // optimal hidden-motives payoff at theta
  double pi1 = 0.0;  // transparent payoff, a E(y) + b E[y E(x|y)]
  double mixed = 0.0;
};

/// a E(y) + b E[y E(x|y)]; requires affine p.
double transparent_value_affine(const JointModel& m, const DemandCurve& p);

/// Caches per-precision commitment solves so sweeps over tau reuse them.
/// Holds its own copies of the family and the demand curve.
class PrecisionEvaluator {
 public:
  PrecisionEvaluator(const SignalFamily& fam, const DemandCurve& p, SolverSettings cfg = {});

  /// Throws UnsupportedAssumption unless p is affine.
  PrecisionValue value(double theta, double tau);
  const SolveResult& solve(double theta);
  JointModel model(double theta) const { return fam_.model_at(theta); }

  const SignalFamily& family() const { return fam_; }
  const DemandCurve& demand() const { return p_; }
  std::size_t cached() const { return solves_.size(); }

 private:
  SignalFamily fam_;
  DemandCurve p_;
  SolverSettings cfg_;
  std::map<double, SolveResult> solves_;
  std::map<double, double> pi1_;
};

PrecisionValue value_of_precision(const SignalFamily& fam, const DemandCurve& p, double theta,
                                  double tau, const SolverSettings& cfg = {});

struct AcquisitionResult {
  double tau = 0.0;
  double theta_star = 0.0;
  ThresholdRule rule;
  NonDisclosurePosterior nd;
  double gross_value = 0.0;
  double net_value = 0.0;
  std::vector<PrecisionValue> value_curve;
  bool fallback_used = false;
  std::string warning;
};

struct PrecisionSearch {
  int curve_samples = 21;
  int dense_samples = 201;
  double bracket_tol = 1e-4;
};

/// argmax_theta tau Pi1 + (1 - tau) Pi0(theta) - c(theta): golden-section
/// search around the best sample of the value curve plus endpoint checks.
/// Falls back to a dense grid argmax (with a warning) when the sampled
/// curve is not unimodal.
AcquisitionResult optimize_precision(PrecisionEvaluator& eval, double tau,
                                     const PrecisionSearch& search = {});
AcquisitionResult optimize_precision(const SignalFamily& fam, const DemandCurve& p, double tau,
                                     const SolverSettings& cfg = {},
                                     const PrecisionSearch& search = {});

struct RegularityReport {
  bool regular = false;
  std::size_t root_clusters = 0;
  std::size_t interior_clusters = 0;
  std::optional<Anchors> anchors;
  std::vector<Anchors> cluster_centers;
};

/// Scans the moment equations
///   E[x | (x - xh)(y - yh) < 0] = xh,  E[y | (x - xh)(y - yh) < 0] = yh
/// over anchors placed between adjacent grid points, flags lattice cells
/// where both residuals change sign, and clusters flagged cells within two
/// lattice cells. Regular iff exactly one cluster is interior.
RegularityReport check_regular(const JointModel& m);

/// Every F_{X|y} and every F_{Y|x} reflection-symmetric about its mean.
bool check_symmetric(const JointModel& m, double tol = 1e-9);

struct TauComparison {
  MpsVerdict verdict;  // mps_compare(F^B at tau_lo, F^B at tau_hi)
  AcquisitionResult hi;
  AcquisitionResult lo;
  PosteriorDistribution fb_hi;
  PosteriorDistribution fb_lo;
  bool regular_symmetric = false;
};

/// Optimal (theta, d) at both transparency levels and the F^B comparison.
/// Throws ConsistencyError if both signals are regular and symmetric yet
/// F^B(tau_lo) is not certified as an MPS of F^B(tau_hi).
TauComparison compare_across_tau(PrecisionEvaluator& eval, double tau_hi, double tau_lo,
                                 const PrecisionSearch& search = {});

PosteriorDistribution optimal_buyer_distribution(PrecisionEvaluator& eval, double theta);

struct FamilyCheck {
  bool cost_increasing = true;
  bool mps_chain = true;
  bool degenerate_at_zero = true;
  bool conditional_means_invariant = true;
  bool ok() const { return cost_increasing && mps_chain && degenerate_at_zero && conditional_means_invariant; }
};

/// Samples the signal-family invariants on the given precision grid.
FamilyCheck verify_signal_family(const SignalFamily& fam, const std::vector<double>& thetas);

/// True if the completion score of the optimally disclosed F^B is weakly
/// increasing along the (sorted) precision grid.
bool precision_is_beneficial(PrecisionEvaluator& eval, const std::vector<double>& thetas,
                             const CompletionScore& score, double tol = 1e-9);

}  // namespace hmd

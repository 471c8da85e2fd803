#pragma once

#include <optional>
#include <vector>

#include "hmd/demand.hpp"
#include "hmd/disclosure.hpp"
#include "hmd/joint_model.hpp"
#include "hmd/solver.hpp"

namespace hmd {

enum class EquilibriumRegime { kUnravelFullDisclosure, kPartialDisclosure };

const char* to_string(EquilibriumRegime r);

struct EquilibriumRoot {
  double x_hat = 0.0;
  double residual = 0.0;
  double nd_mass = 0.0;
};

struct EquilibriumResult {
  EquilibriumRegime regime = EquilibriumRegime::kUnravelFullDisclosure;
  double x_hat = 0.0;  // selected threshold; in the unravelling regime, the off-path belief
  double residual = 0.0;
  double nd_mass = 0.0;
  std::vector<EquilibriumRoot> roots;
  // Sign changes of g that landed on a jump of the discretized map and were
  // therefore not reported as roots.
  std::vector<double> rejected_crossings;
};

/// E[x | (x - x_hat) y < 0] - x_hat; nullopt when the event has zero mass.
std::optional<double> consistency_gap(const JointModel& m, double x_hat);

/// Voluntary disclosure without commitment. One-signed profitability
/// unravels to full disclosure; otherwise every root of the consistency gap
/// is reported and the one with the largest non-disclosure mass is selected
/// (smallest x_hat on ties).
EquilibriumResult solve_no_commitment(const JointModel& m, double tol = 1e-8);

/// Disclose iff (x - x_hat) y >= 0; d == 1 in the unravelling regime.
TabularRule equilibrium_rule(const EquilibriumResult& res, const JointModel& m);

struct CoincidenceVerdict {
  bool coincide = false;
  bool degenerate = false;
  double commitment_x_bar = 0.0;
  double commitment_y_bar = 0.0;
  std::optional<double> shared_threshold;
};

/// Whether the commitment optimum has y_bar = 0 and an x_bar that is also an
/// equilibrium threshold of the no-commitment game. Requires affine p.
CoincidenceVerdict commitment_coincidence(const JointModel& m, const DemandCurve& p,
                                          double tol = 1e-6, const SolverSettings& cfg = {});

struct DeviationCertificate {
  bool passed = true;
  bool vacuous = false;
  std::size_t checked = 0;
};

struct TransparentEquilibrium {
  TabularRule rule;
  DeviationCertificate certificate;
};

/// Full disclosure under transparency, with a per-profitability unravelling
/// certificate: for y > 0 every concealment set made of the lowest values
/// has a top cell that strictly prefers disclosure (mirrored for y < 0), and
/// no cell gains by concealing against the sceptical off-path belief.
/// Beliefs are ranked directly, which is valid for every strictly increasing
/// demand; the overload with p also checks payoffs y p(.). Throws
/// ConsistencyError if the certificate fails.
TransparentEquilibrium solve_no_commitment_transparent(const JointModel& m);
TransparentEquilibrium solve_no_commitment_transparent(const JointModel& m, const DemandCurve& p);

}  // namespace hmd

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hmd/grid.hpp"

namespace hmd {

enum class Curvature { kAffine, kStrictlyConvex, kStrictlyConcave, kOther };

const char* to_string(Curvature c);

struct AffineCoefficients {
  double a = 0.0;  // intercept
  double b = 0.0;  // slope
};

/// Buyer demand: sale probability as a function of the posterior mean value.
class DemandCurve {
 public:
  using Fn = std::function<double(double)>;

  DemandCurve(std::string name, Fn eval, Fn derivative, Curvature tag,
              std::optional<AffineCoefficients> affine = std::nullopt);

  /// p(x) = a + b x. Derivative and evaluation are exact.
  static DemandCurve affine(double a, double b);
  /// p(x) = shift + scale * x^k on x >= 0; convex for k > 1, concave for k < 1.
  static DemandCurve power(double k, double scale = 1.0, double shift = 0.0);
  /// Logistic cdf 1 / (1 + exp(-slope (x - center))); mixed curvature.
  static DemandCurve logistic(double center, double slope);
  /// Arbitrary evaluator. The derivative is a central finite difference with
  /// step 1e-5 * (x_max - x_min); the curvature tag is classified on a
  /// 101-point grid of the domain.
  static DemandCurve numeric(std::string name, Fn eval, Interval domain);

  double operator()(double x) const { return eval_(x); }
  double derivative(double x) const { return derivative_(x); }
  Curvature curvature() const { return tag_; }
  const std::optional<AffineCoefficients>& affine_coefficients() const { return affine_; }
  bool is_affine() const { return tag_ == Curvature::kAffine; }
  const std::string& name() const { return name_; }

  /// Throws InputError unless p is strictly increasing with values in [0,1] on the grid.
  void validate(const Grid1D& grid) const;

 private:
  std::string name_;
  Fn eval_;
  Fn derivative_;
  Curvature tag_;
  std::optional<AffineCoefficients> affine_;
};

/// Sign pattern of second differences of p on the grid. Differences with
/// magnitude below 1e-9 count as zero; all zero is affine, mixed signs are
/// kOther. Requires at least three points.
Curvature classify_curvature(const DemandCurve& p, const Grid1D& grid);

}  // namespace hmd

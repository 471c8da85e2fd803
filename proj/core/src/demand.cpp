#include "hmd/demand.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "hmd/errors.hpp"

namespace hmd {

namespace {
constexpr double kCurvatureZero = 1e-9;
}

const char* to_string(Curvature c) {
  switch (c) {
    case Curvature::kAffine: return "affine";
    case Curvature::kStrictlyConvex: return "strictly_convex";
    case Curvature::kStrictlyConcave: return "strictly_concave";
    case Curvature::kOther: return "other";
  }
  return "other";
}

DemandCurve::DemandCurve(std::string name, Fn eval, Fn derivative, Curvature tag,
                         std::optional<AffineCoefficients> affine)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      derivative_(std::move(derivative)),
      tag_(tag),
      affine_(affine) {
  if (tag_ == Curvature::kAffine && !affine_) {
    throw InputError("affine demand requires coefficients");
  }
}

DemandCurve DemandCurve::affine(double a, double b) {
  if (!(b > 0.0)) throw InputError("affine demand must have positive slope");
  return DemandCurve(
      "affine", [a, b](double x) { return a + b * x; }, [b](double) { return b; },
      Curvature::kAffine, AffineCoefficients{a, b});
}

DemandCurve DemandCurve::power(double k, double scale, double shift) {
  if (!(k > 0.0) || !(scale > 0.0)) throw InputError("power demand needs k > 0 and scale > 0");
  if (k == 1.0) {
    auto d = affine(shift, scale);
    return d;
  }
  const Curvature tag = k > 1.0 ? Curvature::kStrictlyConvex : Curvature::kStrictlyConcave;
  return DemandCurve(
      "power", [=](double x) { return shift + scale * std::pow(x, k); },
      [=](double x) { return scale * k * std::pow(x, k - 1.0); }, tag);
}

DemandCurve DemandCurve::logistic(double center, double slope) {
  if (!(slope > 0.0)) throw InputError("logistic demand needs a positive slope");
  auto f = [=](double x) { return 1.0 / (1.0 + std::exp(-slope * (x - center))); };
  auto df = [=](double x) {
    const double v = 1.0 / (1.0 + std::exp(-slope * (x - center)));
    return slope * v * (1.0 - v);
  };
  return DemandCurve("logistic", f, df, Curvature::kOther);
}

DemandCurve DemandCurve::numeric(std::string name, Fn eval, Interval domain) {
  if (!(domain.hi > domain.lo)) throw InputError("numeric demand needs a nondegenerate domain");
  const double h = 1e-5 * domain.width();
  Fn df = [eval, h](double x) { return (eval(x + h) - eval(x - h)) / (2.0 * h); };
  DemandCurve probe(name, eval, df, Curvature::kOther);
  const Curvature tag = classify_curvature(probe, Grid1D::uniform(domain.lo, domain.hi, 101));
  if (tag == Curvature::kAffine) {
    const double b = (eval(domain.hi) - eval(domain.lo)) / domain.width();
    const double a = eval(domain.lo) - b * domain.lo;
    return DemandCurve(std::move(name), eval, df, tag, AffineCoefficients{a, b});
  }
  return DemandCurve(std::move(name), std::move(eval), std::move(df), tag);
}

void DemandCurve::validate(const Grid1D& grid) const {
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = eval_(grid.point(i));
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("demand " + name_ + " leaves [0,1] at x = " + std::to_string(grid.point(i)));
    }
    if (i > 0 && !(v > prev)) {
      throw InputError("demand " + name_ + " is not strictly increasing at x = " +
                       std::to_string(grid.point(i)));
    }
    prev = v;
  }
}

Curvature classify_curvature(const DemandCurve& p, const Grid1D& grid) {
  if (grid.size() < 3) throw InputError("curvature classification needs at least three points");
  bool pos = false;
  bool neg = false;
  bool zero = false;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double x0 = grid.point(i - 1);
    const double x1 = grid.point(i);
    const double x2 = grid.point(i + 1);
    // Second difference scaled to the uniform-grid convention so that
    // non-uniform spacing does not masquerade as curvature.
    const double h = 0.5 * (x2 - x0);
    const double s1 = (p(x1) - p(x0)) / (x1 - x0);
    const double s2 = (p(x2) - p(x1)) / (x2 - x1);
    const double d2 = (s2 - s1) * h;
    if (std::abs(d2) < kCurvatureZero) {
      zero = true;
    } else if (d2 > 0.0) {
      pos = true;
    } else {
      neg = true;
    }
  }
  if (!pos && !neg) return Curvature::kAffine;
  if (pos && !neg && !zero) return Curvature::kStrictlyConvex;
  if (neg && !pos && !zero) return Curvature::kStrictlyConcave;
  return Curvature::kOther;
}

}  // namespace hmd

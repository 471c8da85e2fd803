#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hmd/grid.hpp"
#include "hmd/joint_model.hpp"

namespace hmd {

/// Cost of acquiring a signal of precision theta. Must be strictly increasing.
class CostFunction {
 public:
  CostFunction(std::string description, std::function<double(double)> fn);

  /// c(theta) = k * theta^q with k > 0, q >= 1.
  static CostFunction power(double k, double q);
  /// Piecewise-linear interpolation through (theta, cost) knots.
  static CostFunction tabulated(std::vector<double> thetas, std::vector<double> costs);

  double operator()(double theta) const { return fn_(theta); }
  const std::string& description() const { return description_; }

 private:
  std::string description_;
  std::function<double(double)> fn_;
};

/// Precision-indexed family of joint models.
class SignalFamily {
 public:
  SignalFamily(std::string name, Interval precision_domain,
               std::function<JointModel(double)> model_at,
               std::function<Interval(double)> support_at, CostFunction cost);

  const std::string& name() const { return name_; }
  const Interval& precision_domain() const { return domain_; }
  /// Throws DomainError outside the precision domain.
  JointModel model_at(double theta) const;
  Interval support_at(double theta) const;
  double cost(double theta) const { return cost_(theta); }
  const CostFunction& cost_function() const { return cost_; }

 private:
  void check(double theta) const;

  std::string name_;
  Interval domain_;
  std::function<JointModel(double)> model_at_;
  std::function<Interval(double)> support_at_;
  CostFunction cost_;
};

/// Evidence equals the true value with probability theta and is independent
/// noise otherwise; posterior means are U[(1-theta)/2, (1+theta)/2] for every
/// profitability, independent of y. At theta = 0 the value grid collapses to
/// a single atom at 1/2.
SignalFamily uniform_replacement_family(std::size_t n_cells, Grid1D y_dist, CostFunction cost);

}  // namespace hmd

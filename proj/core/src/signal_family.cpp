#include "hmd/signal_family.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hmd/errors.hpp"

namespace hmd {

CostFunction::CostFunction(std::string description, std::function<double(double)> fn)
    : description_(std::move(description)), fn_(std::move(fn)) {}

CostFunction CostFunction::power(double k, double q) {
  if (!(k > 0.0) || !(q >= 1.0)) throw InputError("power cost needs k > 0 and q >= 1");
  return CostFunction("power(k=" + std::to_string(k) + ",q=" + std::to_string(q) + ")",
                      [k, q](double theta) { return k * std::pow(theta, q); });
}

CostFunction CostFunction::tabulated(std::vector<double> thetas, std::vector<double> costs) {
  if (thetas.size() != costs.size() || thetas.size() < 2) {
    throw InputError("tabulated cost needs at least two matching knots");
  }
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (!(thetas[i] > thetas[i - 1])) throw InputError("tabulated cost knots must increase");
    if (!(costs[i] > costs[i - 1])) throw InputError("tabulated cost must be strictly increasing");
  }
  if (costs.front() < 0.0) throw InputError("costs must be nonnegative");
  return CostFunction("tabulated", [t = std::move(thetas), c = std::move(costs)](double theta) {
    if (theta <= t.front()) return c.front();
    if (theta >= t.back()) return c.back();
    const auto it = std::upper_bound(t.begin(), t.end(), theta);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double w = (theta - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - w) * c[k - 1] + w * c[k];
  });
}

SignalFamily::SignalFamily(std::string name, Interval precision_domain,
                           std::function<JointModel(double)> model_at,
                           std::function<Interval(double)> support_at, CostFunction cost)
    : name_(std::move(name)),
      domain_(precision_domain),
      model_at_(std::move(model_at)),
      support_at_(std::move(support_at)),
      cost_(std::move(cost)) {}

void SignalFamily::check(double theta) const {
  if (!(theta >= domain_.lo && theta <= domain_.hi)) {
    throw DomainError("precision " + std::to_string(theta) + " outside [" +
                      std::to_string(domain_.lo) + ", " + std::to_string(domain_.hi) + "]");
  }
}

JointModel SignalFamily::model_at(double theta) const {
  check(theta);
  return model_at_(theta);
}

Interval SignalFamily::support_at(double theta) const {
  check(theta);
  return support_at_(theta);
}

SignalFamily uniform_replacement_family(std::size_t n_cells, Grid1D y_dist, CostFunction cost) {
  if (n_cells < 2) throw InputError("uniform replacement family needs at least two cells");
  auto support = [](double theta) { return Interval{(1.0 - theta) / 2.0, (1.0 + theta) / 2.0}; };
  auto model = [n_cells, y = std::move(y_dist), support](double theta) {
    const Interval s = support(theta);
    const Grid1D x = theta > 0.0 ? Grid1D::uniform(s.lo, s.hi, n_cells) : Grid1D::point_mass(0.5);
    return build_product_model(x, y);
  };
  return SignalFamily("uniform_replacement", Interval{0.0, 1.0}, std::move(model),
                      std::move(support), std::move(cost));
}

}  // namespace hmd

#include "pfol/baselines.hpp"

#include <cmath>

#include "pfol/errors.hpp"

namespace pfol {

OgdState ogd_step(const OgdState& state, const Point& grad, const Domain& domain) {
  if (!domain.has_exact_projection())
    throw CapabilityMissing("ogd_step: domain " + to_string(domain.kind()) + " has no projection");
  require_point(grad, domain.dim(), "ogd_step gradient");
  OgdState next;
  next.eta = state.eta;
  next.round = state.round + 1;
  next.x = domain.exact_projection(state.x - state.eta * grad);
  return next;
}

Ogd::Ogd(Domain domain, OgdSchedule schedule, double diameter, double lipschitz, int horizon,
         const Point& x_start, double scale)
    : domain_(std::move(domain)), schedule_(schedule), horizon_(horizon) {
  if (!domain_.has_exact_projection())
    throw CapabilityMissing("Ogd: domain " + to_string(domain_.kind()) + " has no projection");
  if (!(diameter > 0) || !(lipschitz > 0) || !(scale > 0))
    throw ContractViolation("Ogd: need D > 0, G > 0, scale > 0");
  if (schedule_ == OgdSchedule::kFixed && horizon_ < 1)
    throw ContractViolation("Ogd: fixed schedule needs a horizon");
  require_point(x_start, domain_.dim(), "Ogd x_start");
  base_ = scale * diameter / lipschitz;
  state_.x = x_start;
  state_.eta = step_size(1);
}

double Ogd::step_size(long t) const {
  const double n = schedule_ == OgdSchedule::kFixed ? horizon_ : static_cast<double>(t);
  return base_ / std::sqrt(n);
}

Accounting Ogd::observe(const LossFunction& loss) {
  Accounting acc;
  acc.loss_value = loss.value(state_.x);
  state_.eta = step_size(state_.round + 1);
  state_ = ogd_step(state_, loss.gradient(state_.x), domain_);
  return acc;
}

}  // namespace pfol

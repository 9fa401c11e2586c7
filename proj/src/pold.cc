#include "pfol/pold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pfol/errors.hpp"

namespace pfol {
namespace {

constexpr double kLossSlack = 1e-9;

double checked_loss(double v, std::size_t i) {
  if (!(v >= -kLossSlack && v <= 1.0 + kLossSlack)) {
    std::ostringstream os;
    os << "loss " << v << " of expert " << i + 1 << " outside [0, 1]";
    throw AssumptionViolation(os.str());
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

int pold_num_experts(int horizon) {
  if (horizon < 1) throw ContractViolation("pold: horizon must be >= 1");
  const double n = 0.75 * std::log2(1.0 + 4.0 * horizon / 7.0);
  return static_cast<int>(std::ceil(n)) + 1;
}

std::vector<double> pold_initial_weights(int num_experts) {
  if (num_experts < 1) throw ContractViolation("pold: need at least one expert");
  const double c = 1.0 + 1.0 / num_experts;
  std::vector<double> w(num_experts);
  for (int i = 1; i <= num_experts; ++i) w[i - 1] = c / (static_cast<double>(i) * (i + 1));
  return w;
}

PoldParams PoldParams::from_problem(int horizon, double diameter, double lipschitz, double scale) {
  if (horizon < 1 || !(diameter > 0) || !(lipschitz > 0) || !(scale > 0))
    throw ContractViolation("PoldParams: need T >= 1, D > 0, G > 0, scale > 0");
  PoldParams p;
  p.horizon = horizon;
  p.num_experts = pold_num_experts(horizon);
  p.alpha = std::sqrt(8.0 / horizon);
  const double base =
      std::pow(7.0 * diameter * diameter / (2.0 * lipschitz * lipschitz * horizon), 0.75);
  for (int i = 0; i < p.num_experts; ++i) p.step_sizes.push_back(scale * std::ldexp(base, i));
  return p;
}

std::vector<double> hedge_update(std::span<const double> weights, std::span<const double> losses,
                                 double alpha) {
  if (weights.size() != losses.size()) throw ContractViolation("hedge_update: size mismatch");
  std::vector<double> logw(weights.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double l = checked_loss(losses[i], i);
    logw[i] = weights[i] > 0 ? std::log(weights[i]) - alpha * l
                             : -std::numeric_limits<double>::infinity();
    top = std::max(top, logw[i]);
  }
  std::vector<double> out(weights.size());
  double z = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(logw[i] - top);
    z += out[i];
  }
  for (double& w : out) w /= z;
  return out;
}

Pold::Pold(Domain domain, PoldParams params, const Point& x_start, std::uint64_t seed)
    : domain_(std::move(domain)), params_(std::move(params)) {
  if (params_.num_experts < 1 ||
      params_.step_sizes.size() != static_cast<std::size_t>(params_.num_experts))
    throw ContractViolation("Pold: step_sizes must have num_experts entries");
  if (!(params_.alpha >= 0)) throw ContractViolation("Pold: alpha must be nonnegative");
  experts_.reserve(params_.num_experts);
  for (int i = 0; i < params_.num_experts; ++i) {
    const BogdParams bp = BogdParams::from_eta(params_.step_sizes[i], params_.horizon);
    experts_.emplace_back(domain_, bp, x_start, seed + 7919u * static_cast<std::uint64_t>(i));
  }
  weights_ = pold_initial_weights(params_.num_experts);
}

Point Pold::predict() const {
  Point x = Point::Zero(domain_.dim());
  for (std::size_t i = 0; i < experts_.size(); ++i) x += weights_[i] * experts_[i].predict();
  return x;
}

long Pold::update(std::span<const double> loss_values, std::span<const Point> grads) {
  if (loss_values.size() != experts_.size() || grads.size() != experts_.size())
    throw ContractViolation("Pold::update: one loss and gradient per expert required");
  weights_ = hedge_update(weights_, loss_values, params_.alpha);
  long lo = 0;
  for (std::size_t i = 0; i < experts_.size(); ++i) lo += experts_[i].update(grads[i]);
  return lo;
}

Accounting Pold::observe(const LossFunction& loss) {
  Accounting acc;
  acc.loss_value = loss.value(predict());
  std::vector<double> values(experts_.size());
  std::vector<Point> grads(experts_.size());
  for (std::size_t i = 0; i < experts_.size(); ++i) {
    const Point xi = experts_[i].predict();
    values[i] = loss.value(xi);
    grads[i] = loss.gradient(xi);
  }
  acc.lo_calls_delta = update(values, grads);
  return acc;
}

}  // namespace pfol

#include "pfol/bogd_ip.hpp"

#include <cmath>

#include "pfol/errors.hpp"

namespace pfol {
namespace {

constexpr double kFeasTol = 1e-6;
constexpr Eigen::Index kCompensatedDim = 100000;

}  // namespace

BogdParams BogdParams::from_eta(double eta, int horizon) {
  if (!(eta > 0) || !std::isfinite(eta)) throw ContractViolation("BogdParams: eta must be positive");
  BogdParams p;
  p.eta = eta;
  // Rounded up so blocks are never longer than eta^{-2/3}; the small
  // relative slack keeps exact powers (e.g. eta = 1/8 -> K = 4) from rounding
  // up on floating-point noise.
  const double k = std::pow(eta, -2.0 / 3.0);
  p.block_size = std::max(1L, static_cast<long>(std::ceil(k * (1.0 - 1e-12))));
  p.epsilon = std::pow(eta, 2.0 / 3.0);
  p.horizon = horizon;
  return p;
}

BogdParams BogdParams::for_horizon(int horizon) {
  if (horizon < 1) throw ContractViolation("BogdParams: horizon must be >= 1");
  return from_eta(std::pow(static_cast<double>(horizon), -0.75), horizon);
}

BogdState bogd_init(const Domain& domain, const BogdParams& params, const Point& x_start,
                    bool verify_start) {
  require_point(x_start, domain.dim(), "bogd_init x_start");
  if (params.block_size < 1 || !(params.eta > 0) || !(params.epsilon > 0))
    throw ContractViolation("bogd_init: invalid parameters");
  if (verify_start && domain.kind() != DomainKind::kCustom &&
      !domain.feasibility_check(x_start, kFeasTol))
    throw ContractViolation("bogd_init: x_start is not feasible");
  BogdState s;
  s.x = x_start;
  s.y_tilde = x_start;
  s.grad_acc = Point::Zero(domain.dim());
  if (params.compensated_sum || domain.dim() > kCompensatedDim)
    s.grad_comp = Point::Zero(domain.dim());
  return s;
}

long bogd_update(BogdState& state, const BogdParams& params, const IpConfig& ip,
                 const Point& grad, const Domain& domain, bool force_boundary) {
  require_point(grad, domain.dim(), "bogd_update gradient");
  if (state.grad_comp.size() > 0) {
    const Point y = grad - state.grad_comp;
    const Point t = state.grad_acc + y;
    state.grad_comp = (t - state.grad_acc) - y;
    state.grad_acc = t;
  } else {
    state.grad_acc += grad;
  }
  ++state.round_in_block;

  if (state.round_in_block < params.block_size && !force_boundary) return 0;

  const Point y_next = state.y_tilde - params.eta * state.grad_acc;
  IpResult r = infeasible_project(domain, ip, state.x, y_next);
  state.x = std::move(r.x);
  state.y_tilde = std::move(r.y_tilde);
  state.grad_acc.setZero();
  if (state.grad_comp.size() > 0) state.grad_comp.setZero();
  state.round_in_block = 0;
  ++state.block_index;
  ++state.oracle_calls;
  state.lo_calls_total += r.lo_calls;
  return r.lo_calls;
}

BogdIp::BogdIp(Domain domain, BogdParams params, const Point& x_start, std::uint64_t seed,
               bool verify_start)
    : domain_(std::move(domain)), params_(params) {
  ip_ = IpConfig::for_domain(domain_, params_.epsilon);
  ip_.seed = seed;
  state_ = bogd_init(domain_, params_, x_start, verify_start);
}

long BogdIp::update(const Point& grad) {
  ++rounds_;
  // A known horizon that does not divide into blocks flushes the partial
  // block at the final round.
  const bool last = params_.horizon > 0 && rounds_ == params_.horizon;
  ip_.seed += 1;
  return bogd_update(state_, params_, ip_, grad, domain_, last);
}

Accounting BogdIp::observe(const LossFunction& loss) {
  Accounting acc;
  acc.loss_value = loss.value(state_.x);
  acc.lo_calls_delta = update(loss.gradient(state_.x));
  return acc;
}

}  // namespace pfol

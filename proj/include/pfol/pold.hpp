#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pfol/bogd_ip.hpp"

namespace pfol {

/// Geometric step-size grid and Hedge learning rate for the dynamic-regret
/// ensemble.
struct PoldParams {
  int horizon = 1;
  double alpha = 1.0;
  int num_experts = 1;
  std::vector<double> step_sizes;

  /// eta_i = scale * 2^{i-1} (7 D^2 / (2 G^2 T))^{3/4}, i = 1..N with
  /// N = ceil(3/4 log2(1 + 4T/7)) + 1 and alpha = sqrt(8 / T).
  static PoldParams from_problem(int horizon, double diameter, double lipschitz,
                                 double scale = 1.0);
};

/// ceil(0.75 * log2(1 + 4T/7)) + 1.
int pold_num_experts(int horizon);

/// w_1^i = C / (i (i + 1)) with C = 1 + 1/N; sums to 1.
std::vector<double> pold_initial_weights(int num_experts);

/// The Hedge step w_i <- w_i exp(-alpha l_i) / Z. Throws AssumptionViolation
/// when a loss lies outside [0, 1] by more than 1e-9.
std::vector<double> hedge_update(std::span<const double> weights, std::span<const double> losses,
                                 double alpha);

/// Exponentially weighted average of BOGD_IP experts on a step-size grid.
class Pold : public OnlineLearner {
 public:
  Pold(Domain domain, PoldParams params, const Point& x_start, std::uint64_t seed = 0);

  std::string name() const override { return "pold"; }
  Point predict() const override;
  Accounting observe(const LossFunction& loss) override;

  /// Hedge step with f_t(x_t^i) followed by each expert's own gradient step.
  /// Returns the linear oracle calls spent by the experts.
  long update(std::span<const double> loss_values, std::span<const Point> grads);

  const PoldParams& params() const { return params_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<BogdIp>& experts() const { return experts_; }
  std::size_t num_experts() const { return experts_.size(); }

 private:
  Domain domain_;
  PoldParams params_;
  std::vector<BogdIp> experts_;
  std::vector<double> weights_;
};

}  // namespace pfol

#pragma once

#include <cstdint>
#include <string>

#include "pfol/domain.hpp"
#include "pfol/ip_oracle.hpp"
#include "pfol/learner.hpp"

namespace pfol {

/// Step size, block length and oracle tolerance of blocked OGD with
/// infeasible projections.
struct BogdParams {
  double eta = 0.1;
  long block_size = 1;
  double epsilon = 0.1;
  int horizon = 0;  // 0 = unknown; a known horizon flushes the trailing block
  bool compensated_sum = false;

  /// block_size = ceil(eta^{-2/3}), epsilon = eta^{2/3}.
  static BogdParams from_eta(double eta, int horizon = 0);
  /// eta = T^{-3/4}, hence block_size = ceil(sqrt(T)) and epsilon = T^{-1/2}.
  static BogdParams for_horizon(int horizon);
};

struct BogdState {
  Point x;          // feasible point submitted for the whole block
  Point y_tilde;    // infeasible iterate, inside the enclosing ball
  Point grad_acc;   // sum of the gradients seen in the current block
  Point grad_comp;  // Kahan compensation; empty unless compensated_sum
  long round_in_block = 0;
  long block_index = 1;
  long lo_calls_total = 0;
  long oracle_calls = 0;
};

// verify_start = false skips the feasibility check of x_start (callers that
// start from convex combinations of feasible points).
BogdState bogd_init(const Domain& domain, const BogdParams& params, const Point& x_start,
                    bool verify_start = true);

inline const Point& bogd_predict(const BogdState& state) { return state.x; }

/// Adds one gradient; at the block boundary (or when force_boundary is set
/// and the block is non-empty) takes the gradient step on y_tilde and calls
/// the infeasible projection oracle. Returns the linear oracle calls spent.
long bogd_update(BogdState& state, const BogdParams& params, const IpConfig& ip,
                 const Point& grad, const Domain& domain, bool force_boundary = false);

/// BOGD_IP as an OnlineLearner.
class BogdIp : public OnlineLearner {
 public:
  BogdIp(Domain domain, BogdParams params, const Point& x_start, std::uint64_t seed = 0,
         bool verify_start = true);

  std::string name() const override { return "bogd_ip"; }
  Point predict() const override { return state_.x; }
  Accounting observe(const LossFunction& loss) override;

  /// Feeds the gradient at predict() without evaluating a loss.
  long update(const Point& grad);

  const BogdState& state() const { return state_; }
  const BogdParams& params() const { return params_; }
  const IpConfig& ip_config() const { return ip_; }
  long rounds_seen() const { return rounds_; }

 private:
  Domain domain_;
  BogdParams params_;
  IpConfig ip_;
  BogdState state_;
  long rounds_ = 0;
};

}  // namespace pfol

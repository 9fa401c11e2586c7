#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pfol/bogd_ip.hpp"

namespace pfol {

/// A geometric covering interval [index * 2^level, (index + 1) * 2^level - 1].
struct GcInterval {
  int level = 0;
  long index = 1;
  long start = 1;
  long end = 1;

  long length() const { return end - start + 1; }
  bool contains(long t) const { return start <= t && t <= end; }
  bool operator==(const GcInterval&) const = default;
};

GcInterval make_gc_interval(int level, long index);

/// Intervals whose first round is t: one per level k with 2^k | t.
std::vector<GcInterval> gc_intervals_starting_at(long t, int max_level = 30);

/// Intervals containing t: one per level k with 2^k <= t.
std::vector<GcInterval> gc_intervals_containing(long t, int max_level = 30);

/// exp([R]_+^2 / (3C)), equal to 1 whenever [R]_+ = 0. Throws ContractViolation
/// for C = 0 with [R]_+ > 0.
double anh_potential(double R, double C);

enum class AnhVariant {
  kPaper,    // 1/2 (Phi(R+1, C+1) - Phi(R+1, C-1))
  kClassic,  // 1/2 (Phi(R+1, C+1) - Phi(R-1, C+1))
};

std::string to_string(AnhVariant v);
AnhVariant anh_variant_from_string(const std::string& s);

/// Unnormalized AdaNormalHedge weight. May be negative (or -inf when the
/// kPaper form hits C = 1).
double anh_weight(double R, double C, AnhVariant variant = AnhVariant::kPaper);

/// Normalized weights over experts with statistics (R_i, C_i). Negative
/// weights are floored at zero; if nothing stays positive the result is
/// uniform. Evaluated in log space so large C does not overflow.
std::vector<double> anh_normalized_weights(std::span<const double> R, std::span<const double> C,
                                           AnhVariant variant);

struct ActiveExpert {
  GcInterval interval;
  BogdIp learner;
  double R = 0.0;     // sum of f(x_t) - f(x_{t,I}) since interval start
  double C = 0.0;     // sum of |f(x_t) - f(x_{t,I})|
  long updates = 0;
};

struct PolaOptions {
  AnhVariant variant = AnhVariant::kPaper;
  int max_level = 30;
  double scale = 1.0;  // multiplies every expert step size |I|^{-3/4}
  std::uint64_t seed = 0;
};

/// GC-interval experts running BOGD_IP with eta = |I|^{-3/4}, combined by
/// AdaNormalHedge. New experts start at the previous meta prediction (the
/// origin at t = 1).
class Pola : public OnlineLearner {
 public:
  Pola(Domain domain, PolaOptions options);

  std::string name() const override { return "pola"; }
  Point predict() const override { return prediction_; }
  Accounting observe(const LossFunction& loss) override;

  long current_round() const { return t_; }
  const std::vector<ActiveExpert>& active() const { return active_; }
  const std::vector<double>& weights() const { return weights_; }
  const PolaOptions& options() const { return options_; }
  /// Expert statistics of experts retired so far: updates received vs |I|.
  long retired_experts() const { return retired_; }
  long retired_with_wrong_lifetime() const { return retired_bad_lifetime_; }

 private:
  void begin_round();

  Domain domain_;
  PolaOptions options_;
  long t_ = 1;
  std::vector<ActiveExpert> active_;
  std::vector<double> weights_;
  Point prediction_;
  Point last_prediction_;
  long retired_ = 0;
  long retired_bad_lifetime_ = 0;
};

}  // namespace pfol

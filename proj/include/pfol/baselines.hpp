#pragma once

#include <string>

#include "pfol/domain.hpp"
#include "pfol/learner.hpp"

namespace pfol {

struct OgdState {
  Point x;
  double eta = 0.1;
  long round = 0;
};

/// x <- Proj_K(x - eta * grad). Throws CapabilityMissing without a projection.
OgdState ogd_step(const OgdState& state, const Point& grad, const Domain& domain);

enum class OgdSchedule {
  kFixed,    // eta = D / (G sqrt(T))
  kAnytime,  // eta_t = D / (G sqrt(t))
};

/// Projected online gradient descent.
class Ogd : public OnlineLearner {
 public:
  Ogd(Domain domain, OgdSchedule schedule, double diameter, double lipschitz, int horizon,
      const Point& x_start, double scale = 1.0);

  std::string name() const override { return "ogd"; }
  Point predict() const override { return state_.x; }
  Accounting observe(const LossFunction& loss) override;

  const OgdState& state() const { return state_; }
  double step_size(long t) const;

 private:
  Domain domain_;
  OgdSchedule schedule_;
  double base_;  // scale * D / G
  int horizon_;
  OgdState state_;
};

}  // namespace pfol

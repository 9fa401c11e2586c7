#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pfol/point.hpp"

namespace pfol {

class LossFunction;

/// A finite sequence of convex losses f_1..f_T over a common domain. Values
/// are expected in [0, 1] and gradients bounded by lipschitz().
/// Implementations are pure functions of (stream, t) and thread-safe.
class LossStream {
 public:
  virtual ~LossStream() = default;

  virtual int horizon() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual double lipschitz() const = 0;

  /// f_t(x) for 1 <= t <= horizon().
  virtual double value(int t, const Point& x) const = 0;
  /// A subgradient of f_t at x.
  virtual Point gradient(int t, const Point& x) const = 0;

  LossFunction at(int t) const;
};

/// Round-t view onto a stream; what a learner observes after predicting.
class LossFunction {
 public:
  LossFunction(const LossStream& stream, int t) : stream_(&stream), round_(t) {}

  int round() const { return round_; }
  double value(const Point& x) const { return stream_->value(round_, x); }
  Point gradient(const Point& x) const { return stream_->gradient(round_, x); }

 private:
  const LossStream* stream_;
  int round_;
};

inline LossFunction LossStream::at(int t) const { return {*this, t}; }

/// What one observe() call cost.
struct Accounting {
  double loss_value = 0.0;
  long lo_calls_delta = 0;
};

/// predict -> observe(f_t) -> next round. predict() must not change state and
/// must return a feasible point; observe() advances exactly one round.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string name() const = 0;
  virtual Point predict() const = 0;
  virtual Accounting observe(const LossFunction& loss) = 0;
};

struct RunTrace {
  std::string algo_id;
  std::vector<double> losses;         // f_t(x_t)
  std::vector<Point> points;          // x_t, only when requested
  std::vector<long> lo_calls;         // per-round linear oracle calls
  std::vector<std::int64_t> wall_ns;  // per-round predict + observe time
  bool complete = true;
  std::string error;

  std::size_t size() const { return losses.size(); }
};

struct DriveOptions {
  bool record_points = false;
  // Called after each observe() with the finished round index.
  std::function<void(int t, const OnlineLearner&)> after_round;
};

/// Runs the online protocol for rounds 1..T. Learner exceptions stop the loop
/// and are reported through RunTrace::complete / error.
RunTrace drive(OnlineLearner& learner, const LossStream& stream, int T,
               const DriveOptions& options = {});

}  // namespace pfol

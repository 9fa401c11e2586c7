#include "pfol/learner.hpp"

#include <chrono>

#include "pfol/errors.hpp"

namespace pfol {

RunTrace drive(OnlineLearner& learner, const LossStream& stream, int T,
               const DriveOptions& options) {
  if (T < 0 || T > stream.horizon()) throw ContractViolation("drive: T outside [0, horizon]");
  RunTrace trace;
  trace.algo_id = learner.name();
  trace.losses.reserve(T);
  trace.lo_calls.reserve(T);
  trace.wall_ns.reserve(T);

  using Clock = std::chrono::steady_clock;
  for (int t = 1; t <= T; ++t) {
    try {
      const auto start = Clock::now();
      const Point x = learner.predict();
      // The loss is recorded before the learner sees f_t.
      const LossFunction loss = stream.at(t);
      const double value = loss.value(x);
      trace.losses.push_back(value);
      if (options.record_points) trace.points.push_back(x);
      const Accounting acc = learner.observe(loss);
      const auto stop = Clock::now();
      trace.lo_calls.push_back(acc.lo_calls_delta);
      trace.wall_ns.push_back(
          std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
    } catch (const std::exception& e) {
      // Keep lengths consistent: drop the half-recorded round.
      trace.losses.resize(trace.lo_calls.size());
      if (options.record_points) trace.points.resize(trace.lo_calls.size());
      trace.complete = false;
      trace.error = "round " + std::to_string(t) + ": " + e.what();
      return trace;
    }
    if (options.after_round) options.after_round(t, learner);
  }
  return trace;
}

}  // namespace pfol

#pragma once

#include <cstdint>
#include <vector>

#include "pfol/domain.hpp"

namespace pfol {

// Infeasible projection oracle built from linear minimization only.
//
// Given a feasible x0 and an arbitrary y0, infeasible_project returns a
// feasible x and a point y_tilde in the enclosing ball with
//   ||x - y_tilde||^2 <= 3 eps                     (closeness)
//   ||y_tilde - z|| <= ||y0 - z||  for all z in K  (never farther from K)
// by alternating a Frank-Wolfe approach towards the current y with a small
// pull of y towards the returned x.

enum class FwStop { kClose, kSeparated };

struct FwResult {
  Point x;
  FwStop stop = FwStop::kClose;
  long iterations = 0;  // loop iterations == linear oracle calls
};

/// Frank-Wolfe with exact line search on 0.5 ||x - target||^2, stopping once
/// the squared distance is <= 3 eps or the dual gap <x - target, x - v> <= eps.
/// Throws InvariantViolation after max_iterations loop iterations.
/// If distance_trace is non-null, ||x_i - target|| is appended per iterate.
FwResult fw_approach(const Domain& domain, double epsilon, const Point& x_init,
                     const Point& target, long max_iterations, std::uint64_t seed = 0,
                     std::vector<double>* distance_trace = nullptr);

/// Closed-form minimizer over delta in [0, 1] of ||x + delta (v - x) - target||^2.
/// Zero when v == x.
double fw_line_search(const Point& x, const Point& v, const Point& target);

/// ceil(27 D^2 / (4 eps)): loop iterations one fw_approach call may need.
long fw_iteration_bound(double diameter, double epsilon);

/// max{d2 (d2 - eps) / (4 eps^2) + 1, 1} with d2 = ||x0 - y0'||^2.
double pull_iteration_bound(double dist_sq, double epsilon);

struct IpConfig {
  double epsilon = 0.1;
  long fw_max_iters_cap = 0;    // per fw_approach call
  long pull_max_iters_cap = 0;  // per infeasible_project call
  std::uint64_t seed = 0;       // base seed for the trace-norm power iteration

  /// Caps set to twice the analytical bounds for this domain and tolerance.
  static IpConfig for_domain(const Domain& domain, double epsilon, double safety_factor = 2.0);
};

struct IpResult {
  Point x;
  Point y_tilde;
  long fw_iterations_total = 0;
  long fw_iterations_max = 0;  // largest single fw_approach call
  long pull_iterations = 0;
  long lo_calls = 0;
  double initial_dist_sq = 0.0;  // ||x0 - clip(y0)||^2
  bool bound_exceeded = false;   // un-factored analytical bound passed, cap not hit
};

/// Throws InvariantViolation when a cap is exceeded and ContractViolation on
/// bad inputs (infeasible x0 is not re-checked here; callers own that).
IpResult infeasible_project(const Domain& domain, const IpConfig& cfg, const Point& x0,
                            const Point& y0);

}  // namespace pfol

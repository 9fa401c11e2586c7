#include "pfol/ip_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "pfol/errors.hpp"

namespace pfol {
namespace {

constexpr double kMaxCap = 1e15;

long saturate(double v) {
  if (!(v < kMaxCap)) return static_cast<long>(kMaxCap);
  return static_cast<long>(std::ceil(v));
}

}  // namespace

double fw_line_search(const Point& x, const Point& v, const Point& target) {
  const Point dir = x - v;
  const double denom = dir.squaredNorm();
  if (denom == 0.0) return 0.0;
  return std::clamp((x - target).dot(dir) / denom, 0.0, 1.0);
}

long fw_iteration_bound(double diameter, double epsilon) {
  return saturate(27.0 * diameter * diameter / (4.0 * epsilon));
}

double pull_iteration_bound(double dist_sq, double epsilon) {
  return std::max(dist_sq * (dist_sq - epsilon) / (4.0 * epsilon * epsilon) + 1.0, 1.0);
}

IpConfig IpConfig::for_domain(const Domain& domain, double epsilon, double safety_factor) {
  if (!(epsilon > 0)) throw ContractViolation("IpConfig: epsilon must be positive");
  const double d2 = domain.diameter() * domain.diameter();
  IpConfig cfg;
  cfg.epsilon = epsilon;
  cfg.fw_max_iters_cap =
      saturate(safety_factor * static_cast<double>(fw_iteration_bound(domain.diameter(), epsilon)));
  cfg.pull_max_iters_cap = saturate(safety_factor * pull_iteration_bound(d2, epsilon));
  return cfg;
}

FwResult fw_approach(const Domain& domain, double epsilon, const Point& x_init,
                     const Point& target, long max_iterations, std::uint64_t seed,
                     std::vector<double>* distance_trace) {
  if (!(epsilon > 0)) throw ContractViolation("fw_approach: epsilon must be positive");
  require_point(x_init, domain.dim(), "fw_approach x_init");
  require_point(target, domain.dim(), "fw_approach target");

  FwResult out;
  out.x = x_init;
  for (long i = 1;; ++i) {
    if (i > max_iterations) {
      std::ostringstream os;
      os << "fw_approach exceeded " << max_iterations << " iterations (eps=" << epsilon
         << ", dist^2=" << (out.x - target).squaredNorm() << ")";
      throw InvariantViolation(os.str());
    }
    const Point residual = out.x - target;
    const double dist_sq = residual.squaredNorm();
    if (distance_trace) distance_trace->push_back(std::sqrt(dist_sq));
    const Point v = domain.linear_minimize(residual, seed + static_cast<std::uint64_t>(i));
    out.iterations = i;
    if (dist_sq <= 3.0 * epsilon) {
      out.stop = FwStop::kClose;
      return out;
    }
    if (residual.dot(out.x - v) <= epsilon) {
      out.stop = FwStop::kSeparated;
      return out;
    }
    const double step = fw_line_search(out.x, v, target);
    out.x += step * (v - out.x);
  }
}

IpResult infeasible_project(const Domain& domain, const IpConfig& cfg, const Point& x0,
                            const Point& y0) {
  if (!(cfg.epsilon > 0)) throw ContractViolation("infeasible_project: epsilon must be positive");
  require_point(x0, domain.dim(), "infeasible_project x0");
  require_point(y0, domain.dim(), "infeasible_project y0");

  const double eps = cfg.epsilon;
  IpResult out;
  Point y = clip_to_enclosing_ball(domain.radius(), y0);
  out.initial_dist_sq = (x0 - y).squaredNorm();
  if (out.initial_dist_sq <= 3.0 * eps) {
    out.x = x0;
    out.y_tilde = std::move(y);
    return out;
  }

  const long fw_bound = fw_iteration_bound(domain.diameter(), eps);
  const double pull_bound = pull_iteration_bound(out.initial_dist_sq, eps);
  const long fw_cap = cfg.fw_max_iters_cap > 0 ? cfg.fw_max_iters_cap : 2 * fw_bound;
  const long pull_cap = cfg.pull_max_iters_cap > 0 ? cfg.pull_max_iters_cap
                                                   : saturate(2.0 * pull_bound);
  const double gamma = 2.0 * eps / out.initial_dist_sq;

  Point x = x0;
  for (long i = 1;; ++i) {
    if (i > pull_cap) {
      std::ostringstream os;
      os << "infeasible_project exceeded " << pull_cap << " pull iterations (eps=" << eps
         << ", initial dist^2=" << out.initial_dist_sq
         << ", current dist^2=" << (x - y).squaredNorm() << ")";
      throw InvariantViolation(os.str());
    }
    FwResult fw = fw_approach(domain, eps, x, y, fw_cap, cfg.seed + static_cast<std::uint64_t>(out.lo_calls));
    out.pull_iterations = i;
    out.fw_iterations_total += fw.iterations;
    out.fw_iterations_max = std::max(out.fw_iterations_max, fw.iterations);
    out.lo_calls += fw.iterations;
    x = std::move(fw.x);
    if (fw.iterations > fw_bound) out.bound_exceeded = true;

    if ((x - y).squaredNorm() > 3.0 * eps) {
      y -= gamma * (y - x);
    } else {
      break;
    }
  }
  if (static_cast<double>(out.pull_iterations) > pull_bound) out.bound_exceeded = true;
  if (out.bound_exceeded) {
    std::cerr << "warning: infeasible_project passed its analytical iteration bound (fw max "
              << out.fw_iterations_max << " vs " << fw_bound << ", pulls " << out.pull_iterations
              << " vs " << pull_bound << ")\n";
  }
  out.x = std::move(x);
  out.y_tilde = std::move(y);
  return out;
}

}  // namespace pfol

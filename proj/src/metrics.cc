#include "pfol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfol/errors.hpp"

namespace pfol {
namespace {

constexpr double kFeasTol = 1e-6;

// prefix[k] = losses[0] + ... + losses[k-1]
std::vector<double> prefix_sums(std::span<const double> losses) {
  std::vector<double> p(losses.size() + 1, 0.0);
  for (std::size_t i = 0; i < losses.size(); ++i) p[i + 1] = p[i] + losses[i];
  return p;
}

int checked_length(std::span<const double> losses, const Stream& stream) {
  if (losses.empty()) throw ContractViolation("regret: empty trace");
  if (losses.size() > static_cast<std::size_t>(stream.horizon()))
    throw ContractViolation("regret: trace longer than the stream horizon");
  return static_cast<int>(losses.size());
}

class WindowEvaluator {
 public:
  WindowEvaluator(std::span<const double> losses, const Stream& stream, OracleStats* stats)
      : prefix_(prefix_sums(losses)), stream_(stream), stats_(stats) {}

  double regret(int s, int e) {
    OfflineSolution sol = stream_.solve(s, e, have_warm_ ? &warm_ : nullptr);
    if (stats_) stats_->add(sol);
    warm_ = sol.point;
    have_warm_ = true;
    return prefix_[e] - prefix_[s - 1] - sol.value;
  }

 private:
  std::vector<double> prefix_;
  const Stream& stream_;
  OracleStats* stats_;
  Point warm_;
  bool have_warm_ = false;
};

}  // namespace

void OracleStats::add(const OfflineSolution& s) {
  ++solves;
  total_iterations += s.iterations;
  max_residual = std::max(max_residual, s.residual);
  if (!s.converged) ++nonconverged;
}

nlohmann::json OracleStats::to_json() const {
  return {{"solves", solves},
          {"total_iterations", total_iterations},
          {"max_residual", max_residual},
          {"nonconverged", nonconverged}};
}

int default_stride(int tau) { return std::max(1, tau / 8); }

double static_regret(std::span<const double> losses, const Stream& stream, OracleStats* stats) {
  const int n = checked_length(losses, stream);
  WindowEvaluator w(losses, stream, stats);
  return w.regret(1, n);
}

DynamicRegret dynamic_regret(std::span<const double> losses, std::span<const Point> comparators,
                             const Stream& stream) {
  const int n = checked_length(losses, stream);
  if (comparators.size() < losses.size())
    throw ContractViolation("dynamic_regret: fewer comparators than rounds");
  DynamicRegret out;
  for (int t = 1; t <= n; ++t) {
    const Point& u = comparators[t - 1];
    require_point(u, stream.dim(), "dynamic_regret comparator");
    const bool moved = t == 1 || u != comparators[t - 2];
    if (moved && !stream.domain().feasibility_check(u, kFeasTol))
      throw ContractViolation("dynamic_regret: comparator at round " + std::to_string(t) +
                              " is infeasible");
    if (t > 1 && moved) out.path_length += (comparators[t - 2] - u).norm();
    out.regret += losses[t - 1] - stream.value(t, u);
  }
  return out;
}

double strongly_adaptive_regret(std::span<const double> losses, const Stream& stream, int tau,
                                int stride, OracleStats* stats) {
  const int n = checked_length(losses, stream);
  if (tau < 1 || tau > n) throw ContractViolation("strongly_adaptive_regret: tau outside [1, T]");
  if (stride < 1) throw ContractViolation("strongly_adaptive_regret: stride must be >= 1");
  WindowEvaluator w(losses, stream, stats);
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 1; s + tau - 1 <= n; s += stride) best = std::max(best, w.regret(s, s + tau - 1));
  return best;
}

double weak_adaptive_regret(std::span<const double> losses, const Stream& stream, int stride,
                            OracleStats* stats) {
  const int n = checked_length(losses, stream);
  if (stride < 1) throw ContractViolation("weak_adaptive_regret: stride must be >= 1");
  WindowEvaluator w(losses, stream, stats);
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 1; s <= n; s += stride) {
    int e = s + stride - 1;
    for (; e < n; e += stride) best = std::max(best, w.regret(s, e));
    best = std::max(best, w.regret(s, n));
  }
  return best;
}

nlohmann::json RegretReport::to_json() const {
  nlohmann::json sa = nlohmann::json::object();
  for (const auto& [tau, v] : strongly_adaptive) sa[std::to_string(tau)] = v;
  nlohmann::json j{{"cumulative_loss", cumulative_loss},
                   {"static", static_regret},
                   {"dynamic", dynamic_regret},
                   {"dynamic_path_length", dynamic_path_length},
                   {"strongly_adaptive", sa},
                   {"oracle", oracle.to_json()}};
  j["weak_adaptive"] = has_weak_adaptive ? nlohmann::json(weak_adaptive) : nlohmann::json(nullptr);
  return j;
}

RegretReport compute_report(std::span<const double> losses, const Stream& stream,
                            const ComparatorSequence& comparators, const MetricsOptions& options) {
  const int n = checked_length(losses, stream);
  RegretReport r;
  for (double v : losses) r.cumulative_loss += v;
  r.static_regret = static_regret(losses, stream, &r.oracle);
  for (const OfflineSolution& s : comparators.solves) r.oracle.add(s);
  const DynamicRegret d = dynamic_regret(losses, comparators.points, stream);
  r.dynamic_regret = d.regret;
  r.dynamic_path_length = d.path_length;
  for (int tau : options.taus) {
    if (tau > n) continue;
    const int stride = options.stride > 0 ? options.stride : default_stride(tau);
    r.strongly_adaptive[tau] = strongly_adaptive_regret(losses, stream, tau, stride, &r.oracle);
  }
  if (options.weak_stride >= 0) {
    const int stride = options.weak_stride > 0 ? options.weak_stride : std::max(1, n / 16);
    r.weak_adaptive = weak_adaptive_regret(losses, stream, stride, &r.oracle);
    r.has_weak_adaptive = true;
  }
  return r;
}

}  // namespace pfol

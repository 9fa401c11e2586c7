#pragma once

#include <map>
#include <span>
#include <vector>

#include <json.hpp>

#include "pfol/env.hpp"

namespace pfol {

/// Bookkeeping of the offline comparator solves behind a regret number.
struct OracleStats {
  long solves = 0;
  long total_iterations = 0;
  double max_residual = 0.0;
  long nonconverged = 0;

  void add(const OfflineSolution& s);
  nlohmann::json to_json() const;
};

/// sum_t f_t(x_t) - min_K sum_t f_t.
double static_regret(std::span<const double> losses, const Stream& stream,
                     OracleStats* stats = nullptr);

struct DynamicRegret {
  double regret = 0.0;
  double path_length = 0.0;
};

/// sum_t f_t(x_t) - sum_t f_t(u_t) and P_T = sum_{t>=2} ||u_{t-1} - u_t||.
/// Throws ContractViolation on an infeasible comparator (tolerance 1e-6).
DynamicRegret dynamic_regret(std::span<const double> losses, std::span<const Point> comparators,
                             const Stream& stream);

/// max over windows [s, s + tau - 1], s = 1, 1 + stride, ..., of the
/// window loss minus the best fixed point's window loss.
double strongly_adaptive_regret(std::span<const double> losses, const Stream& stream, int tau,
                                int stride, OracleStats* stats = nullptr);

/// max over windows [s, e] with s = 1, 1 + stride, ... and
/// e in {s + stride - 1, s + 2 stride - 1, ...} plus e = T.
double weak_adaptive_regret(std::span<const double> losses, const Stream& stream, int stride,
                            OracleStats* stats = nullptr);

/// max(1, tau / 8).
int default_stride(int tau);

struct MetricsOptions {
  std::vector<int> taus;
  int stride = 0;       // 0: default_stride(tau) per tau
  int weak_stride = 0;  // 0: max(1, T / 16); < 0: skip weak adaptive regret
  ComparatorMode comparator_mode = ComparatorMode::kPerSegment;
};

struct RegretReport {
  double cumulative_loss = 0.0;
  double static_regret = 0.0;
  double dynamic_regret = 0.0;
  double dynamic_path_length = 0.0;
  std::map<int, double> strongly_adaptive;
  bool has_weak_adaptive = false;
  double weak_adaptive = 0.0;
  OracleStats oracle;

  nlohmann::json to_json() const;
};

/// All metrics for one trace. The comparator sequence may be shared across
/// traces of the same stream.
RegretReport compute_report(std::span<const double> losses, const Stream& stream,
                            const ComparatorSequence& comparators, const MetricsOptions& options);

}  // namespace pfol

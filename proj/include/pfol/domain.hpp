#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "pfol/point.hpp"

namespace pfol {

enum class DomainKind { kBall, kBox, kSimplex, kTraceNormBall, kCustom };

std::string to_string(DomainKind kind);

/// Power iteration settings for the trace-norm linear oracle.
struct PowerIterationOptions {
  double rel_tol = 1e-8;  // on successive Rayleigh quotients
  int max_iters = 1000;
  // On a stall, take the top pair from a dense SVD instead of throwing.
  bool exact_fallback = false;
};

/// A convex decision set K contained in the Euclidean ball of radius R around
/// the origin, with 0 in K. Every kind supports linear minimization; ball, box,
/// simplex and trace-norm ball also have closed-form Euclidean projections.
///
/// Kinds:
///   ball            {x : ||x||_2 <= R}
///   box             {x : |x_i| <= b}, R = b * sqrt(d)
///   simplex         {x : x_i >= 0, sum_i x_i <= 1} (hull of 0 and the unit
///                   vectors), R = 1
///   trace_norm_ball {X in R^{m x n} : ||X||_* <= delta}, R = delta
///   custom          caller-supplied linear oracle and optional checker
///
/// Immutable after construction; all member functions are const and
/// thread-safe.
class Domain {
 public:
  using LinearOracle = std::function<Point(const Point& direction)>;
  using FeasibilityChecker = std::function<bool(const Point& p, double tol)>;

  static Domain ball(Eigen::Index dim, double radius);
  static Domain box(Eigen::Index dim, double half_width);
  static Domain simplex(Eigen::Index dim);
  static Domain trace_norm_ball(Eigen::Index rows, Eigen::Index cols, double delta,
                                PowerIterationOptions power = {});
  static Domain custom(Eigen::Index dim, double radius, LinearOracle oracle,
                       FeasibilityChecker checker = {});

  DomainKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  double radius() const { return radius_; }
  double diameter() const { return 2.0 * radius_; }

  // Kind-specific parameters; zero when not applicable.
  double half_width() const { return half_width_; }
  double delta() const { return delta_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const PowerIterationOptions& power_options() const { return power_; }

  Point origin() const { return Point::Zero(dim_); }

  /// argmin over K of <direction, v>. The seed drives the random start of the
  /// trace-norm power iteration and is ignored by the other kinds.
  /// Throws OracleConvergenceError if power iteration stalls.
  Point linear_minimize(const Point& direction, std::uint64_t seed = 0) const;

  /// True iff p satisfies the defining constraints within additive tol.
  bool feasibility_check(const Point& p, double tol) const;

  bool has_exact_projection() const { return kind_ != DomainKind::kCustom; }

  /// Euclidean projection onto K. The trace-norm ball pays a full SVD.
  Point exact_projection(const Point& p) const;

  /// Short human-readable description used in run metadata.
  std::string describe() const;

 private:
  Domain() = default;

  DomainKind kind_ = DomainKind::kBall;
  Eigen::Index dim_ = 0;
  double radius_ = 0.0;
  double half_width_ = 0.0;
  double delta_ = 0.0;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  PowerIterationOptions power_;
  std::shared_ptr<const LinearOracle> custom_oracle_;
  std::shared_ptr<const FeasibilityChecker> custom_checker_;
};

/// p / max{1, ||p|| / radius}.
Point clip_to_enclosing_ball(double radius, const Point& p);

/// Sum of singular values of the rows x cols matrix stored in p.
double nuclear_norm(const Point& p, Eigen::Index rows, Eigen::Index cols);

/// Euclidean projection onto {x >= 0, sum x <= scale}.
Point project_capped_simplex(const Point& p, double scale = 1.0);

/// Top singular pair of a matrix by power iteration on G^T G.
struct SingularPair {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double sigma = 0.0;
  int iterations = 0;
};
SingularPair top_singular_pair(const Eigen::Ref<const RowMajorMatrix>& g,
                               const PowerIterationOptions& options, std::uint64_t seed);

}  // namespace pfol

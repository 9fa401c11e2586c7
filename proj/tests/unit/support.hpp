#pragma once

#include <random>
#include <vector>

#include <Eigen/SVD>

#include "pfol/domain.hpp"
#include "pfol/learner.hpp"

namespace pfol::testing {

inline Point vec(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

inline Point gaussian(std::mt19937_64& rng, Eigen::Index d, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Point p(d);
  for (Eigen::Index i = 0; i < d; ++i) p(i) = n(rng);
  return p;
}

// Trace-norm ball whose oracle falls back to a dense SVD when power
// iteration stalls on a near-tie of the top singular values.
inline Domain trace_ball(Eigen::Index rows, Eigen::Index cols, double delta) {
  return Domain::trace_norm_ball(rows, cols, delta, {.exact_fallback = true});
}

inline Point uniform_box(std::mt19937_64& rng, Eigen::Index d, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  Point p(d);
  for (Eigen::Index i = 0; i < d; ++i) p(i) = u(rng);
  return p;
}

// Random feasible point: convex combination of the origin and a few linear
// oracle outputs, which covers the interior and the boundary.
inline Point sample_feasible(const Domain& K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = 1 + static_cast<int>(rng() % 4);
  std::vector<double> w(m + 1);
  double total = 0.0;
  for (double& x : w) total += (x = -std::log(1.0 - u(rng)));
  Point p = Point::Zero(K.dim());
  for (int j = 0; j < m; ++j) p += (w[j] / total) * K.linear_minimize(gaussian(rng, K.dim()), rng());
  if (u(rng) < 0.25) p = K.linear_minimize(gaussian(rng, K.dim()), rng());
  return p;
}

// Singular values by Jacobi SVD, used as an independent reference.
inline Eigen::VectorXd singular_values(const Point& p, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::MatrixXd m = as_matrix(p, rows, cols);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

// Loss stream given by explicit closures; used to build small hand-made cases.
class LambdaStream : public LossStream {
 public:
  using Value = std::function<double(int, const Point&)>;
  using Grad = std::function<Point(int, const Point&)>;

  LambdaStream(int horizon, Eigen::Index dim, double lipschitz, Value v, Grad g)
      : horizon_(horizon), dim_(dim), lipschitz_(lipschitz), v_(std::move(v)), g_(std::move(g)) {}

  int horizon() const override { return horizon_; }
  Eigen::Index dim() const override { return dim_; }
  double lipschitz() const override { return lipschitz_; }
  double value(int t, const Point& x) const override { return v_(t, x); }
  Point gradient(int t, const Point& x) const override { return g_(t, x); }

 private:
  int horizon_;
  Eigen::Index dim_;
  double lipschitz_;
  Value v_;
  Grad g_;
};

}  // namespace pfol::testing

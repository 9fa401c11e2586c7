#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace pfol {

// Decisions are dense vectors; matrices are stored row-major flattened.
using Point = Eigen::VectorXd;

inline bool all_finite(const Point& p) { return p.allFinite(); }

// Throws ContractViolation when p.size() != dim or p has NaN/Inf entries.
void require_point(const Point& p, Eigen::Index dim, std::string_view what);

// Views a flattened row-major point as a rows x cols matrix.
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMajorMatrix> as_matrix(const Point& p, Eigen::Index rows,
                                                  Eigen::Index cols) {
  return {p.data(), rows, cols};
}
inline Eigen::Map<RowMajorMatrix> as_matrix(Point& p, Eigen::Index rows, Eigen::Index cols) {
  return {p.data(), rows, cols};
}

}  // namespace pfol

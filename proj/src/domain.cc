#include "pfol/domain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "pfol/errors.hpp"

namespace pfol {

void require_point(const Point& p, Eigen::Index dim, std::string_view what) {
  if (p.size() != dim) {
    std::ostringstream os;
    os << what << ": dimension " << p.size() << " does not match " << dim;
    throw ContractViolation(os.str());
  }
  if (!p.allFinite()) throw ContractViolation(std::string(what) + ": non-finite entry");
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::kBall: return "ball";
    case DomainKind::kBox: return "box";
    case DomainKind::kSimplex: return "simplex";
    case DomainKind::kTraceNormBall: return "trace_norm_ball";
    case DomainKind::kCustom: return "custom";
  }
  return "unknown";
}

Domain Domain::ball(Eigen::Index dim, double radius) {
  if (dim <= 0 || !(radius > 0)) throw ContractViolation("ball: need dim > 0 and radius > 0");
  Domain d;
  d.kind_ = DomainKind::kBall;
  d.dim_ = dim;
  d.radius_ = radius;
  return d;
}

Domain Domain::box(Eigen::Index dim, double half_width) {
  if (dim <= 0 || !(half_width > 0)) throw ContractViolation("box: need dim > 0 and half_width > 0");
  Domain d;
  d.kind_ = DomainKind::kBox;
  d.dim_ = dim;
  d.half_width_ = half_width;
  d.radius_ = half_width * std::sqrt(static_cast<double>(dim));
  return d;
}

Domain Domain::simplex(Eigen::Index dim) {
  if (dim <= 0) throw ContractViolation("simplex: need dim > 0");
  Domain d;
  d.kind_ = DomainKind::kSimplex;
  d.dim_ = dim;
  d.radius_ = 1.0;
  return d;
}

Domain Domain::trace_norm_ball(Eigen::Index rows, Eigen::Index cols, double delta,
                               PowerIterationOptions power) {
  if (rows <= 0 || cols <= 0 || !(delta > 0))
    throw ContractViolation("trace_norm_ball: need rows, cols > 0 and delta > 0");
  if (!(power.rel_tol > 0) || power.max_iters <= 0)
    throw ContractViolation("trace_norm_ball: invalid power iteration options");
  Domain d;
  d.kind_ = DomainKind::kTraceNormBall;
  d.dim_ = rows * cols;
  d.rows_ = rows;
  d.cols_ = cols;
  d.delta_ = delta;
  // ||X||_F <= ||X||_*, so the Frobenius ball of radius delta encloses K.
  d.radius_ = delta;
  d.power_ = power;
  return d;
}

Domain Domain::custom(Eigen::Index dim, double radius, LinearOracle oracle,
                      FeasibilityChecker checker) {
  if (dim <= 0 || !(radius > 0)) throw ContractViolation("custom: need dim > 0 and radius > 0");
  if (!oracle) throw ContractViolation("custom: linear oracle required");
  Domain d;
  d.kind_ = DomainKind::kCustom;
  d.dim_ = dim;
  d.radius_ = radius;
  d.custom_oracle_ = std::make_shared<const LinearOracle>(std::move(oracle));
  if (checker) d.custom_checker_ = std::make_shared<const FeasibilityChecker>(std::move(checker));
  return d;
}

SingularPair top_singular_pair(const Eigen::Ref<const RowMajorMatrix>& g,
                               const PowerIterationOptions& options, std::uint64_t seed) {
  SingularPair out;
  const Eigen::Index n = g.cols();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  v.normalize();

  Eigen::VectorXd gv = g * v;
  double rayleigh = gv.squaredNorm();
  double residual = 1.0;
  for (int it = 1; it <= options.max_iters; ++it) {
    Eigen::VectorXd w = g.transpose() * gv;
    const double wn = w.norm();
    if (wn == 0.0) {
      // Start vector in the null space: G v = 0 for this v but G != 0.
      // Restart along the row with the largest norm.
      Eigen::Index r = 0;
      g.rowwise().squaredNorm().maxCoeff(&r);
      w = g.row(r).transpose();
      if (w.norm() == 0.0) {
        // G = 0: every unit pair is a top singular pair.
        out.sigma = 0.0;
        out.v = v;
        out.u = Eigen::VectorXd::Unit(g.rows(), 0);
        return out;
      }
      v = w.normalized();
      gv = g * v;
      rayleigh = gv.squaredNorm();
      continue;
    }
    v = w / wn;
    gv = g * v;
    const double next = gv.squaredNorm();
    residual = std::abs(next - rayleigh) / std::max(next, 1e-300);
    rayleigh = next;
    out.iterations = it;
    if (residual <= options.rel_tol) {
      out.sigma = std::sqrt(rayleigh);
      out.v = v;
      out.u = out.sigma > 0 ? Eigen::VectorXd(gv / out.sigma) : Eigen::VectorXd::Zero(g.rows());
      return out;
    }
  }
  if (!options.exact_fallback) throw OracleConvergenceError("power iteration did not converge", residual);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.sigma = svd.singularValues()(0);
  out.u = svd.matrixU().col(0);
  out.v = svd.matrixV().col(0);
  return out;
}

Point Domain::linear_minimize(const Point& direction, std::uint64_t seed) const {
  require_point(direction, dim_, "linear_minimize");
  switch (kind_) {
    case DomainKind::kBall: {
      const double n = direction.norm();
      if (n == 0.0) return origin();
      return -radius_ / n * direction;
    }
    case DomainKind::kBox: {
      Point v(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) {
        v(i) = direction(i) > 0 ? -half_width_ : (direction(i) < 0 ? half_width_ : 0.0);
      }
      return v;
    }
    case DomainKind::kSimplex: {
      Eigen::Index arg = 0;
      const double m = direction.minCoeff(&arg);
      Point v = origin();
      if (m < 0) v(arg) = 1.0;
      return v;
    }
    case DomainKind::kTraceNormBall: {
      auto g = as_matrix(direction, rows_, cols_);
      if (g.squaredNorm() == 0.0) return origin();
      const SingularPair top = top_singular_pair(g, power_, seed);
      Point v(dim_);
      as_matrix(v, rows_, cols_).noalias() = -delta_ * top.u * top.v.transpose();
      return v;
    }
    case DomainKind::kCustom: {
      Point v = (*custom_oracle_)(direction);
      require_point(v, dim_, "custom linear oracle output");
      return v;
    }
  }
  throw ContractViolation("unknown domain kind");
}

double nuclear_norm(const Point& p, Eigen::Index rows, Eigen::Index cols) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_matrix(p, rows, cols));
  return svd.singularValues().sum();
}

bool Domain::feasibility_check(const Point& p, double tol) const {
  require_point(p, dim_, "feasibility_check");
  switch (kind_) {
    case DomainKind::kBall: return p.norm() <= radius_ + tol;
    case DomainKind::kBox: return p.cwiseAbs().maxCoeff() <= half_width_ + tol;
    case DomainKind::kSimplex: return p.minCoeff() >= -tol && p.sum() <= 1.0 + tol;
    case DomainKind::kTraceNormBall: return nuclear_norm(p, rows_, cols_) <= delta_ + tol;
    case DomainKind::kCustom:
      if (!custom_checker_) throw CapabilityMissing("custom domain has no feasibility checker");
      return (*custom_checker_)(p, tol);
  }
  return false;
}

Point project_capped_simplex(const Point& p, double scale) {
  Point x = p.cwiseMax(0.0);
  if (x.sum() <= scale) return x;
  // Constraint sum = scale is active: sort-based projection onto the scaled
  // probability simplex.
  std::vector<double> u(p.data(), p.data() + p.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - scale) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0) theta = candidate;
  }
  return (p.array() - theta).cwiseMax(0.0).matrix();
}

Point clip_to_enclosing_ball(double radius, const Point& p) {
  const double n = p.norm();
  const double s = std::max(1.0, n / radius);
  return p / s;
}

Point Domain::exact_projection(const Point& p) const {
  require_point(p, dim_, "exact_projection");
  switch (kind_) {
    case DomainKind::kBall: return clip_to_enclosing_ball(radius_, p);
    case DomainKind::kBox: return p.cwiseMax(-half_width_).cwiseMin(half_width_);
    case DomainKind::kSimplex: return project_capped_simplex(p, 1.0);
    case DomainKind::kTraceNormBall: {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(as_matrix(p, rows_, cols_),
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd sigma = project_capped_simplex(svd.singularValues(), delta_);
      Point out(dim_);
      as_matrix(out, rows_, cols_).noalias() =
          svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
      return out;
    }
    case DomainKind::kCustom: break;
  }
  throw CapabilityMissing("domain kind " + to_string(kind_) + " has no exact projection");
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(dim=" << dim_;
  switch (kind_) {
    case DomainKind::kBall: os << ", radius=" << radius_; break;
    case DomainKind::kBox: os << ", half_width=" << half_width_; break;
    case DomainKind::kTraceNormBall:
      os << ", rows=" << rows_ << ", cols=" << cols_ << ", delta=" << delta_
         << ", power_tol=" << power_.rel_tol << ", power_max_iters=" << power_.max_iters
         << ", power_fallback=" << (power_.exact_fallback ? "svd" : "error");
      break;
    default: break;
  }
  os << ")";
  return os.str();
}

}  // namespace pfol

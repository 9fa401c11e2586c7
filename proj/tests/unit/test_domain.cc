#include <gtest/gtest.h>

#include <random>

#include "pfol/domain.hpp"
#include "pfol/errors.hpp"
#include "support.hpp"

namespace pfol {
namespace {

using testing::sample_feasible;
using testing::vec;

// Projection onto {x >= 0, sum x <= 1} by bisection on the shift; independent
// of the sort-based routine in the library.
Point bisection_capped_simplex(const Point& p) {
  Point x = p.cwiseMax(0.0);
  if (x.sum() <= 1.0) return x;
  double lo = 0.0, hi = p.maxCoeff();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((p.array() - mid).cwiseMax(0.0).sum() > 1.0 ? lo : hi) = mid;
  }
  return (p.array() - 0.5 * (lo + hi)).cwiseMax(0.0).matrix();
}

std::vector<Domain> all_kinds() {
  return {Domain::ball(5, 2.0), Domain::box(4, 0.5), Domain::simplex(6),
          testing::trace_ball(4, 3, 1.5)};
}

TEST(LinearMinimize, BallIsMinusScaledDirection) {
  const Point v = Domain::ball(2, 1.0).linear_minimize(vec({3, 4}));
  EXPECT_NEAR(v(0), -0.6, 1e-15);
  EXPECT_NEAR(v(1), -0.8, 1e-15);
}

TEST(LinearMinimize, SimplexPicksMostNegativeVertex) {
  EXPECT_EQ(Domain::simplex(3).linear_minimize(vec({2, -1, 5})), vec({0, 1, 0}));
  EXPECT_EQ(Domain::simplex(3).linear_minimize(vec({2, 1, 5})), vec({0, 0, 0}));
}

TEST(LinearMinimize, BoxUsesSigns) {
  EXPECT_EQ(Domain::box(3, 0.5).linear_minimize(vec({1, -2, 0})), vec({-0.5, 0.5, 0}));
}

TEST(LinearMinimize, TraceNormRankOneDirection) {
  const Point v = testing::trace_ball(2, 2, 2.0).linear_minimize(vec({1, 0, 0, 0}), 3);
  EXPECT_NEAR(v(0), -2.0, 1e-8);
  EXPECT_NEAR(v(1), 0.0, 1e-6);
  EXPECT_NEAR(v(2), 0.0, 1e-6);
  EXPECT_NEAR(v(3), 0.0, 1e-8);
}

TEST(LinearMinimize, TraceNormMatchesFullSvd) {
  std::mt19937_64 rng(11);
  const Domain K = testing::trace_ball(6, 4, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Point g = testing::gaussian(rng, K.dim());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_matrix(g, 6, 4), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Point v = K.linear_minimize(g, rng());
    EXPECT_NEAR(g.dot(v), -3.0 * svd.singularValues()(0), 1e-7 * svd.singularValues()(0));
    const auto sv = testing::singular_values(v, 6, 4);
    EXPECT_NEAR(sv(0), 3.0, 1e-9);
    EXPECT_NEAR(sv.tail(sv.size() - 1).sum(), 0.0, 1e-9);
  }
}

TEST(LinearMinimize, ZeroDirectionGivesFeasiblePoint) {
  for (const Domain& K : all_kinds()) EXPECT_TRUE(K.feasibility_check(K.linear_minimize(K.origin()), 1e-12));
}

TEST(LinearMinimize, BeatsSampledFeasiblePoints) {
  std::mt19937_64 rng(5);
  for (const Domain& K : all_kinds()) {
    const double tol = K.kind() == DomainKind::kTraceNormBall ? 1e-6 : 1e-9;
    for (int trial = 0; trial < 20; ++trial) {
      const Point g = testing::gaussian(rng, K.dim());
      const Point v = K.linear_minimize(g, rng());
      ASSERT_TRUE(K.feasibility_check(v, tol)) << K.describe();
      for (int j = 0; j < 1000; ++j) ASSERT_LE(g.dot(v), g.dot(sample_feasible(K, rng)) + 1e-6);
    }
  }
}

TEST(LinearMinimize, RejectsWrongDimensionAndNonFinite) {
  const Domain K = Domain::ball(3, 1.0);
  EXPECT_THROW(K.linear_minimize(vec({1, 2})), ContractViolation);
  EXPECT_THROW(K.linear_minimize(vec({1, NAN, 0})), ContractViolation);
}

TEST(LinearMinimize, PowerIterationFailureCarriesResidual) {
  PowerIterationOptions tight;
  tight.rel_tol = 1e-300;
  tight.max_iters = 2;
  const Domain K = Domain::trace_norm_ball(5, 5, 1.0, tight);
  std::mt19937_64 rng(2);
  try {
    K.linear_minimize(testing::gaussian(rng, 25), 1);
    FAIL() << "expected OracleConvergenceError";
  } catch (const OracleConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Feasibility, Examples) {
  EXPECT_TRUE(Domain::ball(2, 1.0).feasibility_check(vec({0, 0}), 0.0));
  EXPECT_FALSE(Domain::simplex(2).feasibility_check(vec({0.5, 0.6}), 1e-9));
  EXPECT_TRUE(testing::trace_ball(2, 2, 2.0).feasibility_check(vec({2, 0, 0, 0}), 1e-9));
  EXPECT_FALSE(testing::trace_ball(2, 2, 2.0).feasibility_check(vec({2, 0, 0, 0.1}), 1e-9));
  EXPECT_FALSE(Domain::box(2, 1.0).feasibility_check(vec({0, 1.01}), 1e-9));
}

TEST(Feasibility, OriginAlwaysFeasibleAndDiameterIsTwiceRadius) {
  for (const Domain& K : all_kinds()) {
    EXPECT_TRUE(K.feasibility_check(K.origin(), 0.0));
    EXPECT_DOUBLE_EQ(K.diameter(), 2.0 * K.radius());
  }
}

TEST(Feasibility, CustomWithoutCheckerIsMissingCapability) {
  const Domain K = Domain::custom(2, 1.0, [](const Point& g) { return Point(-g.normalized()); });
  EXPECT_THROW(K.feasibility_check(vec({0, 0}), 0.0), CapabilityMissing);
  EXPECT_THROW(K.exact_projection(vec({0, 0})), CapabilityMissing);
  EXPECT_FALSE(K.has_exact_projection());
}

TEST(Projection, Examples) {
  EXPECT_EQ(Domain::ball(2, 1.0).exact_projection(vec({2, 0})), vec({1, 0}));
  EXPECT_EQ(Domain::ball(2, 1.0).exact_projection(vec({0.3, 0.4})), vec({0.3, 0.4}));
  const Point s = Domain::simplex(2).exact_projection(vec({0.8, 0.8}));
  EXPECT_NEAR(s(0), 0.5, 1e-12);
  EXPECT_NEAR(s(1), 0.5, 1e-12);
}

TEST(Projection, SimplexAgreesWithGridSearch) {
  // Brute-force nearest point on a 1e-3 grid of the 2-d capped simplex.
  const Point p = vec({0.8, 0.8});
  double best = 1e9;
  Point arg;
  for (int i = 0; i <= 1000; ++i) {
    for (int j = 0; i + j <= 1000; ++j) {
      const Point q = vec({i / 1000.0, j / 1000.0});
      if ((q - p).squaredNorm() < best) best = (q - p).squaredNorm(), arg = q;
    }
  }
  EXPECT_LT((Domain::simplex(2).exact_projection(p) - arg).norm(), 2e-3);
}

TEST(Projection, SimplexAgreesWithBisection) {
  std::mt19937_64 rng(8);
  const Domain K = Domain::simplex(7);
  for (int trial = 0; trial < 500; ++trial) {
    const Point p = testing::gaussian(rng, 7, trial % 2 ? 1.0 : 0.2);
    EXPECT_LT((K.exact_projection(p) - bisection_capped_simplex(p)).norm(), 1e-9);
  }
}

TEST(Projection, TraceNormSatisfiesOptimalityCondition) {
  std::mt19937_64 rng(9);
  const Domain K = testing::trace_ball(5, 4, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Point p = testing::gaussian(rng, K.dim());
    const Point q = K.exact_projection(p);
    EXPECT_LE(testing::singular_values(q, 5, 4).sum(), 1.0 + 1e-9);
    // <p - q, z - q> <= 0 for every z in K.
    for (int j = 0; j < 200; ++j) EXPECT_LE((p - q).dot(sample_feasible(K, rng) - q), 1e-8);
  }
}

TEST(Projection, IdempotentAndNonExpansive) {
  std::mt19937_64 rng(10);
  for (const Domain& K : all_kinds()) {
    for (int trial = 0; trial < 200; ++trial) {
      const Point p = testing::gaussian(rng, K.dim(), 2.0);
      const Point q = testing::gaussian(rng, K.dim(), 2.0);
      const Point pp = K.exact_projection(p);
      EXPECT_LT((K.exact_projection(pp) - pp).norm(), 1e-9);
      EXPECT_LE((pp - K.exact_projection(q)).norm(), (p - q).norm() + 1e-9);
    }
  }
}

TEST(ClipToBall, Examples) {
  EXPECT_EQ(clip_to_enclosing_ball(1.0, vec({0.5, 0})), vec({0.5, 0}));
  const Point a = clip_to_enclosing_ball(1.0, vec({3, 4}));
  EXPECT_NEAR(a(0), 0.6, 1e-15);
  EXPECT_NEAR(a(1), 0.8, 1e-15);
  EXPECT_EQ(clip_to_enclosing_ball(2.0, vec({0, -6})), vec({0, -2}));
}

TEST(ClipToBall, NormBoundedAndFixedInside) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Point p = testing::gaussian(rng, 4, 3.0);
    const Point c = clip_to_enclosing_ball(2.0, p);
    EXPECT_LE(c.norm(), 2.0 * (1 + 1e-15));
    if (p.norm() <= 2.0) EXPECT_EQ(c, p);
  }
}

TEST(NuclearNorm, MatchesSingularValueSum) {
  const Point p = vec({3, 0, 0, -4});
  EXPECT_NEAR(nuclear_norm(p, 2, 2), 7.0, 1e-12);
}

}  // namespace
}  // namespace pfol

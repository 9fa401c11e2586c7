#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "pfol/env.hpp"
#include "pfol/errors.hpp"
#include "pfol/pold.hpp"
#include "support.hpp"

namespace pfol {
namespace {

using testing::vec;

TEST(PoldParams, ExpertCount) {
  EXPECT_EQ(pold_num_experts(3000), 10);
  for (int T : {1, 7, 64, 1000, 4096, 100000}) {
    const int expected = static_cast<int>(std::ceil(0.75 * std::log2(1.0 + 4.0 * T / 7.0))) + 1;
    EXPECT_EQ(pold_num_experts(T), expected) << T;
  }
}

TEST(PoldParams, StepSizeGridDoubles) {
  const PoldParams p = PoldParams::from_problem(1000, 2.0, 0.5);
  const double base = std::pow(7.0 * 4.0 / (2.0 * 0.25 * 1000), 0.75);
  ASSERT_EQ(p.step_sizes.size(), static_cast<std::size_t>(p.num_experts));
  for (int i = 0; i < p.num_experts; ++i) EXPECT_NEAR(p.step_sizes[i], base * std::pow(2.0, i), 1e-12);
  EXPECT_DOUBLE_EQ(p.alpha, std::sqrt(8.0 / 1000));
}

TEST(PoldWeights, InitialWeightsTelescopeToOne) {
  for (int n = 1; n <= 50; ++n) {
    const std::vector<double> w = pold_initial_weights(n);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12) << n;
  }
  EXPECT_EQ(pold_initial_weights(1), std::vector<double>{1.0});
}

TEST(Hedge, EqualLossesLeaveWeightsUnchanged) {
  const std::vector<double> w{0.2, 0.3, 0.5}, l{0.4, 0.4, 0.4};
  const auto out = hedge_update(w, l, 2.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(out[i], w[i], 1e-15);
}

TEST(Hedge, TwoExpertExampleMatchesSoftmax) {
  const std::vector<double> w{0.5, 0.5}, l{0.0, 1.0};
  const auto out = hedge_update(w, l, 1.0);
  const double z = std::exp(0.0) + std::exp(-1.0);
  EXPECT_NEAR(out[0], 1.0 / z, 1e-15);
  EXPECT_NEAR(out[1], std::exp(-1.0) / z, 1e-15);
  EXPECT_NEAR(out[0], 0.7311, 1e-4);
}

TEST(Hedge, ZeroRateIsInert) {
  const std::vector<double> w{0.1, 0.9}, l{0.0, 1.0};
  const auto out = hedge_update(w, l, 0.0);
  EXPECT_NEAR(out[0], 0.1, 1e-15);
  EXPECT_NEAR(out[1], 0.9, 1e-15);
}

TEST(Hedge, RejectsLossesOutsideTheUnitInterval) {
  const std::vector<double> w{0.5, 0.5};
  EXPECT_THROW(hedge_update(w, std::vector<double>{0.0, 1.01}, 1.0), AssumptionViolation);
  EXPECT_THROW(hedge_update(w, std::vector<double>{-0.1, 0.5}, 1.0), AssumptionViolation);
  EXPECT_NO_THROW(hedge_update(w, std::vector<double>{0.0, 1.0 + 5e-10}, 1.0));
}

TEST(Pold, IdenticalExpertsPredictTheirCommonPoint) {
  const Domain K = Domain::ball(2, 1.0);
  Pold pold(K, PoldParams::from_problem(100, 2.0, 1.0), vec({0.3, -0.2}));
  EXPECT_LT((pold.predict() - vec({0.3, -0.2})).norm(), 1e-15);
}

TEST(Pold, WeightMassMovesToTheBestExpert) {
  const Domain K = Domain::ball(2, 1.0);
  Pold pold(K, PoldParams::from_problem(400, 2.0, 1.0), K.origin());
  const std::size_t n = pold.num_experts();
  const std::size_t favoured = 3;
  std::vector<Point> grads(n, Point::Zero(2));
  for (int t = 0; t < 400; ++t) {
    std::vector<double> losses(n, 0.9);
    losses[favoured] = 0.1;
    pold.update(losses, grads);
  }
  const auto& w = pold.weights();
  EXPECT_EQ(std::max_element(w.begin(), w.end()) - w.begin(), static_cast<long>(favoured));
}

TEST(Pold, WeightsStayOnTheSimplexAndPredictionsFeasible) {
  StreamSpec spec;
  spec.kind = StreamKind::kDriftingQuadratic;
  spec.horizon = 512;
  spec.segment_length = 128;
  spec.noise = 0.2;
  const Domain K = Domain::simplex(5);
  const auto stream = make_stream(spec, K);
  Pold pold(K, PoldParams::from_problem(512, K.diameter(), stream->lipschitz()), K.origin(), 3);
  for (int t = 1; t <= 512; ++t) {
    ASSERT_TRUE(K.feasibility_check(pold.predict(), 1e-9));
    pold.observe(stream->at(t));
    const auto& w = pold.weights();
    ASSERT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);
    for (double v : w) ASSERT_GE(v, 0.0);
  }
}

TEST(Pold, MetaRegretWithinTheExpertBound) {
  StreamSpec spec;
  spec.kind = StreamKind::kPiecewiseLinear;
  spec.horizon = 1024;
  spec.segment_length = 256;
  spec.noise = 0.3;
  const Domain K = Domain::ball(4, 1.0);
  const auto stream = make_stream(spec, K);
  Pold pold(K, PoldParams::from_problem(1024, K.diameter(), stream->lipschitz()), K.origin(), 1);
  std::vector<double> expert_loss(pold.num_experts(), 0.0);
  double meta = 0.0;
  for (int t = 1; t <= 1024; ++t) {
    for (std::size_t i = 0; i < pold.num_experts(); ++i)
      expert_loss[i] += stream->value(t, pold.experts()[i].predict());
    meta += pold.observe(stream->at(t)).loss_value;
  }
  for (std::size_t i = 0; i < expert_loss.size(); ++i) {
    const double bound = std::sqrt(2.0 * 1024) / 4.0 * (1.0 + 2.0 * std::log(i + 2.0));
    EXPECT_LE(meta - expert_loss[i], bound + 1e-6) << "expert " << i + 1;
  }
}

}  // namespace
}  // namespace pfol

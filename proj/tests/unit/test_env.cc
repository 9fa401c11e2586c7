#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "pfol/env.hpp"
#include "pfol/errors.hpp"
#include "support.hpp"

namespace pfol {
namespace {

namespace fs = std::filesystem;
using testing::sample_feasible;
using testing::vec;

const std::string kData = PFOL_TEST_DATA_DIR;

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("pfol_test_" + name);
  std::ofstream(p) << content;
  return p;
}

struct Case {
  std::string label;
  StreamSpec spec;
  Domain domain;
};

std::vector<Case> stream_cases() {
  std::vector<Case> cases;
  StreamSpec q;
  q.kind = StreamKind::kDriftingQuadratic;
  q.horizon = 64;
  q.segment_length = 16;
  q.noise = 0.3;
  q.center_norm = 0.8;
  cases.push_back({"quadratic/ball", q, Domain::ball(6, 2.0)});
  cases.push_back({"quadratic/simplex", q, Domain::simplex(5)});
  StreamSpec l = q;
  l.kind = StreamKind::kPiecewiseLinear;
  cases.push_back({"linear/box", l, Domain::box(4, 0.5)});
  StreamSpec m;
  m.kind = StreamKind::kMatrixCompletion;
  m.horizon = 64;
  m.segment_length = 16;
  m.batch = 5;
  cases.push_back({"matrix/synthetic", m, testing::trace_ball(8, 6, 3.0)});
  StreamSpec mr = m;
  mr.ratings_path = kData + "/ratings_fixture.tsv";
  cases.push_back({"matrix/ratings", mr, testing::trace_ball(50, 50, 20.0)});
  StreamSpec g;
  g.kind = StreamKind::kMulticlassLogistic;
  g.horizon = 64;
  g.segment_length = 16;
  cases.push_back({"logistic/synthetic", g, testing::trace_ball(3, 5, 2.0)});
  StreamSpec gf = g;
  gf.features_path = kData + "/features_fixture.libsvm";
  cases.push_back({"logistic/libsvm", gf, testing::trace_ball(4, 6, 5.0)});
  return cases;
}

TEST(Ratings, ParsesTheTabSeparatedFormat) {
  const auto p = write_temp("one.tsv", "196\t242\t3\t881250949\n");
  const auto r = load_ratings_file(p.string(), -1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], (Rating{195, 241, 3.0}));
}

TEST(Ratings, LimitTakesAPrefix) {
  EXPECT_TRUE(load_ratings_file(kData + "/ratings_5.tsv", 0).empty());
  const auto all = load_ratings_file(kData + "/ratings_5.tsv", -1);
  const auto three = load_ratings_file(kData + "/ratings_5.tsv", 3);
  ASSERT_EQ(all.size(), 5u);
  ASSERT_EQ(three.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(three[i], all[i]);
  EXPECT_EQ(load_ratings_file(kData + "/ratings_fixture.tsv", -1).size(), 1000u);
}

TEST(Ratings, MalformedLineIsNamed) {
  const auto p = write_temp("bad.tsv", "1\t2\t3\t4\n1\t2\tx\t4\n");
  try {
    load_ratings_file(p.string(), -1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_ratings_file("/nonexistent/ratings.tsv", -1), Error);
}

TEST(Libsvm, ParsesLabelsAndSparseFeatures) {
  const auto p = write_temp("a.libsvm", "2 1:0.5 3:-1\n1 2:2\n");
  const auto s = load_libsvm_file(p.string(), 3, 2, -1);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].label, 1);
  EXPECT_EQ(s[0].features, vec({0.5, 0, -1}));
  EXPECT_EQ(s[1].features, vec({0, 2, 0}));
  const auto bad = write_temp("b.libsvm", "3 1:0.5\n");
  EXPECT_THROW(load_libsvm_file(bad.string(), 3, 2, -1), Error);
  const auto bad_index = write_temp("c.libsvm", "1 4:0.5\n");
  EXPECT_THROW(load_libsvm_file(bad_index.string(), 3, 2, -1), Error);
}

TEST(Streams, LossesInUnitIntervalAndLipschitz) {
  std::mt19937_64 rng(1);
  for (const Case& c : stream_cases()) {
    const auto stream = make_stream(c.spec, c.domain);
    const double G = stream->lipschitz();
    for (int j = 0; j < 10000; ++j) {
      const int t = 1 + static_cast<int>(rng() % c.spec.horizon);
      const Point x = sample_feasible(c.domain, rng);
      const double v = stream->value(t, x);
      ASSERT_GE(v, 0.0) << c.label;
      ASSERT_LE(v, 1.0) << c.label;
      ASSERT_LE(stream->gradient(t, x).norm(), G * (1 + 1e-6)) << c.label;
      if (j % 10 == 0) {
        const Point y = sample_feasible(c.domain, rng);
        if ((x - y).norm() > 1e-9)
          ASSERT_LE(std::abs(v - stream->value(t, y)) / (x - y).norm(), G * (1 + 1e-6)) << c.label;
      }
    }
  }
}

TEST(Streams, DriftNegatesTheArgument) {
  std::mt19937_64 rng(2);
  for (const Case& c : stream_cases()) {
    const auto stream = make_stream(c.spec, c.domain);
    const int L = stream->segment_length();
    for (int j = 0; j < 50; ++j) {
      const int t = 1 + static_cast<int>(rng() % (c.spec.horizon - L));
      const Point x = sample_feasible(c.domain, rng);
      ASSERT_NEAR(stream->value(t + L, x), stream->value(t, Point(-x)), 1e-12) << c.label;
    }
    EXPECT_EQ(stream->drift_sign(1), 1.0);
    EXPECT_EQ(stream->drift_sign(L + 1), -1.0);
    EXPECT_EQ(stream->num_segments(), 4);
  }
}

TEST(Streams, DeterministicGivenTheSeed) {
  std::mt19937_64 rng(3);
  for (const Case& c : stream_cases()) {
    const auto a = make_stream(c.spec, c.domain), b = make_stream(c.spec, c.domain);
    StreamSpec other = c.spec;
    other.seed += 1;
    const auto d = make_stream(other, c.domain);
    bool differs = false;
    for (int t = 1; t <= c.spec.horizon; ++t) {
      const Point x = sample_feasible(c.domain, rng);
      ASSERT_EQ(a->value(t, x), b->value(t, x));
      ASSERT_EQ(a->gradient(t, x), b->gradient(t, x));
      differs = differs || a->value(t, x) != d->value(t, x);
    }
    const bool from_file = !c.spec.ratings_path.empty() || !c.spec.features_path.empty();
    if (!from_file) EXPECT_TRUE(differs) << c.label;
  }
}

TEST(Streams, OutOfRangeRoundIsRejected) {
  const Case c = stream_cases()[0];
  const auto stream = make_stream(c.spec, c.domain);
  EXPECT_THROW(stream->value(0, c.domain.origin()), ContractViolation);
  EXPECT_THROW(stream->value(c.spec.horizon + 1, c.domain.origin()), ContractViolation);
}

TEST(MatrixCompletion, ZeroLossAtTheObservedTargets) {
  StreamSpec s;
  s.kind = StreamKind::kMatrixCompletion;
  s.horizon = 4;
  s.batch = 5;
  s.ratings_path = kData + "/ratings_5.tsv";
  const Domain K = testing::trace_ball(50, 50, 100.0);
  const auto stream = make_stream(s, K);
  Point X = Point::Zero(2500);
  for (const Rating& r : load_ratings_file(s.ratings_path, -1)) X(r.row * 50 + r.col) = r.value;
  EXPECT_EQ(stream->value(1, X), 0.0);
  EXPECT_GT(stream->value(1, K.origin()), 0.0);
  // Subgradient: sign on observed entries, zero elsewhere.
  const Point g = stream->gradient(1, K.origin());
  EXPECT_EQ((g.array() != 0).count(), 5);
  EXPECT_LE(g.maxCoeff(), 0.0);
}

TEST(MatrixCompletion, RatingsOutsideTheDomainAreRejected) {
  StreamSpec s;
  s.kind = StreamKind::kMatrixCompletion;
  s.ratings_path = kData + "/ratings_fixture.tsv";
  EXPECT_THROW(make_stream(s, testing::trace_ball(10, 10, 1.0)), ContractViolation);
  EXPECT_THROW(make_stream(s, Domain::ball(4, 1.0)), ContractViolation);
}

TEST(Logistic, UniformScoresGiveLogOfClassCount) {
  StreamSpec s;
  s.kind = StreamKind::kMulticlassLogistic;
  s.horizon = 8;
  const auto stream = make_stream(s, testing::trace_ball(4, 6, 2.0));
  for (int t = 1; t <= 8; ++t)
    EXPECT_NEAR(stream->value(t, Point::Zero(24)), stream->scale_factor() * std::log(4.0), 1e-15);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  StreamSpec s;
  s.kind = StreamKind::kMulticlassLogistic;
  s.horizon = 8;
  const Domain K = testing::trace_ball(3, 4, 2.0);
  const auto stream = make_stream(s, K);
  std::mt19937_64 rng(4);
  for (int t = 1; t <= 8; ++t) {
    const Point x = sample_feasible(K, rng);
    const Point g = stream->gradient(t, x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Point e = Point::Zero(x.size());
      e(i) = 1e-6;
      EXPECT_NEAR((stream->value(t, x + e) - stream->value(t, x - e)) / 2e-6, g(i), 1e-7);
    }
  }
}

TEST(Quadratic, GradientVanishesAtTheRoundCenter) {
  StreamSpec s;
  s.kind = StreamKind::kDriftingQuadratic;
  s.horizon = 16;
  s.segment_length = 4;
  s.noise = 0.2;
  const Domain K = Domain::ball(3, 1.0);
  const auto stream = make_stream(s, K);
  for (int t = 1; t <= 16; ++t) {
    const Point c = stream->offline_minimize(t, t, nullptr).point;
    EXPECT_LT(stream->gradient(t, c).norm(), 1e-12);
    EXPECT_NEAR(stream->value(t, c), 0.0, 1e-15);
  }
}

TEST(Comparators, FixedModeHasNoPath) {
  const Case c = stream_cases()[0];
  const auto stream = make_stream(c.spec, c.domain);
  const ComparatorSequence seq = comparator_sequence(*stream, ComparatorMode::kFixed);
  EXPECT_EQ(seq.path_length, 0.0);
  ASSERT_EQ(seq.points.size(), static_cast<std::size_t>(c.spec.horizon));
  for (const Point& p : seq.points) EXPECT_EQ(p, seq.points[0]);
}

TEST(Comparators, AlternatingCentersGiveClosedFormPath) {
  StreamSpec s;
  s.kind = StreamKind::kDriftingQuadratic;
  s.horizon = 400;
  s.segment_length = 100;
  s.center_norm = 0.5;
  const Domain K = Domain::ball(3, 1.0);
  const auto stream = make_stream(s, K);
  const ComparatorSequence seq = comparator_sequence(*stream, ComparatorMode::kPerSegment);
  EXPECT_NEAR(seq.path_length, 3 * 2 * 0.5, 1e-12);
  EXPECT_NEAR(seq.points[0].norm(), 0.5, 1e-12);
  EXPECT_LT((seq.points[0] + seq.points[100]).norm(), 1e-12);
  // Independent check: projected gradient on each segment's average loss.
  for (int k = 0; k < 4; ++k) {
    const int b = 1 + 100 * k, e = b + 99;
    const OfflineSolution pg = projected_gradient_oracle(
        K, [&](const Point& x) { return stream->window_value(b, e, x) / 100; },
        [&](const Point& x) {
          Point g = Point::Zero(3);
          for (int t = b; t <= e; ++t) g += stream->gradient(t, x);
          return Point(g / 100);
        },
        stream->lipschitz(), K.origin(), 20000, 1e-10);
    EXPECT_LT((pg.point - seq.points[b - 1]).norm(), 1e-4);
  }
}

TEST(Comparators, SingleSegmentEqualsFixed) {
  StreamSpec s;
  s.kind = StreamKind::kPiecewiseLinear;
  s.horizon = 50;
  s.noise = 0.4;
  const auto stream = make_stream(s, Domain::box(3, 1.0));
  const auto a = comparator_sequence(*stream, ComparatorMode::kPerSegment);
  const auto b = comparator_sequence(*stream, ComparatorMode::kFixed);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.path_length, 0.0);
}

TEST(Comparators, OfflineOptimumBeatsSampledPoints) {
  std::mt19937_64 rng(5);
  for (const Case& c : stream_cases()) {
    const auto stream = make_stream(c.spec, c.domain);
    const OfflineSolution sol = stream->offline_minimize(1, 16, nullptr);
    EXPECT_NEAR(sol.value, stream->window_value(1, 16, sol.point), 1e-9) << c.label;
    for (int j = 0; j < 100; ++j)
      EXPECT_LE(sol.value, stream->window_value(1, 16, sample_feasible(c.domain, rng)) + 1e-6) << c.label;
  }
}

TEST(Seeds, MixSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(mix_seed(1, 2, 3), mix_seed(1, 2, 3));
  EXPECT_NE(mix_seed(1, 2, 3), mix_seed(1, 3, 3));
  EXPECT_NE(mix_seed(1, 2, 3), mix_seed(2, 2, 3));
  EXPECT_NE(mix_seed(1, 2, 3), mix_seed(1, 2, 4));
}

}  // namespace
}  // namespace pfol

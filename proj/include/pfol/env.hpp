#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "pfol/domain.hpp"
#include "pfol/learner.hpp"

namespace pfol {

enum class StreamKind {
  kDriftingQuadratic,   // s ||x - c_t||^2, c_t = +-c (+ noise)
  kPiecewiseLinear,     // affine <a_t, x> mapped into [0, 1], a_t = +-a (+ noise)
  kMatrixCompletion,    // sum over observed entries |X_ij - M_ij|, M negated on odd segments
  kMulticlassLogistic,  // multivariate logistic loss, features negated on odd segments
};

std::string to_string(StreamKind kind);
StreamKind stream_kind_from_string(const std::string& s);

struct StreamSpec {
  StreamKind kind = StreamKind::kDriftingQuadratic;
  int horizon = 1024;
  int segment_length = 0;  // rounds between drifts; 0 = no drift
  std::uint64_t seed = 1;

  // drifting_quadratic, piecewise_linear (both as fractions of the radius R)
  double center_norm = 0.5;
  double noise = 0.0;

  // matrix_completion
  int batch = 10;           // observed entries per round
  int rank = 2;             // synthetic target rank
  double target_max = 1.0;  // synthetic target: max |M_ij|
  std::string ratings_path;
  int ratings_limit = -1;   // < 0: whole file

  // multiclass_logistic (classes = domain rows, features = domain cols)
  std::string features_path;
  int features_limit = -1;
  double feature_noise = 0.3;
};

/// One rating with 0-based indices.
struct Rating {
  int row = 0;
  int col = 0;
  double value = 0.0;
  bool operator==(const Rating&) const = default;
};

/// Reads "user \t item \t rating \t timestamp" lines (1-based indices) and
/// returns up to limit entries in file order (limit < 0: all). Throws
/// pfol::Error naming the line on malformed input.
std::vector<Rating> load_ratings_file(const std::string& path, int limit);

struct LabeledSample {
  int label = 0;  // 0-based class
  Eigen::VectorXd features;
};

/// Reads libsvm lines "label index:value ..." with 1-based labels in
/// [1, classes] and 1-based feature indices in [1, dim].
std::vector<LabeledSample> load_libsvm_file(const std::string& path, int dim, int classes,
                                            int limit);

/// Result of the offline comparator oracle over a window of rounds.
struct OfflineSolution {
  Point point;
  double value = 0.0;  // sum of f_t(point) over the window
  long iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// A loss stream generated from a StreamSpec over a fixed domain. Losses are
/// scaled by a certified constant so every f_t maps K into [0, 1].
class Stream : public LossStream {
 public:
  int horizon() const override { return spec_.horizon; }
  Eigen::Index dim() const override { return domain_.dim(); }
  double lipschitz() const override { return lipschitz_; }

  const StreamSpec& spec() const { return spec_; }
  const Domain& domain() const { return domain_; }
  double scale_factor() const { return scale_; }

  /// Effective segment length (horizon when there is no drift).
  int segment_length() const;
  int num_segments() const;
  /// 0-based segment of round t.
  int segment_of(int t) const;
  /// Position of t inside its segment, in [1, segment_length()]. Every
  /// segment replays the raw data of the first one, so
  /// f_{t + segment_length}(x) = f_t(-x).
  int phase(int t) const;
  /// +1 on even segments, -1 on odd ones.
  double drift_sign(int t) const;

  /// argmin over K of sum_{t=begin}^{end} f_t. warm_start may be null.
  virtual OfflineSolution offline_minimize(int begin, int end, const Point* warm_start) const = 0;

  /// offline_minimize memoized on (begin, end, warm start). Safe to call
  /// from several threads; results do not depend on call order.
  OfflineSolution solve(int begin, int end, const Point* warm_start) const;

  double window_value(int begin, int end, const Point& x) const;

  /// Resolved parameters (scaling constants, drift schedule, data sizes).
  virtual nlohmann::json metadata() const;

 protected:
  Stream(StreamSpec spec, Domain domain);
  void check_round(int t) const;

  StreamSpec spec_;
  Domain domain_;
  double scale_ = 1.0;
  double lipschitz_ = 1.0;

 private:
  using CacheKey = std::tuple<int, int, std::vector<double>>;
  mutable std::mutex cache_mutex_;
  mutable std::map<CacheKey, OfflineSolution> cache_;
};

std::unique_ptr<Stream> make_stream(const StreamSpec& spec, const Domain& domain);

enum class ComparatorMode { kFixed, kPerSegment };

std::string to_string(ComparatorMode mode);
ComparatorMode comparator_mode_from_string(const std::string& s);

struct ComparatorSequence {
  std::vector<Point> points;  // one per round
  double path_length = 0.0;
  std::vector<OfflineSolution> solves;
};

ComparatorSequence comparator_sequence(const Stream& stream, ComparatorMode mode);

/// Projected (sub)gradient descent on an averaged objective: step
/// D / (G sqrt(k)), best iterate kept, converged once the gradient-mapping
/// norm drops below tol.
OfflineSolution projected_gradient_oracle(const Domain& domain,
                                          const std::function<double(const Point&)>& value,
                                          const std::function<Point(const Point&)>& gradient,
                                          double lipschitz, const Point& start,
                                          int max_iters = 2000, double tol = 1e-6);

/// Deterministic per-(seed, t, salt) generator.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t t, std::uint64_t salt = 0);

}  // namespace pfol

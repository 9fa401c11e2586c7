#include "pfol/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <limits>
#include <span>
#include <sstream>

#include "pfol/errors.hpp"
#include "pfol/ip_oracle.hpp"

namespace pfol {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(d);
  do {
    for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

// Uniform in the ball of radius r.
Eigen::VectorXd random_in_ball(std::mt19937_64& rng, Eigen::Index d, double r) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Eigen::VectorXd dir = random_unit(rng, d);
  return r * std::pow(unif(rng), 1.0 / static_cast<double>(d)) * dir;
}

// log(1 + m e^a) for a >= 0 without overflow.
double log1p_scaled_exp(double m, double a) { return a + std::log(std::exp(-a) + m); }

std::string parse_error(const std::string& path, int line, const std::string& why) {
  std::ostringstream os;
  os << path << ":" << line << ": " << why;
  return os.str();
}

// --- drifting quadratic / piecewise linear --------------------------------

// Both synthetic vector streams share the per-round vectors v_t = sign_t c + xi_t.
class VectorDriftStream : public Stream {
 public:
  VectorDriftStream(const StreamSpec& spec, const Domain& domain, double magnitude,
                    double noise_radius)
      : Stream(spec, domain) {
    if (spec_.center_norm < 0 || spec_.noise < 0)
      throw ContractViolation("stream: center_norm and noise must be nonnegative");
    const Eigen::Index d = domain_.dim();
    std::mt19937_64 rng(mix_seed(spec_.seed, 0, 1));
    base_ = random_unit(rng, d);
    const int T = spec_.horizon;
    vectors_.resize(d, T);
    prefix_.setZero(d, T + 1);
    prefix_sq_.assign(T + 1, 0.0);
    for (int t = 1; t <= T; ++t) {
      Eigen::VectorXd v = magnitude * base_;
      if (spec_.noise > 0) {
        std::mt19937_64 r(mix_seed(spec_.seed, phase(t), 2));
        v += random_in_ball(r, d, noise_radius);
      }
      v *= drift_sign(t);
      vectors_.col(t - 1) = v;
      prefix_.col(t) = prefix_.col(t - 1) + v;
      prefix_sq_[t] = prefix_sq_[t - 1] + v.squaredNorm();
    }
  }

  const Eigen::VectorXd& base_direction() const { return base_; }
  Eigen::VectorXd vector_at(int t) const { return vectors_.col(t - 1); }

 protected:
  Eigen::VectorXd window_sum(int begin, int end) const { return prefix_.col(end) - prefix_.col(begin - 1); }

  Eigen::VectorXd base_;
  Eigen::MatrixXd vectors_;
  Eigen::MatrixXd prefix_;
  std::vector<double> prefix_sq_;
};

class DriftingQuadraticStream final : public VectorDriftStream {
 public:
  DriftingQuadraticStream(const StreamSpec& spec, const Domain& domain)
      : VectorDriftStream(spec, domain, spec.center_norm * domain.radius(),
                          spec.noise * domain.radius()) {
    // sup over K of ||x - c_t||^2 <= (R + max ||c_t||)^2
    const double R = domain_.radius();
    const double cmax = (spec_.center_norm + spec_.noise) * R;
    scale_ = 1.0 / ((R + cmax) * (R + cmax));
    lipschitz_ = 2.0 * scale_ * (R + cmax);
  }

  double value(int t, const Point& x) const override {
    check_round(t);
    return scale_ * (x - vectors_.col(t - 1)).squaredNorm();
  }
  Point gradient(int t, const Point& x) const override {
    check_round(t);
    return 2.0 * scale_ * (x - vectors_.col(t - 1));
  }

  OfflineSolution offline_minimize(int begin, int end, const Point* warm) const override {
    check_round(begin);
    check_round(end);
    const double n = end - begin + 1;
    const Eigen::VectorXd mean = window_sum(begin, end) / n;
    OfflineSolution sol;
    if (domain_.has_exact_projection()) {
      sol.point = domain_.exact_projection(mean);
      sol.iterations = 1;
    } else {
      const Point start = warm ? *warm : domain_.origin();
      const FwResult fw = fw_approach(domain_, 1e-12, start, mean, 10'000'000);
      sol.point = fw.x;
      sol.iterations = fw.iterations;
    }
    // sum ||x - c_t||^2 = n ||x - mean||^2 + sum ||c_t||^2 - n ||mean||^2
    const double spread = (prefix_sq_[end] - prefix_sq_[begin - 1]) - n * mean.squaredNorm();
    sol.value = scale_ * (n * (sol.point - mean).squaredNorm() + std::max(spread, 0.0));
    return sol;
  }

  nlohmann::json metadata() const override {
    auto j = Stream::metadata();
    j["center_norm"] = spec_.center_norm;
    j["noise"] = spec_.noise;
    return j;
  }
};

class PiecewiseLinearStream final : public VectorDriftStream {
 public:
  PiecewiseLinearStream(const StreamSpec& spec, const Domain& domain)
      : VectorDriftStream(spec, domain, 1.0, spec.noise) {
    // |<a_t, x>| <= R (1 + noise); the affine map sends that range onto [0, 1].
    amax_ = 1.0 + spec_.noise;
    scale_ = 1.0 / (2.0 * domain_.radius() * amax_);
    lipschitz_ = scale_ * amax_;
  }

  double value(int t, const Point& x) const override {
    check_round(t);
    return scale_ * (vectors_.col(t - 1).dot(x) + domain_.radius() * amax_);
  }
  Point gradient(int t, const Point& x) const override {
    check_round(t);
    (void)x;
    return scale_ * vectors_.col(t - 1);
  }

  OfflineSolution offline_minimize(int begin, int end, const Point*) const override {
    check_round(begin);
    check_round(end);
    const Eigen::VectorXd sum = window_sum(begin, end);
    OfflineSolution sol;
    sol.point = domain_.linear_minimize(sum, mix_seed(spec_.seed, begin, end));
    sol.iterations = 1;
    sol.value = scale_ * (sum.dot(sol.point) + (end - begin + 1) * domain_.radius() * amax_);
    return sol;
  }

 private:
  double amax_ = 1.0;
};

// --- matrix completion ------------------------------------------------------

class MatrixCompletionStream final : public Stream {
 public:
  MatrixCompletionStream(StreamSpec spec, Domain domain) : Stream(std::move(spec), std::move(domain)) {
    if (domain_.kind() != DomainKind::kTraceNormBall)
      throw ContractViolation("matrix_completion needs a trace_norm_ball domain");
    if (spec_.batch < 1) throw ContractViolation("matrix_completion: batch must be >= 1");
    rows_ = static_cast<int>(domain_.rows());
    cols_ = static_cast<int>(domain_.cols());
    const int T = spec_.horizon;
    obs_.reserve(static_cast<std::size_t>(T) * spec_.batch);

    if (!spec_.ratings_path.empty()) {
      const std::vector<Rating> ratings = load_ratings_file(spec_.ratings_path, spec_.ratings_limit);
      if (ratings.empty()) throw Error("matrix_completion: no ratings in " + spec_.ratings_path);
      for (std::size_t k = 0; k < ratings.size(); ++k) {
        if (ratings[k].row >= rows_ || ratings[k].col >= cols_) {
          std::ostringstream os;
          os << "matrix_completion: rating " << k + 1 << " at (" << ratings[k].row + 1 << ", "
             << ratings[k].col + 1 << ") outside the " << rows_ << "x" << cols_ << " domain";
          throw ContractViolation(os.str());
        }
      }
      num_entries_ = ratings.size();
      // Round t observes the batch of the rating list at its phase, cycling.
      for (int t = 1; t <= T; ++t) {
        for (int j = 0; j < spec_.batch; ++j) {
          const std::size_t k = static_cast<std::size_t>(phase(t) - 1) * spec_.batch + j;
          obs_.push_back(ratings[k % ratings.size()]);
        }
      }
    } else {
      if (spec_.rank < 1 || !(spec_.target_max > 0))
        throw ContractViolation("matrix_completion: need rank >= 1 and target_max > 0");
      if (spec_.batch > rows_ * cols_)
        throw ContractViolation("matrix_completion: batch exceeds the number of entries");
      std::mt19937_64 rng(mix_seed(spec_.seed, 0, 3));
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::MatrixXd U(rows_, spec_.rank), V(cols_, spec_.rank);
      for (int i = 0; i < U.size(); ++i) U.data()[i] = normal(rng);
      for (int i = 0; i < V.size(); ++i) V.data()[i] = normal(rng);
      Eigen::MatrixXd M = U * V.transpose();
      M *= spec_.target_max / M.cwiseAbs().maxCoeff();
      num_entries_ = static_cast<std::size_t>(rows_) * cols_;
      for (int t = 1; t <= T; ++t) {
        std::mt19937_64 r(mix_seed(spec_.seed, phase(t), 4));
        // Distinct entries within a round (Floyd's sampling).
        const int n = rows_ * cols_;
        std::vector<int> picked;
        for (int m = n - spec_.batch; m < n; ++m) {
          const int k = std::uniform_int_distribution<int>(0, m)(r);
          picked.push_back(std::find(picked.begin(), picked.end(), k) == picked.end() ? k : m);
        }
        for (int k : picked) obs_.push_back({k / cols_, k % cols_, M(k / cols_, k % cols_)});
      }
    }
    double mmax = 0.0;
    for (const Rating& r : obs_) mmax = std::max(mmax, std::abs(r.value));
    mmax_ = mmax;
    // |X_ij| <= ||X||_F <= ||X||_* <= delta
    scale_ = 1.0 / (spec_.batch * (domain_.delta() + mmax_));
    // ||g||^2 = scale^2 sum_k m_k^2 with m_k the multiplicity of entry k in
    // the batch; sqrt(batch) unless a batch repeats an entry.
    double worst = 0.0;
    std::vector<long> keys(spec_.batch);
    for (int t = 1; t <= T; ++t) {
      const auto b = batch(t);
      for (int j = 0; j < spec_.batch; ++j) keys[j] = static_cast<long>(b[j].row) * cols_ + b[j].col;
      std::sort(keys.begin(), keys.end());
      double sq = 0.0;
      for (std::size_t j = 0; j < keys.size();) {
        std::size_t e = j;
        while (e < keys.size() && keys[e] == keys[j]) ++e;
        sq += static_cast<double>((e - j) * (e - j));
        j = e;
      }
      worst = std::max(worst, sq);
    }
    lipschitz_ = scale_ * std::sqrt(worst);
  }

  double value(int t, const Point& x) const override {
    check_round(t);
    const double s = drift_sign(t);
    double v = 0.0;
    for (const Rating& r : batch(t)) v += std::abs(x(r.row * cols_ + r.col) - s * r.value);
    return scale_ * v;
  }

  Point gradient(int t, const Point& x) const override {
    check_round(t);
    const double s = drift_sign(t);
    Point g = Point::Zero(domain_.dim());
    for (const Rating& r : batch(t)) {
      const Eigen::Index k = r.row * cols_ + r.col;
      const double diff = x(k) - s * r.value;
      g(k) += scale_ * static_cast<double>((diff > 0) - (diff < 0));
    }
    return g;
  }

  OfflineSolution offline_minimize(int begin, int end, const Point* warm) const override {
    check_round(begin);
    check_round(end);
    const double n = end - begin + 1;
    auto avg_value = [&](const Point& x) { return window_value(begin, end, x) / n; };
    auto avg_grad = [&](const Point& x) {
      Point g = Point::Zero(domain_.dim());
      for (int t = begin; t <= end; ++t) g += gradient(t, x);
      return Point(g / n);
    };
    OfflineSolution sol = projected_gradient_oracle(domain_, avg_value, avg_grad, lipschitz_,
                                                    warm ? *warm : domain_.origin());
    sol.value *= n;
    return sol;
  }

  nlohmann::json metadata() const override {
    auto j = Stream::metadata();
    j["batch"] = spec_.batch;
    j["max_abs_target"] = mmax_;
    j["distinct_source_entries"] = num_entries_;
    j["source"] = spec_.ratings_path.empty() ? std::string("synthetic") : spec_.ratings_path;
    return j;
  }

 private:
  std::span<const Rating> batch(int t) const {
    return {obs_.data() + static_cast<std::size_t>(t - 1) * spec_.batch,
            static_cast<std::size_t>(spec_.batch)};
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rating> obs_;
  std::size_t num_entries_ = 0;
  double mmax_ = 0.0;
};

// --- multiclass logistic ----------------------------------------------------

class MulticlassLogisticStream final : public Stream {
 public:
  MulticlassLogisticStream(StreamSpec spec, Domain domain)
      : Stream(std::move(spec), std::move(domain)) {
    if (domain_.kind() != DomainKind::kTraceNormBall)
      throw ContractViolation("multiclass_logistic needs a trace_norm_ball domain");
    classes_ = static_cast<int>(domain_.rows());
    features_ = static_cast<int>(domain_.cols());
    if (classes_ < 2) throw ContractViolation("multiclass_logistic: need at least 2 classes");
    const int T = spec_.horizon;

    if (!spec_.features_path.empty()) {
      const std::vector<LabeledSample> data =
          load_libsvm_file(spec_.features_path, features_, classes_, spec_.features_limit);
      if (data.empty()) throw Error("multiclass_logistic: no samples in " + spec_.features_path);
      for (int t = 1; t <= T; ++t)
        samples_.push_back(data[static_cast<std::size_t>(phase(t) - 1) % data.size()]);
    } else {
      std::mt19937_64 rng(mix_seed(spec_.seed, 0, 5));
      std::vector<Eigen::VectorXd> means;
      for (int j = 0; j < classes_; ++j) means.push_back(random_unit(rng, features_));
      std::normal_distribution<double> normal(0.0, spec_.feature_noise / std::sqrt(features_));
      for (int t = 1; t <= T; ++t) {
        std::mt19937_64 r(mix_seed(spec_.seed, phase(t), 6));
        std::uniform_int_distribution<int> label(0, classes_ - 1);
        LabeledSample s;
        s.label = label(r);
        s.features = means[s.label];
        for (int k = 0; k < features_; ++k) s.features(k) += normal(r);
        s.features /= std::max(1.0, s.features.norm());
        samples_.push_back(std::move(s));
      }
    }
    for (const LabeledSample& s : samples_) emax_ = std::max(emax_, s.features.norm());
    // Every score difference is at most 2 delta max ||e_t||.
    const double a = 2.0 * domain_.delta() * emax_;
    scale_ = 1.0 / log1p_scaled_exp(classes_ - 1, a);
    lipschitz_ = scale_ * std::sqrt(2.0) * emax_;
  }

  double value(int t, const Point& x) const override {
    check_round(t);
    const auto& s = samples_[t - 1];
    const Eigen::VectorXd z = drift_sign(t) * (as_matrix(x, classes_, features_) * s.features);
    const double m = z.maxCoeff();
    const double lse = m + std::log((z.array() - m).exp().sum());
    return scale_ * (lse - z(s.label));
  }

  Point gradient(int t, const Point& x) const override {
    check_round(t);
    const auto& s = samples_[t - 1];
    const Eigen::VectorXd e = drift_sign(t) * s.features;
    const Eigen::VectorXd z = as_matrix(x, classes_, features_) * e;
    Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp();
    p /= p.sum();
    p(s.label) -= 1.0;
    Point g(domain_.dim());
    as_matrix(g, classes_, features_).noalias() = scale_ * p * e.transpose();
    return g;
  }

  OfflineSolution offline_minimize(int begin, int end, const Point* warm) const override {
    check_round(begin);
    check_round(end);
    const double n = end - begin + 1;
    auto avg_value = [&](const Point& x) { return window_value(begin, end, x) / n; };
    auto avg_grad = [&](const Point& x) {
      Point g = Point::Zero(domain_.dim());
      for (int t = begin; t <= end; ++t) g += gradient(t, x);
      return Point(g / n);
    };
    OfflineSolution sol = projected_gradient_oracle(domain_, avg_value, avg_grad, lipschitz_,
                                                    warm ? *warm : domain_.origin());
    sol.value *= n;
    return sol;
  }

  nlohmann::json metadata() const override {
    auto j = Stream::metadata();
    j["classes"] = classes_;
    j["features"] = features_;
    j["max_feature_norm"] = emax_;
    j["source"] = spec_.features_path.empty() ? std::string("synthetic") : spec_.features_path;
    return j;
  }

 private:
  int classes_ = 0;
  int features_ = 0;
  std::vector<LabeledSample> samples_;
  double emax_ = 0.0;
};

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t t, std::uint64_t salt) {
  return splitmix64(splitmix64(seed ^ splitmix64(salt)) ^ t);
}

std::string to_string(StreamKind kind) {
  switch (kind) {
    case StreamKind::kDriftingQuadratic: return "drifting_quadratic";
    case StreamKind::kPiecewiseLinear: return "piecewise_linear";
    case StreamKind::kMatrixCompletion: return "matrix_completion";
    case StreamKind::kMulticlassLogistic: return "multiclass_logistic";
  }
  return "unknown";
}

StreamKind stream_kind_from_string(const std::string& s) {
  for (StreamKind k : {StreamKind::kDriftingQuadratic, StreamKind::kPiecewiseLinear,
                       StreamKind::kMatrixCompletion, StreamKind::kMulticlassLogistic}) {
    if (to_string(k) == s) return k;
  }
  throw ContractViolation("unknown stream kind '" + s +
                          "' (expected drifting_quadratic, piecewise_linear, matrix_completion, "
                          "multiclass_logistic)");
}

std::string to_string(ComparatorMode mode) {
  return mode == ComparatorMode::kFixed ? "fixed" : "per_segment";
}

ComparatorMode comparator_mode_from_string(const std::string& s) {
  if (s == "fixed") return ComparatorMode::kFixed;
  if (s == "per_segment") return ComparatorMode::kPerSegment;
  throw ContractViolation("unknown comparator mode '" + s + "' (expected fixed or per_segment)");
}

Stream::Stream(StreamSpec spec, Domain domain) : spec_(std::move(spec)), domain_(std::move(domain)) {
  if (spec_.horizon < 1) throw ContractViolation("stream: horizon must be >= 1");
  if (spec_.segment_length < 0) throw ContractViolation("stream: segment_length must be >= 0");
}

int Stream::segment_length() const {
  return spec_.segment_length > 0 ? spec_.segment_length : spec_.horizon;
}

int Stream::num_segments() const { return (spec_.horizon + segment_length() - 1) / segment_length(); }

int Stream::segment_of(int t) const { return (t - 1) / segment_length(); }

int Stream::phase(int t) const { return (t - 1) % segment_length() + 1; }

double Stream::drift_sign(int t) const { return segment_of(t) % 2 == 0 ? 1.0 : -1.0; }

void Stream::check_round(int t) const {
  if (t < 1 || t > spec_.horizon) {
    throw ContractViolation("round " + std::to_string(t) + " outside [1, " +
                            std::to_string(spec_.horizon) + "]");
  }
}

OfflineSolution Stream::solve(int begin, int end, const Point* warm_start) const {
  CacheKey key{begin, end, {}};
  if (warm_start) std::get<2>(key).assign(warm_start->data(), warm_start->data() + warm_start->size());
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  OfflineSolution sol = offline_minimize(begin, end, warm_start);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return cache_.emplace(std::move(key), std::move(sol)).first->second;
}

double Stream::window_value(int begin, int end, const Point& x) const {
  double v = 0.0;
  for (int t = begin; t <= end; ++t) v += value(t, x);
  return v;
}

nlohmann::json Stream::metadata() const {
  nlohmann::json j;
  j["kind"] = to_string(spec_.kind);
  j["horizon"] = spec_.horizon;
  j["segment_length"] = segment_length();
  j["segments"] = num_segments();
  j["seed"] = spec_.seed;
  j["scale_factor"] = scale_;
  j["lipschitz"] = lipschitz_;
  j["domain"] = domain_.describe();
  return j;
}

std::unique_ptr<Stream> make_stream(const StreamSpec& spec, const Domain& domain) {
  switch (spec.kind) {
    case StreamKind::kDriftingQuadratic: return std::make_unique<DriftingQuadraticStream>(spec, domain);
    case StreamKind::kPiecewiseLinear: return std::make_unique<PiecewiseLinearStream>(spec, domain);
    case StreamKind::kMatrixCompletion: return std::make_unique<MatrixCompletionStream>(spec, domain);
    case StreamKind::kMulticlassLogistic:
      return std::make_unique<MulticlassLogisticStream>(spec, domain);
  }
  throw ContractViolation("unknown stream kind");
}

std::vector<Rating> load_ratings_file(const std::string& path, int limit) {
  std::vector<Rating> out;
  if (limit == 0) return out;
  std::ifstream in(path);
  if (!in) throw Error("cannot open ratings file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    long user = 0, item = 0;
    double rating = 0.0;
    long long timestamp = 0;
    if (!(ls >> user >> item >> rating >> timestamp))
      throw Error(parse_error(path, lineno, "expected user, item, rating, timestamp"));
    std::string rest;
    if (ls >> rest) throw Error(parse_error(path, lineno, "trailing field '" + rest + "'"));
    if (user < 1 || item < 1) throw Error(parse_error(path, lineno, "indices are 1-based"));
    if (!std::isfinite(rating)) throw Error(parse_error(path, lineno, "non-finite rating"));
    out.push_back({static_cast<int>(user - 1), static_cast<int>(item - 1), rating});
    if (limit > 0 && static_cast<int>(out.size()) >= limit) break;
  }
  return out;
}

std::vector<LabeledSample> load_libsvm_file(const std::string& path, int dim, int classes,
                                            int limit) {
  std::vector<LabeledSample> out;
  if (limit == 0) return out;
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    std::istringstream ls(line);
    double label = 0;
    if (!(ls >> label)) throw Error(parse_error(path, lineno, "missing label"));
    if (label != std::floor(label) || label < 1 || label > classes)
      throw Error(parse_error(path, lineno, "label must be an integer in [1, " +
                                                std::to_string(classes) + "]"));
    LabeledSample s;
    s.label = static_cast<int>(label) - 1;
    s.features = Eigen::VectorXd::Zero(dim);
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw Error(parse_error(path, lineno, "expected index:value, got '" + tok + "'"));
      char* endp = nullptr;
      const long idx = std::strtol(tok.c_str(), &endp, 10);
      if (endp != tok.c_str() + colon || idx < 1 || idx > dim)
        throw Error(parse_error(path, lineno, "feature index out of [1, " + std::to_string(dim) + "]"));
      const char* vstart = tok.c_str() + colon + 1;
      const double v = std::strtod(vstart, &endp);
      if (endp == vstart || *endp != '\0' || !std::isfinite(v))
        throw Error(parse_error(path, lineno, "bad feature value in '" + tok + "'"));
      s.features(idx - 1) = v;
    }
    out.push_back(std::move(s));
    if (limit > 0 && static_cast<int>(out.size()) >= limit) break;
  }
  return out;
}

OfflineSolution projected_gradient_oracle(const Domain& domain,
                                          const std::function<double(const Point&)>& value,
                                          const std::function<Point(const Point&)>& gradient,
                                          double lipschitz, const Point& start, int max_iters,
                                          double tol) {
  OfflineSolution best;
  Point x = domain.exact_projection(start);
  best.point = x;
  best.value = value(x);
  best.converged = false;
  best.residual = std::numeric_limits<double>::infinity();
  const double base = domain.diameter() / std::max(lipschitz, 1e-300);
  for (int k = 1; k <= max_iters; ++k) {
    const double step = base / std::sqrt(static_cast<double>(k));
    const Point next = domain.exact_projection(x - step * gradient(x));
    const double mapping = (x - next).norm() / step;
    best.residual = std::min(best.residual, mapping);
    best.iterations = k;
    x = next;
    const double v = value(x);
    if (!std::isfinite(v)) throw OracleConvergenceError("offline oracle diverged", mapping);
    if (v < best.value) {
      best.value = v;
      best.point = x;
    }
    if (mapping < tol) {
      best.converged = true;
      break;
    }
  }
  return best;
}

ComparatorSequence comparator_sequence(const Stream& stream, ComparatorMode mode) {
  ComparatorSequence out;
  const int T = stream.horizon();
  out.points.reserve(T);
  if (mode == ComparatorMode::kFixed) {
    out.solves.push_back(stream.solve(1, T, nullptr));
    out.points.assign(T, out.solves.back().point);
    return out;
  }
  const int L = stream.segment_length();
  const Point* warm = nullptr;
  for (int begin = 1; begin <= T; begin += L) {
    const int end = std::min(T, begin + L - 1);
    out.solves.push_back(stream.solve(begin, end, warm));
    warm = &out.solves.back().point;
    if (out.solves.size() > 1)
      out.path_length += (out.solves[out.solves.size() - 2].point - out.solves.back().point).norm();
    for (int t = begin; t <= end; ++t) out.points.push_back(out.solves.back().point);
  }
  return out;
}

}  // namespace pfol

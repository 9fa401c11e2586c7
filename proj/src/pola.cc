#include "pfol/pola.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pfol/errors.hpp"

namespace pfol {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLossSlack = 1e-9;

double positive_part(double v) { return v > 0 ? v : 0.0; }

// Exponent of Phi(R, C) = exp([R]_+^2 / (3C)) without the exp. The C = 0 case
// with [R]_+ > 0 is returned as +inf; anh_potential rejects it separately.
double potential_exponent(double R, double C) {
  const double r = positive_part(R);
  if (r == 0.0) return 0.0;
  if (C == 0.0) return kInf;
  return r * r / (3.0 * C);
}

// (a, b) with w = 1/2 (e^a - e^b).
std::pair<double, double> weight_exponents(double R, double C, AnhVariant variant) {
  if (variant == AnhVariant::kPaper)
    return {potential_exponent(R + 1, C + 1), potential_exponent(R + 1, C - 1)};
  return {potential_exponent(R + 1, C + 1), potential_exponent(R - 1, C + 1)};
}

double checked_loss(double v) {
  if (!(v >= -kLossSlack && v <= 1.0 + kLossSlack)) {
    std::ostringstream os;
    os << "loss " << v << " outside [0, 1]";
    throw AssumptionViolation(os.str());
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

GcInterval make_gc_interval(int level, long index) {
  if (level < 0 || index < 1) throw ContractViolation("gc interval: need level >= 0, index >= 1");
  GcInterval I;
  I.level = level;
  I.index = index;
  I.start = index << level;
  I.end = ((index + 1) << level) - 1;
  return I;
}

std::vector<GcInterval> gc_intervals_starting_at(long t, int max_level) {
  if (t < 1) throw ContractViolation("gc_intervals_starting_at: t must be >= 1");
  std::vector<GcInterval> out;
  for (int k = 0; k <= max_level; ++k) {
    if ((t & ((1L << k) - 1)) != 0) break;
    out.push_back(make_gc_interval(k, t >> k));
  }
  return out;
}

std::vector<GcInterval> gc_intervals_containing(long t, int max_level) {
  if (t < 1) throw ContractViolation("gc_intervals_containing: t must be >= 1");
  std::vector<GcInterval> out;
  for (int k = 0; k <= max_level && (1L << k) <= t; ++k) out.push_back(make_gc_interval(k, t >> k));
  return out;
}

double anh_potential(double R, double C) {
  const double r = positive_part(R);
  if (r == 0.0) return 1.0;
  if (C == 0.0) throw ContractViolation("anh_potential: undefined for C = 0 with R > 0");
  return std::exp(r * r / (3.0 * C));
}

std::string to_string(AnhVariant v) { return v == AnhVariant::kPaper ? "paper" : "classic"; }

AnhVariant anh_variant_from_string(const std::string& s) {
  if (s == "paper") return AnhVariant::kPaper;
  if (s == "classic") return AnhVariant::kClassic;
  throw ContractViolation("unknown anh_variant '" + s + "' (expected paper or classic)");
}

double anh_weight(double R, double C, AnhVariant variant) {
  const auto [a, b] = weight_exponents(R, C, variant);
  if (b == kInf) return -kInf;
  return 0.5 * (std::exp(a) - std::exp(b));
}

std::vector<double> anh_normalized_weights(std::span<const double> R, std::span<const double> C,
                                           AnhVariant variant) {
  if (R.size() != C.size()) throw ContractViolation("anh_normalized_weights: size mismatch");
  const std::size_t n = R.size();
  std::vector<double> logw(n, -kInf);
  double top = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [a, b] = weight_exponents(R[i], C[i], variant);
    if (a > b) {
      // log(1/2 (e^a - e^b)) = a + log(1 - e^{b-a}) - log 2
      logw[i] = a + std::log(-std::expm1(b - a)) - std::log(2.0);
      top = std::max(top, logw[i]);
    }
  }
  std::vector<double> w(n, 0.0);
  if (n == 0) return w;
  if (top == -kInf) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
    return w;
  }
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = logw[i] == -kInf ? 0.0 : std::exp(logw[i] - top);
    z += w[i];
  }
  for (double& v : w) v /= z;
  return w;
}

Pola::Pola(Domain domain, PolaOptions options)
    : domain_(std::move(domain)), options_(options) {
  if (options_.max_level < 0 || options_.max_level > 60)
    throw ContractViolation("Pola: max_level must be in [0, 60]");
  if (!(options_.scale > 0)) throw ContractViolation("Pola: scale must be positive");
  last_prediction_ = domain_.origin();
  begin_round();
}

void Pola::begin_round() {
  for (const GcInterval& I : gc_intervals_starting_at(t_, options_.max_level)) {
    const double eta = options_.scale * std::pow(static_cast<double>(I.length()), -0.75);
    const std::uint64_t seed =
        options_.seed ^ (static_cast<std::uint64_t>(I.start) * 0x9E3779B97F4A7C15ULL +
                         static_cast<std::uint64_t>(I.level));
    active_.push_back(ActiveExpert{I, BogdIp(domain_, BogdParams::from_eta(eta), last_prediction_,
                                             seed, /*verify_start=*/false)});
  }
  std::erase_if(active_, [&](const ActiveExpert& e) {
    if (e.interval.end >= t_) return false;
    ++retired_;
    if (e.updates != e.interval.length()) ++retired_bad_lifetime_;
    return true;
  });

  std::vector<double> R(active_.size()), C(active_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) {
    R[i] = active_[i].R;
    C[i] = active_[i].C;
  }
  weights_ = anh_normalized_weights(R, C, options_.variant);
  prediction_ = Point::Zero(domain_.dim());
  for (std::size_t i = 0; i < active_.size(); ++i)
    prediction_ += weights_[i] * active_[i].learner.predict();
}

Accounting Pola::observe(const LossFunction& loss) {
  Accounting acc;
  acc.loss_value = checked_loss(loss.value(prediction_));
  for (ActiveExpert& e : active_) {
    const Point xi = e.learner.predict();
    const double gap = acc.loss_value - checked_loss(loss.value(xi));
    e.R += gap;
    e.C += std::abs(gap);
    acc.lo_calls_delta += e.learner.update(loss.gradient(xi));
    ++e.updates;
  }
  last_prediction_ = prediction_;
  ++t_;
  begin_round();
  return acc;
}

}  // namespace pfol

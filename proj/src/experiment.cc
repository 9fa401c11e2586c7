#include "pfol/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "pfol/bogd_ip.hpp"
#include "pfol/errors.hpp"
#include "pfol/pold.hpp"

namespace pfol {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

// Key/value table with typed, error-collecting accessors.
class ConfigReader {
 public:
  explicit ConfigReader(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        errors_.push_back("line " + std::to_string(lineno) + ": expected key = value");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        errors_.push_back("line " + std::to_string(lineno) + ": empty key");
        continue;
      }
      if (values_.count(key)) {
        errors_.push_back(key + ": given more than once");
        continue;
      }
      values_[key] = value;
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  long integer(const std::string& key, long fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_int(key, it->second, fallback);
  }

  double real(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_real(key, it->second, fallback);
  }

  bool boolean(const std::string& key, bool fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    errors_.push_back(key + ": expected true or false, got '" + it->second + "'");
    return fallback;
  }

  std::vector<long> integers(const std::string& key, std::vector<long> fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<long> out;
    for (const auto& item : split_list(it->second)) out.push_back(parse_int(key, item, 0));
    return out;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(it->second)) out.push_back(parse_real(key, item, 0));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? std::vector<std::string>{} : split_list(it->second);
  }

  void error(const std::string& msg) { errors_.push_back(msg); }

  void reject_unused() {
    for (const auto& [key, value] : values_)
      if (!used_.count(key)) errors_.push_back(key + ": unknown key");
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  long parse_int(const std::string& key, const std::string& v, long fallback) {
    char* end = nullptr;
    errno = 0;
    const long r = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE) {
      errors_.push_back(key + ": expected an integer, got '" + v + "'");
      return fallback;
    }
    return r;
  }

  double parse_real(const std::string& key, const std::string& v, double fallback) {
    char* end = nullptr;
    const double r = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(r)) {
      errors_.push_back(key + ": expected a finite number, got '" + v + "'");
      return fallback;
    }
    return r;
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  std::vector<std::string> errors_;
};

AlgoName algo_from_string(const std::string& s, bool* ok) {
  *ok = true;
  if (s == "bogd_ip") return AlgoName::kBogdIp;
  if (s == "pold") return AlgoName::kPold;
  if (s == "pola") return AlgoName::kPola;
  if (s == "ogd") return AlgoName::kOgd;
  *ok = false;
  return AlgoName::kBogdIp;
}

double resolve_eta(const RunUnit& unit, int horizon) {
  if (unit.algo.eta > 0) return unit.algo.eta;
  return unit.scale * std::pow(static_cast<double>(horizon), -0.75);
}

json learner_params(const OnlineLearner& learner) {
  json j;
  if (auto* b = dynamic_cast<const BogdIp*>(&learner)) {
    j["eta"] = b->params().eta;
    j["block_size"] = b->params().block_size;
    j["epsilon"] = b->params().epsilon;
    j["compensated_sum"] = b->params().compensated_sum;
    j["fw_max_iters_cap"] = b->ip_config().fw_max_iters_cap;
    j["pull_max_iters_cap"] = b->ip_config().pull_max_iters_cap;
  } else if (auto* p = dynamic_cast<const Pold*>(&learner)) {
    j["alpha"] = p->params().alpha;
    j["num_experts"] = p->params().num_experts;
    j["step_sizes"] = p->params().step_sizes;
    std::vector<long> blocks;
    for (const BogdIp& e : p->experts()) blocks.push_back(e.params().block_size);
    j["block_sizes"] = blocks;
  } else if (auto* a = dynamic_cast<const Pola*>(&learner)) {
    j["anh_variant"] = to_string(a->options().variant);
    j["max_level"] = a->options().max_level;
    j["scale"] = a->options().scale;
  } else if (auto* o = dynamic_cast<const Ogd*>(&learner)) {
    j["step_size_round_1"] = o->step_size(1);
  }
  return j;
}

std::string diag_row(int t, const OnlineLearner& learner) {
  const std::vector<double>* w = nullptr;
  std::size_t active = 0;
  if (auto* p = dynamic_cast<const Pold*>(&learner)) {
    w = &p->weights();
    active = p->num_experts();
  } else if (auto* a = dynamic_cast<const Pola*>(&learner)) {
    w = &a->weights();
    active = a->active().size();
  }
  if (!w) return {};
  std::vector<std::string> parts;
  for (double v : *w) parts.push_back(fmt_short(v));
  const double top = w->empty() ? 0.0 : *std::max_element(w->begin(), w->end());
  return std::to_string(t) + "," + std::to_string(active) + "," + fmt_short(top) + "," +
         join(parts, ";");
}

struct RunTiming {
  std::string algo_id;
  std::uint64_t seed = 0;
  std::int64_t total_ns = 0;
  std::size_t rounds = 0;
};

std::string run_stem(const std::string& algo_id, std::uint64_t seed) {
  return algo_id + "__seed" + std::to_string(seed);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

template <class F>
void parallel_for(std::size_t n, int workers, F&& body) {
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (int k = 0; k < w; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error("invalid config:\n  " + join(errors, "\n  ")), errors_(std::move(errors)) {}

Domain DomainSpec::build() const {
  switch (kind) {
    case DomainKind::kBall: return Domain::ball(dim, radius);
    case DomainKind::kBox: return Domain::box(dim, half_width);
    case DomainKind::kSimplex: return Domain::simplex(dim);
    case DomainKind::kTraceNormBall: return Domain::trace_norm_ball(rows, cols, delta, power);
    case DomainKind::kCustom: break;
  }
  throw ContractViolation("domain.kind: custom domains cannot be built from a config");
}

std::string to_string(AlgoName name) {
  switch (name) {
    case AlgoName::kBogdIp: return "bogd_ip";
    case AlgoName::kPold: return "pold";
    case AlgoName::kPola: return "pola";
    case AlgoName::kOgd: return "ogd";
  }
  return "unknown";
}

const std::vector<std::string>& algo_names() {
  static const std::vector<std::string> names{"bogd_ip", "pold", "pola", "ogd"};
  return names;
}

ExperimentConfig validate_config(const std::string& text) {
  ConfigReader r(text);
  ExperimentConfig cfg;

  // stream
  StreamSpec& s = cfg.stream;
  const std::string kind = r.str("stream.kind", "");
  if (kind.empty()) {
    r.error("stream.kind: required (drifting_quadratic, piecewise_linear, matrix_completion, "
            "multiclass_logistic)");
  } else {
    try {
      s.kind = stream_kind_from_string(kind);
    } catch (const ContractViolation& e) {
      r.error(std::string("stream.kind: ") + e.what());
    }
  }
  s.horizon = static_cast<int>(r.integer("stream.horizon", s.horizon));
  if (s.horizon < 1) r.error("stream.horizon: must be >= 1");
  s.segment_length = static_cast<int>(r.integer("stream.segment_length", s.segment_length));
  if (s.segment_length < 0) r.error("stream.segment_length: must be >= 0");
  s.center_norm = r.real("stream.center_norm", s.center_norm);
  if (s.center_norm < 0) r.error("stream.center_norm: must be >= 0");
  s.noise = r.real("stream.noise", s.noise);
  if (s.noise < 0) r.error("stream.noise: must be >= 0");
  s.batch = static_cast<int>(r.integer("stream.batch", s.batch));
  if (s.batch < 1) r.error("stream.batch: must be >= 1");
  s.rank = static_cast<int>(r.integer("stream.rank", s.rank));
  if (s.rank < 1) r.error("stream.rank: must be >= 1");
  s.target_max = r.real("stream.target_max", s.target_max);
  if (!(s.target_max > 0)) r.error("stream.target_max: must be > 0");
  s.ratings_path = r.str("stream.ratings_path", "");
  s.ratings_limit = static_cast<int>(r.integer("stream.ratings_limit", s.ratings_limit));
  s.features_path = r.str("stream.features_path", "");
  s.features_limit = static_cast<int>(r.integer("stream.features_limit", s.features_limit));
  s.feature_noise = r.real("stream.feature_noise", s.feature_noise);
  if (s.feature_noise < 0) r.error("stream.feature_noise: must be >= 0");

  // domain
  DomainSpec& d = cfg.domain;
  const std::string dkind = r.str("domain.kind", "ball");
  if (dkind == "ball") d.kind = DomainKind::kBall;
  else if (dkind == "box") d.kind = DomainKind::kBox;
  else if (dkind == "simplex") d.kind = DomainKind::kSimplex;
  else if (dkind == "trace_norm_ball") d.kind = DomainKind::kTraceNormBall;
  else r.error("domain.kind: unknown kind '" + dkind + "' (expected ball, box, simplex, trace_norm_ball)");
  d.dim = static_cast<int>(r.integer("domain.dim", d.dim));
  if (d.dim < 1) r.error("domain.dim: must be >= 1");
  d.radius = r.real("domain.radius", d.radius);
  if (!(d.radius > 0)) r.error("domain.radius: must be > 0");
  d.half_width = r.real("domain.half_width", d.half_width);
  if (!(d.half_width > 0)) r.error("domain.half_width: must be > 0");
  d.rows = static_cast<int>(r.integer("domain.rows", d.rows));
  if (d.rows < 1) r.error("domain.rows: must be >= 1");
  d.cols = static_cast<int>(r.integer("domain.cols", d.cols));
  if (d.cols < 1) r.error("domain.cols: must be >= 1");
  d.delta = r.real("domain.delta", d.delta);
  if (!(d.delta > 0)) r.error("domain.delta: must be > 0");
  d.power.rel_tol = r.real("domain.power_tol", d.power.rel_tol);
  if (!(d.power.rel_tol > 0)) r.error("domain.power_tol: must be > 0");
  d.power.max_iters = static_cast<int>(r.integer("domain.power_max_iters", d.power.max_iters));
  if (d.power.max_iters < 1) r.error("domain.power_max_iters: must be >= 1");
  const std::string fallback = r.str("domain.power_fallback", "svd");
  if (fallback == "svd") d.power.exact_fallback = true;
  else if (fallback == "error") d.power.exact_fallback = false;
  else r.error("domain.power_fallback: expected svd or error, got '" + fallback + "'");
  const bool matrix_stream =
      s.kind == StreamKind::kMatrixCompletion || s.kind == StreamKind::kMulticlassLogistic;
  if (!kind.empty() && matrix_stream && d.kind != DomainKind::kTraceNormBall)
    r.error("domain.kind: stream " + kind + " needs trace_norm_ball");

  // algorithms
  const std::vector<std::string> names = r.strings("algorithms");
  if (names.empty()) r.error("algorithms: required, a comma-separated subset of " + join(algo_names(), ", "));
  std::set<std::string> seen;
  for (const std::string& n : names) {
    bool ok = false;
    const AlgoName name = algo_from_string(n, &ok);
    if (!ok) {
      r.error("algorithms: unknown algorithm '" + n + "' (recognized: " + join(algo_names(), ", ") + ")");
      continue;
    }
    if (!seen.insert(n).second) {
      r.error("algorithms: '" + n + "' listed twice");
      continue;
    }
    AlgoSpec a;
    a.name = name;
    const std::string p = "algo." + n + ".";
    a.scales = r.reals(p + "scale", a.scales);
    if (a.scales.empty()) r.error(p + "scale: empty list");
    for (double v : a.scales)
      if (!(v > 0)) r.error(p + "scale: every value must be > 0");
    if (name == AlgoName::kBogdIp) {
      a.eta = r.real(p + "eta", 0.0);
      if (r.has(p + "eta") && !(a.eta > 0)) r.error(p + "eta: must be > 0");
      a.compensated_sum = r.boolean(p + "compensated_sum", false);
    }
    if (name == AlgoName::kPola) {
      try {
        a.anh_variant = anh_variant_from_string(r.str(p + "anh_variant", "paper"));
      } catch (const ContractViolation& e) {
        r.error(p + "anh_variant: " + e.what());
      }
      a.max_level = static_cast<int>(r.integer(p + "max_level", a.max_level));
      if (a.max_level < 0 || a.max_level > 60) r.error(p + "max_level: must be in [0, 60]");
    }
    if (name == AlgoName::kOgd) {
      const std::string sched = r.str(p + "schedule", "fixed");
      if (sched == "fixed") a.schedule = OgdSchedule::kFixed;
      else if (sched == "anytime") a.schedule = OgdSchedule::kAnytime;
      else r.error(p + "schedule: expected fixed or anytime, got '" + sched + "'");
    }
    cfg.algorithms.push_back(a);
  }

  // seeds
  const long repeats = r.integer("repeats", 0);
  const std::vector<long> seeds = r.integers("seeds", {});
  if (r.has("repeats") && repeats < 1) r.error("repeats: must be >= 1");
  for (long v : seeds)
    if (v < 0) r.error("seeds: must be nonnegative");
  if (!seeds.empty()) {
    cfg.seeds.assign(seeds.begin(), seeds.end());
    if (r.has("repeats") && repeats != static_cast<long>(seeds.size()))
      r.error("repeats: " + std::to_string(repeats) + " does not match the " +
              std::to_string(seeds.size()) + " entries of seeds");
    if (std::set<long>(seeds.begin(), seeds.end()).size() != seeds.size())
      r.error("seeds: duplicate seed");
  } else if (repeats >= 1) {
    cfg.seeds.clear();
    for (long k = 1; k <= repeats; ++k) cfg.seeds.push_back(static_cast<std::uint64_t>(k));
  }

  cfg.output_dir = r.str("output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) r.error("output_dir: must not be empty");

  // metrics
  for (long tau : r.integers("metrics.taus", {})) {
    if (tau < 1 || tau > s.horizon) r.error("metrics.taus: " + std::to_string(tau) + " outside [1, stream.horizon]");
    else cfg.metrics.taus.push_back(static_cast<int>(tau));
  }
  cfg.metrics.stride = static_cast<int>(r.integer("metrics.stride", 0));
  if (cfg.metrics.stride < 0) r.error("metrics.stride: must be >= 0");
  cfg.metrics.weak_stride = static_cast<int>(r.integer("metrics.weak_stride", 0));
  try {
    cfg.metrics.comparator_mode =
        comparator_mode_from_string(r.str("metrics.comparator_mode", "per_segment"));
  } catch (const ContractViolation& e) {
    r.error(std::string("metrics.comparator_mode: ") + e.what());
  }
  cfg.diagnostics_every = static_cast<int>(r.integer("diagnostics.every", 0));
  if (cfg.diagnostics_every < 0) r.error("diagnostics.every: must be >= 0");

  r.reject_unused();
  if (!r.errors().empty()) throw ConfigError(r.errors());
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = validate_config(ss.str());
  // Data paths are relative to the config file.
  const fs::path base = path.parent_path();
  for (std::string* p : {&cfg.stream.ratings_path, &cfg.stream.features_path})
    if (!p->empty() && fs::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  return cfg;
}

std::vector<RunUnit> expand_units(const ExperimentConfig& cfg) {
  std::vector<RunUnit> units;
  for (const AlgoSpec& a : cfg.algorithms) {
    for (double scale : a.scales) {
      RunUnit u;
      u.algo = a;
      u.scale = scale;
      u.algo_id = to_string(a.name);
      if (a.scales.size() > 1) u.algo_id += "@" + fmt_short(scale);
      units.push_back(u);
    }
  }
  return units;
}

std::unique_ptr<OnlineLearner> make_learner(const RunUnit& unit, const Stream& stream,
                                            std::uint64_t seed) {
  const Domain& domain = stream.domain();
  const int T = stream.horizon();
  const std::uint64_t lseed = mix_seed(seed, 0, 7);
  switch (unit.algo.name) {
    case AlgoName::kBogdIp: {
      BogdParams p = BogdParams::from_eta(resolve_eta(unit, T), T);
      p.compensated_sum = unit.algo.compensated_sum || domain.dim() > 100000;
      return std::make_unique<BogdIp>(domain, p, domain.origin(), lseed);
    }
    case AlgoName::kPold:
      return std::make_unique<Pold>(
          domain, PoldParams::from_problem(T, domain.diameter(), stream.lipschitz(), unit.scale),
          domain.origin(), lseed);
    case AlgoName::kPola: {
      PolaOptions o;
      o.variant = unit.algo.anh_variant;
      o.max_level = unit.algo.max_level;
      o.scale = unit.scale;
      o.seed = lseed;
      return std::make_unique<Pola>(domain, o);
    }
    case AlgoName::kOgd:
      return std::make_unique<Ogd>(domain, unit.algo.schedule, domain.diameter(),
                                   stream.lipschitz(), T, domain.origin(), unit.scale);
  }
  throw ContractViolation("unknown algorithm");
}

json config_to_json(const ExperimentConfig& cfg) {
  const StreamSpec& s = cfg.stream;
  json j;
  j["stream"] = {{"kind", to_string(s.kind)},       {"horizon", s.horizon},
                 {"segment_length", s.segment_length}, {"center_norm", s.center_norm},
                 {"noise", s.noise},                 {"batch", s.batch},
                 {"rank", s.rank},                   {"target_max", s.target_max},
                 {"ratings_path", s.ratings_path},   {"ratings_limit", s.ratings_limit},
                 {"features_path", s.features_path}, {"features_limit", s.features_limit},
                 {"feature_noise", s.feature_noise}};
  j["domain"] = cfg.domain.build().describe();
  json algos = json::array();
  for (const AlgoSpec& a : cfg.algorithms) {
    json aj{{"name", to_string(a.name)}, {"scales", a.scales}};
    if (a.name == AlgoName::kBogdIp) {
      aj["eta"] = a.eta > 0 ? json(a.eta) : json("scale * T^-0.75");
      aj["compensated_sum"] = a.compensated_sum;
    }
    if (a.name == AlgoName::kPola) {
      aj["anh_variant"] = to_string(a.anh_variant);
      aj["max_level"] = a.max_level;
    }
    if (a.name == AlgoName::kOgd)
      aj["schedule"] = a.schedule == OgdSchedule::kFixed ? "fixed" : "anytime";
    algos.push_back(aj);
  }
  j["algorithms"] = algos;
  j["seeds"] = cfg.seeds;
  j["metrics"] = {{"taus", cfg.metrics.taus},
                  {"stride", cfg.metrics.stride},
                  {"weak_stride", cfg.metrics.weak_stride},
                  {"comparator_mode", to_string(cfg.metrics.comparator_mode)}};
  j["diagnostics_every"] = cfg.diagnostics_every;
  return j;
}

fs::path run_experiment(const ExperimentConfig& cfg, int workers) {
  const fs::path dir = cfg.output_dir;
  const fs::path runs = dir / "runs";
  fs::create_directories(runs);

  write_file(dir / "config.json", config_to_json(cfg).dump(2) + "\n");

  const Domain domain = cfg.domain.build();
  const std::size_t nseeds = cfg.seeds.size();
  std::vector<std::unique_ptr<Stream>> streams(nseeds);
  std::vector<ComparatorSequence> comparators(nseeds);
  parallel_for(nseeds, workers, [&](std::size_t k) {
    StreamSpec spec = cfg.stream;
    spec.seed = cfg.seeds[k];
    streams[k] = make_stream(spec, domain);
    comparators[k] = comparator_sequence(*streams[k], cfg.metrics.comparator_mode);
  });

  const std::vector<RunUnit> units = expand_units(cfg);
  std::vector<RunTiming> timings(units.size() * nseeds);
  parallel_for(units.size() * nseeds, workers, [&](std::size_t job) {
    const RunUnit& unit = units[job / nseeds];
    const std::size_t k = job % nseeds;
    const std::uint64_t seed = cfg.seeds[k];
    const Stream& stream = *streams[k];
    const std::string stem = run_stem(unit.algo_id, seed);

    json rj;
    rj["algo_id"] = unit.algo_id;
    rj["algo"] = to_string(unit.algo.name);
    rj["scale"] = unit.scale;
    rj["seed"] = seed;
    rj["stream"] = stream.metadata();
    rj["comparator"] = {{"mode", to_string(cfg.metrics.comparator_mode)},
                        {"path_length", comparators[k].path_length}};

    RunTrace trace;
    std::string diag;
    try {
      std::unique_ptr<OnlineLearner> learner = make_learner(unit, stream, seed);
      rj["params"] = learner_params(*learner);
      DriveOptions opts;
      const bool diag_on = cfg.diagnostics_every > 0 && (unit.algo.name == AlgoName::kPold ||
                                                         unit.algo.name == AlgoName::kPola);
      if (diag_on) {
        diag = "t,active,max_weight,weights\n";
        opts.after_round = [&](int t, const OnlineLearner& l) {
          if (t % cfg.diagnostics_every == 0) diag += diag_row(t, l) + "\n";
        };
      }
      trace = drive(*learner, stream, stream.horizon(), opts);
    } catch (const std::exception& e) {
      trace.complete = false;
      trace.error = e.what();
    }

    std::ostringstream csv;
    csv << "t,algo,seed,loss,cum_loss,lo_calls_cum,wall_ns\n";
    double cum = 0.0;
    long lo = 0;
    std::int64_t total_ns = 0;
    for (std::size_t t = 0; t < trace.size(); ++t) {
      cum += trace.losses[t];
      lo += trace.lo_calls[t];
      total_ns += trace.wall_ns[t];
      csv << t + 1 << ',' << unit.algo_id << ',' << seed << ',' << fmt_double(trace.losses[t]) << ','
          << fmt_double(cum) << ',' << lo << ',' << trace.wall_ns[t] << '\n';
    }
    write_file(runs / (stem + ".csv"), csv.str());
    if (!diag.empty()) write_file(runs / (stem + ".diag.csv"), diag);

    rj["rounds"] = trace.size();
    rj["final_cum_loss"] = cum;
    rj["lo_calls_total"] = lo;
    rj["complete"] = trace.complete;
    rj["error"] = trace.error;
    rj["metrics"] = nullptr;
    if (trace.complete && trace.size() > 0) {
      try {
        rj["metrics"] = compute_report(trace.losses, stream, comparators[k], cfg.metrics).to_json();
      } catch (const std::exception& e) {
        rj["metrics_error"] = e.what();
      }
    }
    write_file(runs / (stem + ".json"), rj.dump(2) + "\n");
    timings[job] = {unit.algo_id, seed, total_ns, trace.size()};
  });

  json tj = json::array();
  for (const RunTiming& t : timings) {
    tj.push_back({{"algo_id", t.algo_id},
                  {"seed", t.seed},
                  {"total_wall_ns", t.total_ns},
                  {"rounds", t.rounds},
                  {"mean_round_ns", t.rounds ? static_cast<double>(t.total_ns) / t.rounds : 0.0}});
  }
  write_file(dir / "timing.json", json{{"runs", tj}}.dump(2) + "\n");
  aggregate_reports(dir);
  return dir;
}

json aggregate_reports(const fs::path& dir) {
  const fs::path runs = dir / "runs";
  if (!fs::is_directory(runs)) throw Error("no runs directory under " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(runs)) {
    const fs::path& p = entry.path();
    if (p.extension() == ".json") files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no run reports under " + runs.string());

  struct Group {
    std::string algo;
    std::vector<std::uint64_t> seeds;
    std::map<std::string, std::vector<double>> values;
    std::vector<std::string> incomplete;
  };
  std::map<std::string, Group> groups;
  for (const fs::path& p : files) {
    std::ifstream in(p);
    json rj;
    try {
      rj = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("cannot parse " + p.string() + ": " + e.what());
    }
    const std::string id = rj.at("algo_id").get<std::string>();
    Group& g = groups[id];
    g.algo = rj.at("algo").get<std::string>();
    const auto seed = rj.at("seed").get<std::uint64_t>();
    if (!rj.at("complete").get<bool>() || rj.at("metrics").is_null()) {
      g.incomplete.push_back(p.filename().string());
      continue;
    }
    g.seeds.push_back(seed);
    g.values["final_cum_loss"].push_back(rj.at("final_cum_loss").get<double>());
    g.values["lo_calls_total"].push_back(rj.at("lo_calls_total").get<double>());
    const json& m = rj.at("metrics");
    for (const char* key : {"static", "dynamic", "dynamic_path_length"})
      g.values[key].push_back(m.at(key).get<double>());
    if (!m.at("weak_adaptive").is_null())
      g.values["weak_adaptive"].push_back(m.at("weak_adaptive").get<double>());
    for (const auto& [tau, v] : m.at("strongly_adaptive").items())
      g.values["strongly_adaptive_" + tau].push_back(v.get<double>());
  }

  json report;
  json algos = json::object();
  std::map<std::string, std::pair<std::string, double>> best;  // algo -> (id, mean loss)
  std::map<std::string, int> grid_size;
  bool complete = true;
  for (const auto& [id, g] : groups) {
    json aj;
    aj["algo"] = g.algo;
    aj["seeds"] = g.seeds;
    aj["incomplete_runs"] = g.incomplete;
    complete = complete && g.incomplete.empty();
    json stats = json::object();
    for (const auto& [key, xs] : g.values) {
      const Summary s = summarize(xs);
      stats[key] = {{"mean", s.mean}, {"std", s.std}, {"n", s.n}};
    }
    aj["metrics"] = stats;
    algos[id] = aj;
    ++grid_size[g.algo];
    auto it = g.values.find("final_cum_loss");
    if (it != g.values.end() && !it->second.empty()) {
      const double mean = summarize(it->second).mean;
      auto b = best.find(g.algo);
      if (b == best.end() || mean < b->second.second) best[g.algo] = {id, mean};
    }
  }
  for (auto& [id, aj] : algos.items()) {
    const std::string algo = aj["algo"].get<std::string>();
    aj["grid_best"] = grid_size[algo] > 1 && best.count(algo) && best[algo].first == id;
  }
  report["algorithms"] = algos;
  json grid = json::object();
  for (const auto& [algo, b] : best)
    if (grid_size[algo] > 1) grid[algo] = {{"best", b.first}, {"criterion", "mean final_cum_loss"}};
  report["grid"] = grid;
  report["complete"] = complete;
  report["std"] = "sample (n - 1); 0 for a single seed";
  write_file(dir / "report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace pfol

#pragma once
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "lasso.hpp"
#include "rls.hpp"
#include "scenarios.hpp"
#include "spice.hpp"

namespace olspice {

/// Floor for NMSE in dB so that exact recovery stays a finite number.
inline constexpr double kNmseFloorDb = -150.0;

/// Configuration error raised for malformed requests; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly x.
inline std::string format_number(double x) {
  for (int prec = 6; prec <= 17; ++prec) {
    std::ostringstream os;
    os.precision(prec);
    os << x;
    if (prec == 17 || std::stod(os.str()) == x) return os.str();
  }
  return {};
}

// ---------------------------------------------------------------------------
// Estimator descriptions

struct EstimatorSpec {
  enum class Type { olspice, ollasso, olrls };

  Type type = Type::olspice;
  int sweeps = 1;                                         // olspice, ollasso
  LambdaSchedule::Kind schedule = LambdaSchedule::Kind::feasible;  // ollasso
  double factor = 1.0;                                    // ollasso scaled
  double lambda = 1.0;                                    // olrls
  bool oracle_support = false;                            // olrls

  /// Needs knowledge unavailable in practice (true sigma^2 or true support).
  bool oracle_only() const {
    return (type == Type::ollasso && schedule == LambdaSchedule::Kind::infeasible) ||
           (type == Type::olrls && oracle_support);
  }

  std::string id() const {
    const auto num = format_number;
    switch (type) {
      case Type::olspice: return "olspice:L=" + std::to_string(sweeps);
      case Type::ollasso: {
        std::string s = "ollasso:";
        if (schedule == LambdaSchedule::Kind::feasible) s += "feasible";
        else if (schedule == LambdaSchedule::Kind::infeasible) s += "infeasible";
        else s += "scaled=" + num(factor);
        if (sweeps != 1) s += ":L=" + std::to_string(sweeps);
        return s;
      }
      case Type::olrls: {
        std::string s = oracle_support ? "olrls:oracle" : "olrls";
        if (!oracle_support || lambda != 1.0) s += ":lambda=" + num(lambda);
        return s;
      }
    }
    return {};
  }
};

namespace detail {
inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_positive(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid " + what + ": '" + text + "'");
  }
  if (used != text.size() || !(v > 0.0) || !std::isfinite(v))
    throw ConfigError("invalid " + what + ": '" + text + "'");
  return v;
}

inline int parse_sweeps(const std::string& text) {
  const double v = parse_positive(text, "sweep count");
  if (v != std::floor(v) || v > 1e6) throw ConfigError("invalid sweep count: '" + text + "'");
  return static_cast<int>(v);
}
}  // namespace detail

/// Parses one estimator token, e.g. "olspice:L=1", "ollasso:feasible",
/// "ollasso:infeasible", "ollasso:scaled=0.01", "olrls:lambda=1", "olrls:oracle".
inline EstimatorSpec parse_estimator(const std::string& token) {
  const auto parts = detail::split(token, ':');
  EstimatorSpec e;
  const std::string& name = parts.front();
  if (name == "olspice") {
    e.type = EstimatorSpec::Type::olspice;
  } else if (name == "ollasso") {
    e.type = EstimatorSpec::Type::ollasso;
  } else if (name == "olrls") {
    e.type = EstimatorSpec::Type::olrls;
  } else {
    throw ConfigError("unknown estimator '" + name + "'");
  }
  bool have_schedule = false;
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const std::string& opt = parts[k];
    const auto eq = opt.find('=');
    const std::string key = opt.substr(0, eq);
    const std::string val = eq == std::string::npos ? std::string{} : opt.substr(eq + 1);
    if (key == "L" && e.type != EstimatorSpec::Type::olrls && eq != std::string::npos) {
      e.sweeps = detail::parse_sweeps(val);
    } else if (e.type == EstimatorSpec::Type::ollasso && key == "feasible" && val.empty()) {
      e.schedule = LambdaSchedule::Kind::feasible;
      have_schedule = true;
    } else if (e.type == EstimatorSpec::Type::ollasso && key == "infeasible" && val.empty()) {
      e.schedule = LambdaSchedule::Kind::infeasible;
      have_schedule = true;
    } else if (e.type == EstimatorSpec::Type::ollasso && key == "scaled" && !val.empty()) {
      e.schedule = LambdaSchedule::Kind::scaled;
      e.factor = detail::parse_positive(val, "lambda scale");
      have_schedule = true;
    } else if (e.type == EstimatorSpec::Type::olrls && key == "lambda" && !val.empty()) {
      e.lambda = detail::parse_positive(val, "ridge lambda");
    } else if (e.type == EstimatorSpec::Type::olrls && key == "oracle" && val.empty()) {
      e.oracle_support = true;
    } else {
      throw ConfigError("unknown option '" + opt + "' for estimator '" + name + "'");
    }
  }
  if (e.type == EstimatorSpec::Type::ollasso && !have_schedule)
    throw ConfigError("ollasso needs a schedule: feasible, infeasible or scaled=<factor>");
  return e;
}

/// Comma-separated list of estimator tokens.
inline std::vector<EstimatorSpec> parse_estimators(const std::string& list) {
  std::vector<EstimatorSpec> out;
  for (const auto& tok : detail::split(list, ','))
    if (!tok.empty()) out.push_back(parse_estimator(tok));
  if (out.empty()) throw ConfigError("no estimators given");
  return out;
}

/// Concrete estimator state for one stream.
template <Scalar T>
class Estimator {
 public:
  Estimator(const EstimatorSpec& spec, Index p, double sigma2, const std::vector<Index>& support)
      : impl_(make(spec, p, sigma2, support)) {}

  const Vec<T>& process_sample(const Sample<T>& s) {
    return std::visit([&](auto& e) -> const Vec<T>& { return e.process_sample(s); }, impl_);
  }
  const Vec<T>& theta() const {
    return std::visit([](const auto& e) -> const Vec<T>& { return e.theta(); }, impl_);
  }

 private:
  using Impl = std::variant<OnlineSpice<T>, OnlineLasso<T>, OnlineRls<T>>;

  static Impl make(const EstimatorSpec& spec, Index p, double sigma2,
                   const std::vector<Index>& support) {
    switch (spec.type) {
      case EstimatorSpec::Type::olspice: return OnlineSpice<T>(p, spec.sweeps);
      case EstimatorSpec::Type::ollasso: {
        LambdaSchedule sched = spec.schedule == LambdaSchedule::Kind::feasible
                                   ? LambdaSchedule::feasible()
                               : spec.schedule == LambdaSchedule::Kind::infeasible
                                   ? LambdaSchedule::infeasible(sigma2)
                                   : LambdaSchedule::scaled(spec.factor);
        return OnlineLasso<T>(p, sched, spec.sweeps);
      }
      case EstimatorSpec::Type::olrls:
        if (spec.oracle_support) return OnlineRls<T>(p, spec.lambda, support);
        return OnlineRls<T>(p, spec.lambda);
    }
    throw std::logic_error("unreachable estimator type");
  }

  Impl impl_;
};

// ---------------------------------------------------------------------------
// Metrics

/// Ratio of Monte Carlo means E||theta - theta_hat||^2 / E||theta||^2.
inline double nmse(const std::vector<double>& sq_errors, const std::vector<double>& theta_norms2) {
  if (sq_errors.size() != theta_norms2.size() || sq_errors.empty())
    throw ConfigError("nmse: mismatched or empty inputs");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < sq_errors.size(); ++k) {
    num += sq_errors[k];
    den += theta_norms2[k];
  }
  if (!(den > 0.0)) throw ConfigError("nmse: zero parameter energy");
  return num / den;
}

inline double to_db(double ratio) {
  if (!(ratio > 0.0)) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

// ---------------------------------------------------------------------------
// Experiment running

enum class SnapshotMode { log, all };

/// Logarithmically spaced sample counts in [1, n_max] (ten per decade), always
/// including n_max; or every n when mode is all.
inline std::vector<std::int64_t> snapshot_grid(std::int64_t n_max, SnapshotMode mode) {
  std::vector<std::int64_t> grid;
  if (mode == SnapshotMode::all) {
    for (std::int64_t n = 1; n <= n_max; ++n) grid.push_back(n);
    return grid;
  }
  for (int k = 0;; ++k) {
    const auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, k / 10.0)));
    if (n > n_max) break;
    if (grid.empty() || grid.back() != n) grid.push_back(n);
  }
  if (grid.empty() || grid.back() != n_max) grid.push_back(n_max);
  return grid;
}

struct RunOptions {
  std::optional<int> trials;           // overrides the scenario's trial count
  std::optional<std::uint64_t> seed;   // overrides the scenario's seed
  std::int64_t zero_hold = 0;          // report theta_hat = 0 for n <= zero_hold
  SnapshotMode snapshots = SnapshotMode::log;
  std::optional<std::vector<std::int64_t>> grid;  // explicit snapshot grid
  unsigned threads = 0;                // 0: hardware concurrency
};

/// Estimates of every estimator at every snapshot for one Monte Carlo trial.
struct TrialResult {
  std::uint64_t trial = 0;
  Vec<cdouble> theta;
  std::vector<std::int64_t> grid;
  std::vector<std::vector<Vec<cdouble>>> estimates;  // [estimator][snapshot]

  double squared_error(std::size_t est, std::size_t snap, std::int64_t zero_hold) const {
    if (grid[snap] <= zero_hold) return theta.squaredNorm();
    return (estimates[est][snap] - theta).squaredNorm();
  }
};

struct SummaryPoint {
  double nmse = 0.0;
  double nmse_db = 0.0;
  double mse = 0.0;
  double var = 0.0;    // E||e - E e||^2 with e = theta_hat - theta
  double bias2 = 0.0;  // ||E e||^2
  int trials = 0;
};

struct RunSummary {
  std::string axis = "n";  // "n" or "snr_db"
  std::vector<double> axis_values;
  std::vector<std::string> estimators;
  std::vector<std::vector<SummaryPoint>> points;  // [estimator][axis value]
  double runtime_seconds = 0.0;
};

template <Scalar T>
TrialResult run_trial(const ScenarioSpec& spec, std::uint64_t trial,
                      const std::vector<EstimatorSpec>& estimators,
                      const std::vector<std::int64_t>& grid) {
  ScenarioStream<T> stream(spec, trial);
  const auto support = spec.theta_support();
  std::vector<Estimator<T>> ests;
  ests.reserve(estimators.size());
  for (const auto& e : estimators) ests.emplace_back(e, spec.p, stream.noise_variance(), support);

  TrialResult res;
  res.trial = trial;
  res.theta = stream.theta().template cast<cdouble>();
  res.grid = grid;
  res.estimates.assign(estimators.size(), {});
  std::size_t next_snap = 0;
  const std::int64_t horizon = grid.empty() ? 0 : grid.back();
  for (std::int64_t n = 1; n <= horizon; ++n) {
    const Sample<T> s = stream.next();
    for (auto& e : ests) e.process_sample(s);
    if (next_snap < grid.size() && grid[next_snap] == n) {
      for (std::size_t k = 0; k < ests.size(); ++k)
        res.estimates[k].push_back(ests[k].theta().template cast<cdouble>());
      ++next_snap;
    }
  }
  return res;
}

/// Aggregates trial results into per-snapshot NMSE, variance and squared bias.
/// Results are sorted by trial index first, so the output does not depend on
/// the order in which trials finished.
inline RunSummary aggregate(std::vector<TrialResult> results,
                            const std::vector<std::string>& estimator_ids,
                            std::int64_t zero_hold = 0) {
  if (results.empty()) throw ConfigError("aggregate: no trial results");
  std::sort(results.begin(), results.end(),
            [](const TrialResult& a, const TrialResult& b) { return a.trial < b.trial; });
  const auto& grid = results.front().grid;
  const Index p = results.front().theta.size();
  const double m = static_cast<double>(results.size());

  RunSummary out;
  out.estimators = estimator_ids;
  for (auto n : grid) out.axis_values.push_back(static_cast<double>(n));
  out.points.assign(estimator_ids.size(), std::vector<SummaryPoint>(grid.size()));

  for (std::size_t e = 0; e < estimator_ids.size(); ++e) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      Vec<cdouble> mean_err = Vec<cdouble>::Zero(p);
      std::vector<double> errs, norms;
      for (const auto& r : results) {
        const bool held = grid[g] <= zero_hold;
        mean_err += held ? Vec<cdouble>(-r.theta) : Vec<cdouble>(r.estimates[e][g] - r.theta);
        errs.push_back(r.squared_error(e, g, zero_hold));
        norms.push_back(r.theta.squaredNorm());
      }
      mean_err /= m;
      double var = 0.0;
      for (const auto& r : results) {
        const bool held = grid[g] <= zero_hold;
        const Vec<cdouble> err = held ? Vec<cdouble>(-r.theta) : Vec<cdouble>(r.estimates[e][g] - r.theta);
        var += (err - mean_err).squaredNorm();
      }
      SummaryPoint& pt = out.points[e][g];
      pt.nmse = nmse(errs, norms);
      pt.nmse_db = to_db(pt.nmse);
      double mse = 0.0;
      for (double v : errs) mse += v;
      pt.mse = mse / m;
      pt.var = var / m;
      pt.bias2 = mean_err.squaredNorm();
      pt.trials = static_cast<int>(results.size());
    }
  }
  return out;
}

/// Runs all Monte Carlo trials (in parallel across trials) and aggregates.
inline RunSummary run_experiment(ScenarioSpec spec, const std::vector<EstimatorSpec>& estimators,
                                 const RunOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.trials) spec.trials = *opt.trials;
  if (opt.seed) spec.seed = *opt.seed;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (estimators.empty()) throw ConfigError("no estimators given");
  if (opt.zero_hold < 0) throw ConfigError("zero-hold must be nonnegative");

  std::vector<std::int64_t> grid = opt.grid ? *opt.grid : snapshot_grid(spec.n_max, opt.snapshots);
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid[k] < 1 || (k > 0 && grid[k] <= grid[k - 1]))
      throw ConfigError("snapshot grid must be strictly increasing and >= 1");

  const auto trials = static_cast<std::size_t>(spec.trials);
  std::vector<TrialResult> results(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < trials; k = next++) {
      try {
        results[k] = spec.is_complex() ? run_trial<cdouble>(spec, k, estimators, grid)
                                       : run_trial<double>(spec, k, estimators, grid);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::string> ids;
  for (const auto& e : estimators) ids.push_back(e.id());
  RunSummary out = aggregate(std::move(results), ids, opt.zero_hold);
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// SNR values a, a+step, ..., up to b (inclusive, with a small tolerance).
inline std::vector<double> snr_range(double first, double last, double step) {
  if (!(step > 0.0) || !(last >= first)) throw ConfigError("invalid SNR sweep range");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(first + static_cast<double>(k) * step);
  return out;
}

/// NMSE versus SNR at a fixed sample count. Every SNR point reuses the same seeds,
/// so regressors and normalized noise are shared across the sweep.
inline RunSummary run_snr_sweep(const ScenarioSpec& spec,
                                const std::vector<EstimatorSpec>& estimators,
                                const std::vector<double>& snrs, std::int64_t fixed_n,
                                RunOptions opt = {}) {
  if (fixed_n < 1) throw ConfigError("fixed-n must be >= 1");
  if (snrs.empty()) throw ConfigError("empty SNR sweep");
  const auto t0 = std::chrono::steady_clock::now();
  opt.grid = std::vector<std::int64_t>{fixed_n};
  RunSummary out;
  out.axis = "snr_db";
  out.axis_values = snrs;
  for (const auto& e : estimators) out.estimators.push_back(e.id());
  out.points.assign(estimators.size(), {});
  for (double snr : snrs) {
    ScenarioSpec s = spec;
    s.snr_db = snr;
    s.n_max = fixed_n;
    const RunSummary one = run_experiment(s, estimators, opt);
    for (std::size_t e = 0; e < estimators.size(); ++e) out.points[e].push_back(one.points[e][0]);
  }
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace olspice

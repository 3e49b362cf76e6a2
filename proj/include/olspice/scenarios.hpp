#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace olspice {

enum class ScenarioKind { iid_gaussian, sinusoids, sar };
enum class AmplitudeMode { deterministic, gaussian };

inline std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::iid_gaussian: return "iid_gaussian";
    case ScenarioKind::sinusoids: return "sinusoids";
    case ScenarioKind::sar: return "sar";
  }
  return {};
}

inline std::string to_string(AmplitudeMode m) {
  return m == AmplitudeMode::deterministic ? "deterministic" : "gaussian";
}

/// Experiment description. `support` holds 0-based indices into the amplitude
/// set: coefficient indices for iid_gaussian and sar, sinusoid indices
/// (0..p/2-1) for sinusoids. Amplitudes are ignored in gaussian mode.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::iid_gaussian;
  Index p = 500;
  std::vector<Index> support;
  std::vector<double> amplitudes;
  AmplitudeMode amplitude_mode = AmplitudeMode::deterministic;
  double snr_db = 20.0;
  std::int64_t n_max = 1000;
  std::uint64_t seed = 1;
  int trials = 100;
  Index grid_side = 0;  // sar only; p = grid_side^2

  bool is_complex() const { return kind == ScenarioKind::sar; }

  /// Number of amplitude slots the support indexes into.
  Index slots() const { return kind == ScenarioKind::sinusoids ? p / 2 : p; }

  void validate() const {
    if (p < 1) throw std::invalid_argument("scenario: p must be positive");
    if (kind == ScenarioKind::sinusoids && p % 2 != 0)
      throw std::invalid_argument("scenario: sinusoids need even p = 2q");
    if (kind == ScenarioKind::sar && (grid_side < 1 || grid_side * grid_side != p))
      throw std::invalid_argument("scenario: sar needs p = grid_side^2");
    if (support.empty()) throw std::invalid_argument("scenario: empty support");
    std::vector<Index> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("scenario: duplicate support index");
    for (Index k : support)
      if (k < 0 || k >= slots()) throw std::invalid_argument("scenario: support index out of range");
    if (amplitude_mode == AmplitudeMode::deterministic) {
      if (amplitudes.size() != support.size())
        throw std::invalid_argument("scenario: amplitudes must match support size");
      for (double a : amplitudes)
        if (!(a != 0.0) || !std::isfinite(a))
          throw std::invalid_argument("scenario: amplitudes must be finite and nonzero");
    }
    if (!std::isfinite(snr_db)) throw std::invalid_argument("scenario: snr_db must be finite");
    if (n_max < 1) throw std::invalid_argument("scenario: n_max must be >= 1");
    if (trials < 1) throw std::invalid_argument("scenario: trials must be >= 1");
  }

  /// sigma^2 = min_{i in S} E|theta_i|^2 / 10^(snr_db / 10)
  double noise_variance() const {
    double min_power = 1.0;  // unit-variance gaussian amplitudes
    if (amplitude_mode == AmplitudeMode::deterministic) {
      min_power = std::numeric_limits<double>::infinity();
      for (double a : amplitudes) min_power = std::min(min_power, a * a);
    }
    return min_power / std::pow(10.0, snr_db / 10.0);
  }

  /// Support of the parameter vector theta (0-based). For sinusoids with zero
  /// phase only the sine coefficients are nonzero.
  std::vector<Index> theta_support() const {
    std::vector<Index> s;
    for (Index k : support) s.push_back(kind == ScenarioKind::sinusoids ? 2 * k + 1 : k);
    std::sort(s.begin(), s.end());
    return s;
  }
};

/// Replayable sample stream for one Monte Carlo trial: a pure function of
/// (spec, trial). T must be cdouble for sar and double otherwise.
template <Scalar T>
class ScenarioStream {
 public:
  ScenarioStream(const ScenarioSpec& spec, std::uint64_t trial)
      : spec_(spec), sigma2_(spec.noise_variance()) {
    spec_.validate();
    if (spec_.is_complex() != is_complex<T>::value)
      throw std::invalid_argument("ScenarioStream: scalar type does not match scenario kind");
    std::seed_seq theta_seq{static_cast<std::uint32_t>(spec.seed),
                            static_cast<std::uint32_t>(spec.seed >> 32),
                            static_cast<std::uint32_t>(trial),
                            static_cast<std::uint32_t>(trial >> 32), 0x7e7au};
    std::seed_seq data_seq{static_cast<std::uint32_t>(spec.seed),
                           static_cast<std::uint32_t>(spec.seed >> 32),
                           static_cast<std::uint32_t>(trial),
                           static_cast<std::uint32_t>(trial >> 32), 0xda7au};
    std::mt19937_64 theta_rng(theta_seq);
    rng_.seed(data_seq);
    init_theta(theta_rng);
    h_ = Vec<T>::Zero(spec_.p);
  }

  const Vec<T>& theta() const { return theta_; }
  double noise_variance() const { return sigma2_; }
  std::int64_t time() const { return t_; }
  /// Discrete frequency (u, v) of the most recent sar sample.
  std::pair<Index, Index> last_frequency() const { return last_freq_; }

  Sample<T> next() {
    ++t_;
    switch (spec_.kind) {
      case ScenarioKind::iid_gaussian: fill_iid(); break;
      case ScenarioKind::sinusoids: fill_sinusoid(); break;
      case ScenarioKind::sar: fill_sar(); break;
    }
    return {clean_observation() + draw_noise(), h_};
  }

  /// h^* theta for the most recent regressor.
  T clean_observation() const { return h_.dot(theta_); }

 private:
  void init_theta(std::mt19937_64& rng) {
    theta_ = Vec<T>::Zero(spec_.p);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto idx = [&](Index k) { return spec_.kind == ScenarioKind::sinusoids ? 2 * k + 1 : k; };
    for (std::size_t j = 0; j < spec_.support.size(); ++j) {
      double a = spec_.amplitude_mode == AmplitudeMode::deterministic ? spec_.amplitudes[j] : 0.0;
      if (spec_.amplitude_mode == AmplitudeMode::gaussian) {
        if constexpr (is_complex<T>::value) {
          const double re = normal(rng), im = normal(rng);
          theta_(idx(spec_.support[j])) = T(re, im) * std::sqrt(0.5);
          continue;
        } else {
          a = normal(rng);
        }
      }
      theta_(idx(spec_.support[j])) = T(a);
    }
  }

  void fill_iid() {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < spec_.p; ++i) h_(i) = T(normal(rng_));
  }

  void fill_sinusoid() {
    const Index q = spec_.p / 2;
    const double t = static_cast<double>(t_);
    for (Index k = 0; k < q; ++k) {
      const double w = static_cast<double>(k) * std::numbers::pi / static_cast<double>(q);
      h_(2 * k) = T(std::cos(w * t));
      h_(2 * k + 1) = T(std::sin(w * t));
    }
  }

  void fill_sar() {
    if constexpr (is_complex<T>::value) {
      const Index g = spec_.grid_side;
      std::uniform_int_distribution<Index> pick(0, g - 1);
      const Index u = pick(rng_);
      const Index v = pick(rng_);
      for (Index py = 0; py < g; ++py)
        for (Index px = 0; px < g; ++px) {
          // row entry e^{-j 2 pi (px u + py v) / G}; h stores its conjugate
          const Index m = (px * u + py * v) % g;
          const double ang = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(g);
          h_(px + g * py) = T(std::cos(ang), std::sin(ang));
        }
      last_freq_ = {u, v};
    }
  }

  T draw_noise() {
    std::normal_distribution<double> normal(0.0, 1.0);
    if constexpr (is_complex<T>::value) {
      const double re = normal(rng_), im = normal(rng_);
      return T(re, im) * std::sqrt(sigma2_ / 2.0);
    } else {
      return normal(rng_) * std::sqrt(sigma2_);
    }
  }

  ScenarioSpec spec_;
  double sigma2_;
  std::mt19937_64 rng_;
  Vec<T> theta_;
  Vec<T> h_;
  std::int64_t t_ = 0;
  std::pair<Index, Index> last_freq_{0, 0};
};

inline ScenarioSpec iid_spec(Index p, std::vector<Index> support, std::vector<double> amplitudes,
                             double snr_db, std::int64_t n_max, int trials, std::uint64_t seed = 1) {
  ScenarioSpec s;
  s.kind = ScenarioKind::iid_gaussian;
  s.p = p;
  s.support = std::move(support);
  s.amplitudes = std::move(amplitudes);
  s.snr_db = snr_db;
  s.n_max = n_max;
  s.trials = trials;
  s.seed = seed;
  return s;
}

inline ScenarioSpec sar_spec(Index grid_side, std::vector<Index> support, double snr_db,
                             std::int64_t n_max, int trials, std::uint64_t seed = 1) {
  ScenarioSpec s;
  s.kind = ScenarioKind::sar;
  s.grid_side = grid_side;
  s.p = grid_side * grid_side;
  s.amplitudes.assign(support.size(), 1.0);
  s.support = std::move(support);
  s.snr_db = snr_db;
  s.n_max = n_max;
  s.trials = trials;
  s.seed = seed;
  return s;
}

}  // namespace olspice

#pragma once
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "core.hpp"

namespace olspice {

/// Natural logarithm in the lambda schedules. Swap for std::log2/std::log10 to
/// change the base.
inline double schedule_log(double x) { return std::log(x); }

/// Rule producing the LASSO weight lambda_n:
///   infeasible: sqrt(2 sigma^2 n log p)   (needs the true noise variance)
///   feasible:   sqrt(n log p)
///   scaled:     factor * sqrt(n log p)
struct LambdaSchedule {
  enum class Kind { infeasible, feasible, scaled };

  Kind kind = Kind::feasible;
  double sigma2 = 0.0;
  double factor = 1.0;

  static LambdaSchedule feasible() { return {Kind::feasible, 0.0, 1.0}; }
  static LambdaSchedule infeasible(double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("infeasible schedule needs sigma2 > 0");
    return {Kind::infeasible, sigma2, 1.0};
  }
  static LambdaSchedule scaled(double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scaled schedule needs factor > 0");
    return {Kind::scaled, 0.0, factor};
  }

  /// True when evaluating the schedule requires knowledge unavailable in practice.
  bool oracle_only() const { return kind == Kind::infeasible; }

  double operator()(std::int64_t n, Index p) const {
    const double base = static_cast<double>(n) * schedule_log(static_cast<double>(p));
    switch (kind) {
      case Kind::infeasible: return std::sqrt(2.0 * sigma2 * base);
      case Kind::feasible: return std::sqrt(base);
      case Kind::scaled: return factor * std::sqrt(base);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::infeasible: return "infeasible";
      case Kind::feasible: return "feasible";
      case Kind::scaled: {
        std::ostringstream os;
        os << "scaled=" << factor;
        return os.str();
      }
    }
    return {};
  }
};

/// Minimizer over theta_i of ||y~_i - c_i theta_i||^2 + lambda |theta_i|:
/// r = max((2 gamma - lambda) / (2 beta), 0), phase = arg(zeta_i + Gamma_ii theta_i).
template <Scalar T>
T lasso_coordinate_minimize(const SufficientStats<T>& stats, const Vec<T>& zeta,
                            const Vec<T>& theta, Index i, double lambda) {
  if (i < 0 || i >= stats.dim()) throw std::out_of_range("coordinate index out of range");
  const double beta = real(stats.gamma(i, i));
  if (!(beta > 0.0)) return T(0);
  const T source = zeta(i) + T(beta) * theta(i);
  const double gamma = std::abs(source);
  const double r = (2.0 * gamma - lambda) / (2.0 * beta);
  if (!(r > 0.0)) return T(0);
  return T(r) * unit_phase(source);
}

/// Online cyclic LASSO for real and complex streams. zeta = rho - Gamma theta is
/// recomputed from the statistics at every sample, then `sweeps` passes are run.
template <Scalar T>
class OnlineLasso {
 public:
  OnlineLasso(Index p, LambdaSchedule schedule, int sweeps = 1)
      : stats_(p), zeta_(Vec<T>::Zero(p)), theta_(Vec<T>::Zero(p)),
        schedule_(schedule), sweeps_(sweeps) {
    if (p < 1) throw std::invalid_argument("OnlineLasso: dimension must be positive");
    if (sweeps < 1) throw std::invalid_argument("OnlineLasso: sweeps must be >= 1");
  }

  const Vec<T>& process_sample(const Sample<T>& s) {
    ingest(stats_, s);
    zeta_ = init_aux(stats_, theta_).zeta;
    const double lambda = schedule_(stats_.n, dim());
    for (int l = 0; l < sweeps_; ++l) sweep(lambda);
    return theta_;
  }

  void sweep(double lambda) {
    const Index p = dim();
    for (Index i = 0; i < p; ++i) {
      const T next = lasso_coordinate_minimize(stats_, zeta_, theta_, i, lambda);
      const T delta = theta_(i) - next;
      if (delta != T(0))
        for (Index k = 0; k < p; ++k) zeta_(k) += stats_.gamma(k, i) * delta;
      theta_(i) = next;
    }
  }

  Index dim() const { return theta_.size(); }
  const Vec<T>& theta() const { return theta_; }
  const Vec<T>& zeta() const { return zeta_; }
  const SufficientStats<T>& stats() const { return stats_; }
  const LambdaSchedule& schedule() const { return schedule_; }

 private:
  SufficientStats<T> stats_;
  Vec<T> zeta_;
  Vec<T> theta_;
  LambdaSchedule schedule_;
  int sweeps_;
};

}  // namespace olspice

#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "core.hpp"

namespace olspice {

/// Per-coordinate quantities of the weighted square-root LASSO cost with all
/// other coordinates held fixed:
///   alpha = ||y~_i||^2, beta = ||c_i||^2, gamma = |c_i^* y~_i|
/// where y~_i is the partial residual excluding coordinate i.
struct CoordinateStats {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// alpha*beta - gamma^2, which is nonnegative by Cauchy-Schwarz; rounding can
  /// push it slightly below zero, so it is clamped.
  double gap() const { return std::max(0.0, alpha * beta - gamma * gamma); }
};

/// Coordinate statistics together with c_i^* y~_i, whose phase sets the phase of
/// the coordinate minimizer.
template <Scalar T>
struct CoordinateView {
  CoordinateStats cs;
  T phase_source{};
};

template <Scalar T>
CoordinateView<T> coordinate_stats(const SufficientStats<T>& stats, const AuxState<T>& aux,
                                   const Vec<T>& theta, Index i) {
  if (i < 0 || i >= stats.dim()) throw std::out_of_range("coordinate index out of range");
  const double gii = real(stats.gamma(i, i));
  const T ti = theta(i);
  CoordinateView<T> v;
  v.phase_source = aux.zeta(i) + T(gii) * ti;
  v.cs.alpha = std::max(0.0, aux.eta + gii * abs2(ti) + 2.0 * real(conj(ti) * aux.zeta(i)));
  v.cs.beta = gii;
  v.cs.gamma = std::abs(v.phase_source);
  return v;
}

/// Radius of the scalar minimizer of
///   J(r) = sqrt(alpha + beta r^2 - 2 gamma r) + sqrt(beta / n) r,  r >= 0.
/// Returns 0 in the thresholding branch, for unexcited coordinates (beta = 0) and
/// when n <= 1.
inline double spice_radius(const CoordinateStats& cs, std::int64_t n) {
  if (n <= 1 || !(cs.beta > 0.0)) return 0.0;
  const double m = static_cast<double>(n - 1);
  const double root_gap = std::sqrt(cs.gap());
  if (!(std::sqrt(m) * cs.gamma > root_gap)) return 0.0;
  const double r = cs.gamma / cs.beta - std::sqrt(cs.gap() / m) / cs.beta;
  return std::clamp(r, 0.0, cs.gamma / cs.beta);
}

/// Element-wise minimizer theta_i = r e^{j arg(phase_source)}.
template <Scalar T>
T coordinate_minimize(const CoordinateStats& cs, T phase_source, std::int64_t n) {
  const double r = spice_radius(cs, n);
  if (r == 0.0) return T(0);
  return T(r) * unit_phase(phase_source);
}

/// Online SPICE: a hyperparameter-free online solver of the weighted
/// square-root LASSO
///   min ||y_n - H_n theta||_2 + sum_i sqrt(Gamma_ii / n) |theta_i|
/// using `sweeps` cyclic coordinate passes per sample, warm-started from the
/// previous estimate. Per-sample cost is O(sweeps * p^2) with constant memory.
template <Scalar T>
class OnlineSpice {
 public:
  explicit OnlineSpice(Index p, int sweeps = 1)
      : stats_(p), theta_(Vec<T>::Zero(p)), sweeps_(sweeps) {
    if (p < 1) throw std::invalid_argument("OnlineSpice: dimension must be positive");
    if (sweeps < 1) throw std::invalid_argument("OnlineSpice: sweeps must be >= 1");
    aux_.zeta = Vec<T>::Zero(p);
  }

  const Vec<T>& process_sample(const Sample<T>& s) {
    ingest(stats_, s);
    aux_ = init_aux(stats_, theta_);
    if (stats_.n <= 1) return theta_;
    for (int l = 0; l < sweeps_; ++l) sweep();
    return theta_;
  }

  /// One ascending pass i = 0..p-1 over the coordinates.
  void sweep() {
    const Index p = dim();
    for (Index i = 0; i < p; ++i) {
      const auto v = coordinate_stats(stats_, aux_, theta_, i);
      const T next = coordinate_minimize(v.cs, v.phase_source, stats_.n);
      apply_coordinate_delta(aux_, stats_, i, theta_(i), next);
      theta_(i) = next;
    }
  }

  Index dim() const { return theta_.size(); }
  int sweeps() const { return sweeps_; }
  const Vec<T>& theta() const { return theta_; }
  const SufficientStats<T>& stats() const { return stats_; }
  const AuxState<T>& aux() const { return aux_; }

 private:
  SufficientStats<T> stats_;
  AuxState<T> aux_;
  Vec<T> theta_;
  int sweeps_;
};

}  // namespace olspice

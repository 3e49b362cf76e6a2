#pragma once
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "scalar.hpp"

namespace olspice {

/// One streaming measurement y_t = h_t^* theta + w_t.
template <Scalar T>
struct Sample {
  T y{};
  Vec<T> h;
};

/// Growing-memory sufficient statistics of a stream:
/// gamma = H^* H, rho = H^* y, kappa = y^* y, where the rows of H are h_t^*.
template <Scalar T>
struct SufficientStats {
  Mat<T> gamma;
  Vec<T> rho;
  double kappa = 0.0;
  std::int64_t n = 0;

  SufficientStats() = default;
  explicit SufficientStats(Index p)
      : gamma(Mat<T>::Zero(p, p)), rho(Vec<T>::Zero(p)) {}

  Index dim() const { return rho.size(); }
};

/// Residual energy eta = ||y - H theta||^2 and correlation zeta = H^*(y - H theta)
/// for the current estimate theta.
template <Scalar T>
struct AuxState {
  double eta = 0.0;
  Vec<T> zeta;
};

template <Scalar T>
void validate_sample(const Sample<T>& s, Index p) {
  if (s.h.size() != p)
    throw std::invalid_argument("sample regressor has length " + std::to_string(s.h.size()) +
                                ", expected " + std::to_string(p));
  if (!is_finite(s.y) || !all_finite(s.h))
    throw std::invalid_argument("sample contains non-finite entries");
}

/// Rank-1 update of the statistics. O(p^2). Both triangles of gamma are written
/// from the same product so gamma stays exactly Hermitian.
template <Scalar T>
void ingest(SufficientStats<T>& stats, const Sample<T>& s) {
  const Index p = stats.dim();
  validate_sample(s, p);
  auto& g = stats.gamma;
  for (Index j = 0; j < p; ++j) {
    const T hj_conj = conj(s.h(j));
    g(j, j) += T(abs2(s.h(j)));
    for (Index i = j + 1; i < p; ++i) {
      const T v = s.h(i) * hj_conj;
      g(i, j) += v;
      g(j, i) += conj(v);
    }
  }
  for (Index i = 0; i < p; ++i) stats.rho(i) += s.h(i) * s.y;
  stats.kappa += abs2(s.y);
  ++stats.n;
}

template <Scalar T>
SufficientStats<T> ingested(SufficientStats<T> stats, const Sample<T>& s) {
  ingest(stats, s);
  return stats;
}

/// Auxiliaries for estimate theta from scratch:
/// eta = kappa + theta^* gamma theta - 2 Re{theta^* rho}, zeta = rho - gamma theta.
template <Scalar T>
AuxState<T> init_aux(const SufficientStats<T>& stats, const Vec<T>& theta) {
  const Index p = stats.dim();
  if (theta.size() != p) throw std::invalid_argument("init_aux: estimate dimension mismatch");
  if (!all_finite(theta)) throw std::invalid_argument("init_aux: non-finite estimate");

  Vec<T> gt = Vec<T>::Zero(p);
  for (Index j = 0; j < p; ++j) {
    const T tj = theta(j);
    if (tj == T(0)) continue;
    for (Index i = 0; i < p; ++i) gt(i) += stats.gamma(i, j) * tj;
  }
  AuxState<T> aux;
  aux.zeta = stats.rho - gt;
  double quad = 0.0;
  double cross = 0.0;
  for (Index i = 0; i < p; ++i) {
    quad += real(conj(theta(i)) * gt(i));
    cross += real(conj(theta(i)) * stats.rho(i));
  }
  aux.eta = std::max(0.0, stats.kappa + quad - 2.0 * cross);
  return aux;
}

/// Update the auxiliaries after coordinate i of the estimate moves from old_value
/// to new_value. O(p).
template <Scalar T>
void apply_coordinate_delta(AuxState<T>& aux, const SufficientStats<T>& stats, Index i,
                            T old_value, T new_value) {
  const Index p = stats.dim();
  if (i < 0 || i >= p) throw std::out_of_range("coordinate index out of range");
  const T delta = old_value - new_value;
  if (delta == T(0)) return;
  const double gii = real(stats.gamma(i, i));
  aux.eta += gii * abs2(delta) + 2.0 * real(conj(delta) * aux.zeta(i));
  aux.eta = std::max(0.0, aux.eta);
  for (Index k = 0; k < p; ++k) aux.zeta(k) += stats.gamma(k, i) * delta;
}

}  // namespace olspice

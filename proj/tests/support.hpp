#pragma once
// Test-only helpers: random instances, retained histories and independent
// batch reference computations.
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <olspice/core.hpp>
#include <olspice/oracle.hpp>

namespace olspice::testing {

template <Scalar T>
T draw(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if constexpr (is_complex<T>::value) {
    const double re = normal(rng), im = normal(rng);
    return T(re, im) * std::sqrt(0.5);
  } else {
    return normal(rng);
  }
}

template <Scalar T>
Vec<T> draw_vec(std::mt19937_64& rng, Index p) {
  Vec<T> v(p);
  for (Index i = 0; i < p; ++i) v(i) = draw<T>(rng);
  return v;
}

template <Scalar T>
Vec<T> sparse_theta(std::mt19937_64& rng, Index p, Index nonzeros) {
  Vec<T> theta = Vec<T>::Zero(p);
  std::uniform_int_distribution<Index> pick(0, p - 1);
  for (Index k = 0; k < nonzeros; ++k) theta(pick(rng)) = T(1.0) + draw<T>(rng);
  return theta;
}

/// Stream y_t = h_t^* theta + sigma w_t with i.i.d. standard regressors.
template <Scalar T>
std::vector<Sample<T>> draw_stream(std::mt19937_64& rng, const Vec<T>& theta, Index n,
                                   double sigma) {
  std::vector<Sample<T>> out;
  for (Index t = 0; t < n; ++t) {
    Sample<T> s;
    s.h = draw_vec<T>(rng, theta.size());
    s.y = s.h.dot(theta) + T(sigma) * draw<T>(rng);
    out.push_back(std::move(s));
  }
  return out;
}

template <Scalar T>
BatchProblem<T> stack(const std::vector<Sample<T>>& samples) {
  return stack_samples<T>(std::span<const Sample<T>>(samples));
}

template <class A, class B>
double rel_err(const A& a, const B& b) {
  const double scale = std::max<double>(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// ||y - H theta||^2 + lambda ||theta||_1
template <Scalar T>
double lasso_cost(const BatchProblem<T>& prob, const Vec<T>& theta, double lambda) {
  double l1 = 0.0;
  for (Index i = 0; i < theta.size(); ++i) l1 += std::abs(theta(i));
  return (prob.y - prob.hmat * theta).squaredNorm() + lambda * l1;
}

/// Batch cyclic coordinate descent for the real LASSO written directly from the
/// normal equations on explicit (H, y): theta_i = soft(rho~_i, lambda/2) / Gamma_ii.
inline Vec<double> batch_lasso_cd(const BatchProblem<double>& prob, double lambda,
                                  Vec<double> theta, int sweeps) {
  const Index p = prob.cols();
  for (int l = 0; l < sweeps; ++l)
    for (Index i = 0; i < p; ++i) {
      const auto c = prob.hmat.col(i);
      const double gii = c.squaredNorm();
      if (gii == 0.0) {
        theta(i) = 0.0;
        continue;
      }
      Vec<double> partial = prob.y - prob.hmat * theta + c * theta(i);
      const double rho_t = c.dot(partial);
      const double mag = std::max(std::abs(rho_t) - lambda / 2.0, 0.0);
      theta(i) = (rho_t < 0 ? -mag : mag) / gii;
    }
  return theta;
}

}  // namespace olspice::testing

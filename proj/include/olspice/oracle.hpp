#pragma once
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "core.hpp"
#include "spice.hpp"

namespace olspice {

/// Explicit batch model y = H theta + w; row t of H is h_t^*.
template <Scalar T>
struct BatchProblem {
  Mat<T> hmat;
  Vec<T> y;

  Index rows() const { return hmat.rows(); }
  Index cols() const { return hmat.cols(); }

  void validate() const {
    if (hmat.rows() != y.size()) throw std::invalid_argument("BatchProblem: row count mismatch");
    if (hmat.cols() < 1) throw std::invalid_argument("BatchProblem: no columns");
  }
};

template <Scalar T>
BatchProblem<T> stack_samples(std::span<const Sample<T>> samples) {
  if (samples.empty()) throw std::invalid_argument("stack_samples: empty history");
  const Index p = samples.front().h.size();
  BatchProblem<T> prob{Mat<T>(static_cast<Index>(samples.size()), p),
                       Vec<T>(static_cast<Index>(samples.size()))};
  for (Index t = 0; t < prob.rows(); ++t) {
    validate_sample(samples[t], p);
    prob.hmat.row(t) = samples[t].h.adjoint();
    prob.y(t) = samples[t].y;
  }
  return prob;
}

/// ||y - H theta||_2 + sum_i sqrt(||c_i||^2 / n) |theta_i|
template <Scalar T>
double weighted_sqrt_lasso_cost(const BatchProblem<T>& prob, const Vec<T>& theta) {
  const double n = static_cast<double>(prob.rows());
  double penalty = 0.0;
  for (Index i = 0; i < prob.cols(); ++i)
    penalty += std::sqrt(prob.hmat.col(i).squaredNorm() / n) * std::abs(theta(i));
  return (prob.y - prob.hmat * theta).norm() + penalty;
}

template <Scalar T>
struct BatchSolution {
  Vec<T> theta;
  bool converged = false;
  long sweeps = 0;
};

/// Batch cyclic minimization of the weighted square-root LASSO on explicit
/// (H, y), with the residual held explicitly. Sweeps until the largest
/// coordinate change in a sweep is below `tol`. Zero columns keep coefficient 0.
template <Scalar T>
BatchSolution<T> batch_weighted_sqrt_lasso(const BatchProblem<T>& prob, double tol = 1e-10,
                                           long max_sweeps = 100000) {
  prob.validate();
  const Index n = prob.rows();
  const Index p = prob.cols();
  if (n < 2) throw std::invalid_argument("batch_weighted_sqrt_lasso: needs at least 2 rows");

  BatchSolution<T> sol{Vec<T>::Zero(p), false, 0};
  Vec<T> col_norm2(p);
  for (Index i = 0; i < p; ++i) col_norm2(i) = T(prob.hmat.col(i).squaredNorm());
  Vec<T> resid = prob.y;
  Vec<T> partial(n);

  while (sol.sweeps < max_sweeps) {
    ++sol.sweeps;
    double max_change = 0.0;
    for (Index i = 0; i < p; ++i) {
      const double beta = real(col_norm2(i));
      if (beta == 0.0) continue;
      const auto c = prob.hmat.col(i);
      partial = resid + c * sol.theta(i);
      const T corr = c.dot(partial);  // c^* y~
      CoordinateStats cs{partial.squaredNorm(), beta, std::abs(corr)};
      const T next = coordinate_minimize(cs, corr, static_cast<std::int64_t>(n));
      max_change = std::max(max_change, std::abs(next - sol.theta(i)));
      sol.theta(i) = next;
      resid = partial - c * next;
    }
    if (max_change < tol) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

/// Covariance parameters: diagonal of P and the noise variance sigma^2.
struct CovParams {
  Eigen::VectorXd pdiag;
  double sigma2 = 1.0;

  void validate() const {
    if (!(sigma2 > 0.0) || !(pdiag.size() > 0) || !(pdiag.array() > 0.0).all())
      throw std::invalid_argument("CovParams: all parameters must be strictly positive");
  }
  CovParams scaled(double c) const { return {pdiag * c, sigma2 * c}; }
};

/// R = H P H^* + sigma^2 I
template <Scalar T>
Mat<T> model_covariance(const BatchProblem<T>& prob, const CovParams& cp) {
  prob.validate();
  cp.validate();
  if (cp.pdiag.size() != prob.cols()) throw std::invalid_argument("CovParams dimension mismatch");
  Mat<T> hp = prob.hmat * cp.pdiag.cast<T>().asDiagonal();
  Mat<T> r = hp * prob.hmat.adjoint();
  r.diagonal().array() += T(cp.sigma2);
  return r;
}

/// theta = (H^* H + sigma^2 P^{-1})^{-1} H^* y
template <Scalar T>
Vec<T> lmmse_information_form(const BatchProblem<T>& prob, const CovParams& cp) {
  prob.validate();
  cp.validate();
  Mat<T> a = prob.hmat.adjoint() * prob.hmat;
  for (Index i = 0; i < a.rows(); ++i) a(i, i) += T(cp.sigma2 / cp.pdiag(i));
  Eigen::LDLT<Mat<T>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("lmmse: singular information matrix");
  return ldlt.solve(prob.hmat.adjoint() * prob.y);
}

/// Linear MMSE estimate P H^* (H P H^* + sigma^2 I)^{-1} y, cross-checked against
/// the information form.
template <Scalar T>
Vec<T> lmmse(const BatchProblem<T>& prob, const CovParams& cp) {
  const Mat<T> r = model_covariance(prob, cp);
  Eigen::LDLT<Mat<T>> ldlt(r);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("lmmse: singular covariance");
  const Vec<T> w = ldlt.solve(prob.y);
  Vec<T> theta = cp.pdiag.cast<T>().asDiagonal() * (prob.hmat.adjoint() * w);

  const Vec<T> alt = lmmse_information_form(prob, cp);
  const double scale = std::max(theta.norm(), alt.norm());
  if ((theta - alt).norm() > 1e-6 * std::max(scale, 1e-300))
    throw std::runtime_error("lmmse: closed forms disagree; system is ill-conditioned");
  return theta;
}

namespace detail {
template <Scalar T>
double quad_inverse(const Mat<T>& r, const Vec<T>& y) {
  Eigen::LDLT<Mat<T>> ldlt(r);
  return real(y.dot(ldlt.solve(y)));
}
}  // namespace detail

/// Cost after concentrating out theta: y^* R^{-1} y + tr{R}.
template <Scalar T>
double concentrated_cost(const BatchProblem<T>& prob, const CovParams& cp) {
  const Mat<T> r = model_covariance(prob, cp);
  return detail::quad_inverse(r, prob.y) + real(r.trace());
}

/// Expanded covariance-matching cost y^* R^{-1} y + ||y||^{-2} tr{R}.
template <Scalar T>
double covmatch_cost(const BatchProblem<T>& prob, const CovParams& cp) {
  const Mat<T> r = model_covariance(prob, cp);
  return detail::quad_inverse(r, prob.y) + real(r.trace()) / prob.y.squaredNorm();
}

/// ||R^{-1/2}(y y^* - R)||_F^2 evaluated as tr{(yy^* - R) R^{-1} (yy^* - R)}.
template <Scalar T>
double covmatch_frobenius(const BatchProblem<T>& prob, const CovParams& cp) {
  const Mat<T> r = model_covariance(prob, cp);
  const Mat<T> a = prob.y * prob.y.adjoint() - r;
  Eigen::LDLT<Mat<T>> ldlt(r);
  const Mat<T> x = ldlt.solve(a);
  return real((a * x).trace());
}

}  // namespace olspice

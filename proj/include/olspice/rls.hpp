#pragma once
#include <optional>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace olspice {

/// Online l2-regularized least squares in covariance form. With P_0 = I / lambda
/// and theta_0 = 0 the estimate equals (Gamma^n + lambda I)^{-1} rho^n exactly at
/// every n. When a support is given, the recursion runs on that sub-vector only
/// and the remaining coordinates are reported as zero.
template <Scalar T>
class OnlineRls {
 public:
  explicit OnlineRls(Index p, double lambda = 1.0,
                     std::optional<std::vector<Index>> support = std::nullopt)
      : p_(p), lambda_(lambda), support_(std::move(support)) {
    if (p < 1) throw std::invalid_argument("OnlineRls: dimension must be positive");
    if (!(lambda > 0.0)) throw std::invalid_argument("OnlineRls: lambda must be positive");
    Index q = p;
    if (support_) {
      for (Index k : *support_)
        if (k < 0 || k >= p) throw std::invalid_argument("OnlineRls: support index out of range");
      q = static_cast<Index>(support_->size());
    }
    pmat_ = Mat<T>::Identity(q, q) / lambda;
    sub_theta_ = Vec<T>::Zero(q);
    theta_ = Vec<T>::Zero(p);
    h_ = Vec<T>(q);
    ph_ = Vec<T>(q);
  }

  const Vec<T>& process_sample(const Sample<T>& s) {
    validate_sample(s, p_);
    const Index q = sub_theta_.size();
    if (support_)
      for (Index k = 0; k < q; ++k) h_(k) = s.h((*support_)[k]);
    else
      h_ = s.h;

    // ph = P h, denom = 1 + h^* P h (real for Hermitian P)
    ph_.noalias() = pmat_ * h_;
    double denom = 1.0;
    T pred(0);
    for (Index k = 0; k < q; ++k) {
      denom += real(conj(h_(k)) * ph_(k));
      pred += conj(h_(k)) * sub_theta_(k);
    }
    const T innovation = s.y - pred;
    for (Index k = 0; k < q; ++k) sub_theta_(k) += ph_(k) * (innovation / denom);

    // P := P - ph ph^* / denom, both triangles from one product
    for (Index j = 0; j < q; ++j) {
      pmat_(j, j) -= T(abs2(ph_(j)) / denom);
      for (Index i = j + 1; i < q; ++i) {
        const T v = ph_(i) * conj(ph_(j)) / denom;
        pmat_(i, j) -= v;
        pmat_(j, i) -= conj(v);
      }
    }

    if (support_)
      for (Index k = 0; k < q; ++k) theta_((*support_)[k]) = sub_theta_(k);
    else
      theta_ = sub_theta_;
    ++n_;
    return theta_;
  }

  Index dim() const { return p_; }
  double lambda() const { return lambda_; }
  std::int64_t count() const { return n_; }
  const Vec<T>& theta() const { return theta_; }
  const Mat<T>& pmat() const { return pmat_; }
  const std::optional<std::vector<Index>>& support() const { return support_; }

 private:
  Index p_;
  double lambda_;
  std::optional<std::vector<Index>> support_;
  Mat<T> pmat_;
  Vec<T> sub_theta_;
  Vec<T> theta_;
  Vec<T> h_;
  Vec<T> ph_;
  std::int64_t n_ = 0;
};

}  // namespace olspice

#pragma once
#include <cmath>
#include <complex>
#include <type_traits>

#include <Eigen/Core>

namespace olspice {

using cdouble = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Estimators are instantiated for real (double) or complex (std::complex<double>) data.
template <class T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, cdouble>;

template <Scalar T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <Scalar T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

inline double conj(double x) { return x; }
inline cdouble conj(const cdouble& x) { return std::conj(x); }

inline double real(double x) { return x; }
inline double real(const cdouble& x) { return x.real(); }

inline double abs2(double x) { return x * x; }
inline double abs2(const cdouble& x) { return x.real() * x.real() + x.imag() * x.imag(); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const cdouble& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

/// Unit-modulus phase factor e^{j arg(x)}, with arg(0) := 0.
/// For real inputs this is the sign in {-1, +1}; for complex inputs with a zero
/// imaginary part the result is exactly real.
inline double unit_phase(double x) { return x < 0.0 ? -1.0 : 1.0; }
inline cdouble unit_phase(const cdouble& x) {
  const double m = std::abs(x);
  if (m == 0.0) return {1.0, 0.0};
  return {x.real() / m, x.imag() / m};
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (!is_finite(v(i))) return false;
  return true;
}

}  // namespace olspice

// Small moment kernels over Eigen vectors and expressions.
//
// All moments use the 1/T normalization, so that the mean product of two
// standardized series is exactly their Pearson coefficient.
#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace epps::stats {

template <typename Derived>
typename Derived::Scalar mean(const Eigen::MatrixBase<Derived>& x) {
  return x.mean();
}

template <typename Derived>
typename Derived::Scalar variance(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = x.mean();
  return (x.array() - m).square().mean();
}

template <typename Derived>
typename Derived::Scalar stddev(const Eigen::MatrixBase<Derived>& x) {
  using std::sqrt;
  return sqrt(variance(x));
}

/// Zero mean, unit variance. A constant input maps to zeros.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> standardize(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = x.mean();
  const Scalar s = stddev(x);
  if (s == Scalar(0)) return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(x.size());
  return (x.array() - m) / s;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar covariance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar n = static_cast<Scalar>(a.size());
  return ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / n;
}

/// Pearson coefficient; NaN when either input is constant.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pearson(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const auto ca = (a.array() - a.mean()).matrix().eval();
  const auto cb = (b.array() - b.mean()).matrix().eval();
  const Scalar denom = ca.norm() * cb.norm();
  if (denom == Scalar(0)) return std::numeric_limits<Scalar>::quiet_NaN();
  return ca.dot(cb) / denom;
}

/// Fourth standardized moment minus 3.
template <typename Derived>
typename Derived::Scalar excess_kurtosis(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto c = (x.array() - x.mean()).eval();
  const Scalar m2 = c.square().mean();
  return c.square().square().mean() / (m2 * m2) - Scalar(3);
}

/// Autocorrelation at `lag` using the full-sample mean and variance.
template <typename Derived>
typename Derived::Scalar autocorrelation(const Eigen::MatrixBase<Derived>& x, Eigen::Index lag) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  const auto c = (x.array() - x.mean()).eval();
  const Scalar num = (c.head(n - lag) * c.tail(n - lag)).sum();
  return num / c.square().sum();
}

}  // namespace epps::stats

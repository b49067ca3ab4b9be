#pragma once

#include <cmath>
#include <limits>
#include <span>

#include <Eigen/Core>
#include <Eigen/LU>

namespace dppselect {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// L_S: rows and columns of `m` restricted to `indices`, in the given order.
template <typename Derived>
MatrixX<typename Derived::Scalar> principal_submatrix(const Eigen::MatrixBase<Derived>& m,
                                                      std::span<const Eigen::Index> indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  MatrixX<typename Derived::Scalar> sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = m(indices[i], indices[j]);
  return sub;
}

/// det(L_S) through a fully pivoted LU. The empty subset has determinant 1.
template <typename Derived>
typename Derived::Scalar subset_determinant(const Eigen::MatrixBase<Derived>& m, std::span<const Eigen::Index> indices) {
  if (indices.empty()) return typename Derived::Scalar(1);
  return principal_submatrix(m, indices).fullPivLu().determinant();
}

/// log det(L_S + jitter * I) from an unpivoted LDL^T; -inf when a pivot is
/// not strictly positive.
template <typename Derived>
typename Derived::Scalar subset_log_det(const Eigen::MatrixBase<Derived>& m, std::span<const Eigen::Index> indices,
                                        typename Derived::Scalar jitter = 0) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<Eigen::Index>(indices.size());
  MatrixX<Scalar> a = principal_submatrix(m, indices);
  a.diagonal().array() += jitter;
  Scalar log_det = 0;
  // Right-looking LDL^T without pivoting; the matrix is PSD so pivots are the
  // successive Schur complements.
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar pivot = a(k, k);
    if (!(pivot > Scalar(0))) return -std::numeric_limits<Scalar>::infinity();
    log_det += std::log(pivot);
    const Eigen::Index rest = n - k - 1;
    if (rest > 0) {
      const VectorX<Scalar> col = a.col(k).tail(rest);
      a.bottomRightCorner(rest, rest).noalias() -= col * col.transpose() / pivot;
    }
  }
  return log_det;
}

}  // namespace dppselect

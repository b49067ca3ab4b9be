#pragma once

#include <string>

#include <Eigen/Core>

#include "dppselect/error.hpp"
#include "dppselect/linalg.hpp"

namespace dppselect {

/// Elementary symmetric polynomials of a prefix of eigenvalues:
/// table(n, k) = e_k(lambda_1, ..., lambda_n).
template <typename Scalar>
struct EspTable {
  MatrixX<Scalar> table;

  Eigen::Index size() const noexcept { return table.rows() - 1; }
  Eigen::Index k_max() const noexcept { return table.cols() - 1; }
  Scalar operator()(Eigen::Index n, Eigen::Index k) const { return table(n, k); }
};

/// Fills the table with e_k(1..n) = e_k(1..n-1) + lambda_n * e_{k-1}(1..n-1).
/// Throws NegativeEigenvalue for any lambda < 0.
template <typename Derived>
EspTable<typename Derived::Scalar> esp(const Eigen::MatrixBase<Derived>& eigenvalues, Eigen::Index k_max) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = eigenvalues.size();
  if (k_max < 0) throw Error(ErrorCode::InvalidBudget, "k_max must be non-negative");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(eigenvalues(i) >= Scalar(0)))
      throw Error(ErrorCode::NegativeEigenvalue, "eigenvalue " + std::to_string(i) + " is negative");
  }
  EspTable<Scalar> out{MatrixX<Scalar>::Zero(n + 1, k_max + 1)};
  out.table.col(0).setOnes();
  for (Eigen::Index row = 1; row <= n; ++row) {
    const Scalar lambda = eigenvalues(row - 1);
    for (Eigen::Index k = 1; k <= k_max; ++k)
      out.table(row, k) = out.table(row - 1, k) + lambda * out.table(row - 1, k - 1);
  }
  return out;
}

}  // namespace dppselect

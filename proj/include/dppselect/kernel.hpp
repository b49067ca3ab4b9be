#pragma once

#include <filesystem>

#include <Eigen/Core>

#include "dppselect/linalg.hpp"
#include "dppselect/scoring.hpp"
#include "dppselect/types.hpp"

namespace dppselect {

/// L_ij = s_i * <e_i, e_j> * s_j for row-wise embeddings `embeddings` and
/// relevance `scores`. Only the lower triangle is computed and then mirrored,
/// so the result is exactly symmetric.
template <typename DerivedE, typename DerivedS>
MatrixX<typename DerivedE::Scalar> quality_diversity_matrix(const Eigen::MatrixBase<DerivedE>& embeddings,
                                                            const Eigen::MatrixBase<DerivedS>& scores) {
  using Scalar = typename DerivedE::Scalar;
  const MatrixX<Scalar> weighted = scores.asDiagonal() * embeddings;
  MatrixX<Scalar> l = MatrixX<Scalar>::Zero(embeddings.rows(), embeddings.rows());
  l.template selfadjointView<Eigen::Lower>().rankUpdate(weighted);
  l.template triangularView<Eigen::StrictlyUpper>() = l.transpose();
  return l;
}

struct PsdReport {
  double min_eigenvalue = 0.0;
  double trace = 0.0;
  /// Diagonal shift to add before a Cholesky-type factorization (0 when none).
  double jitter = 0.0;
};

/// Checks that a symmetric matrix is PSD up to -1e-8 * trace / N.
///
/// Below that bound: NumericalPSDViolation. Numerically non-positive but
/// within it: jitter = 1e-8 * trace / N is recorded.
PsdReport certify_psd(const Eigen::Ref<const Eigen::MatrixXd>& l);

/// Per-view quality-diversity kernel, immutable after certification.
class QualityDiversityKernel {
 public:
  /// Wraps an arbitrary symmetric PSD matrix (tests, oracles, CLI dumps).
  static QualityDiversityKernel from_matrix(Eigen::MatrixXd matrix, View view = View::Ego);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  View view() const noexcept { return view_; }
  Index size() const noexcept { return matrix_.rows(); }
  double jitter_applied() const noexcept { return report_.jitter; }
  const PsdReport& psd_report() const noexcept { return report_; }

 private:
  QualityDiversityKernel(Eigen::MatrixXd matrix, View view, PsdReport report)
      : matrix_(std::move(matrix)), view_(view), report_(report) {}

  friend QualityDiversityKernel build_kernel(const Eigen::Ref<const Eigen::MatrixXd>&,
                                             const Eigen::Ref<const Eigen::VectorXd>&, View);

  Eigen::MatrixXd matrix_;
  View view_;
  PsdReport report_;
};

/// Kernel from row-wise unit embeddings and clamped (positive) scores.
QualityDiversityKernel build_kernel(const Eigen::Ref<const Eigen::MatrixXd>& embeddings,
                                    const Eigen::Ref<const Eigen::VectorXd>& scores, View view);

QualityDiversityKernel build_kernel(const FrameStream& stream, const RelevanceVector& clamped);

void dump_kernel(const std::filesystem::path& file, const QualityDiversityKernel& kernel);

}  // namespace dppselect

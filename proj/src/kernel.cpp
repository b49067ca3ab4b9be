#include "dppselect/kernel.hpp"

#include <string>

#include <Eigen/Eigenvalues>

#include "dppselect/manifest.hpp"

namespace dppselect {

PsdReport certify_psd(const Eigen::Ref<const Eigen::MatrixXd>& l) {
  if (l.rows() != l.cols() || l.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "kernel must be square and non-empty");
  const auto n = static_cast<double>(l.rows());
  PsdReport report;
  report.trace = l.trace();
  report.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(l, Eigen::EigenvaluesOnly).eigenvalues()(0);

  const double scale = std::max(report.trace, 0.0) / n;
  if (report.min_eigenvalue < -1e-8 * scale)
    throw Error(ErrorCode::NumericalPSDViolation,
                "min eigenvalue " + std::to_string(report.min_eigenvalue) + " below -1e-8 * trace / N");
  if (report.min_eigenvalue <= 1e-12 * scale) report.jitter = 1e-8 * scale;
  return report;
}

QualityDiversityKernel QualityDiversityKernel::from_matrix(Eigen::MatrixXd matrix, View view) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "kernel must be square and non-empty");
  if (!matrix.allFinite()) throw Error(ErrorCode::NonFiniteValue, "kernel has NaN/Inf entries");
  const double tol = 1e-9 * std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorCode::InvalidConfig, "kernel is not symmetric");
  const PsdReport report = certify_psd(matrix);
  return QualityDiversityKernel(std::move(matrix), view, report);
}

QualityDiversityKernel build_kernel(const Eigen::Ref<const Eigen::MatrixXd>& embeddings,
                                    const Eigen::Ref<const Eigen::VectorXd>& scores, View view) {
  if (embeddings.rows() != scores.size())
    throw Error(ErrorCode::DimensionMismatch, std::to_string(scores.size()) + " scores for " +
                                                  std::to_string(embeddings.rows()) + " frames");
  if (embeddings.rows() == 0) throw Error(ErrorCode::EmptyStream, "kernel of an empty stream");
  if (!(scores.array() > 0.0).all()) throw Error(ErrorCode::InvalidConfig, "kernel scores must be clamped positive");
  Eigen::MatrixXd l = quality_diversity_matrix(embeddings, scores);
  const PsdReport report = certify_psd(l);
  return QualityDiversityKernel(std::move(l), view, report);
}

QualityDiversityKernel build_kernel(const FrameStream& stream, const RelevanceVector& clamped) {
  return build_kernel(stream.embeddings(), clamped.scores, stream.view());
}

void dump_kernel(const std::filesystem::path& file, const QualityDiversityKernel& kernel) {
  write_f32_matrix(file, kernel.matrix());
}

}  // namespace dppselect

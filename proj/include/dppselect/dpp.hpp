#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dppselect/kernel.hpp"
#include "dppselect/rng.hpp"
#include "dppselect/types.hpp"

namespace dppselect {

/// Eigenvalues below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

enum class RankPolicy {
  /// Sample rank(L) items from the DPP, fill the rest by highest relevance.
  Fallback,
  /// Throw RankDeficient when rank(L) < k.
  Strict,
};

struct SubsetSample {
  std::vector<Index> indices;  // sorted ascending
  Index size = 0;
  double log_det = 0.0;        // log det(L_S), -inf for singular subsets
  SamplerKind mode = SamplerKind::ExactKDPP;
  bool fallback = false;       // relevance fill was used
  Index rank = 0;              // numerical rank of L
};

/// k-DPP sampler over one kernel, P(S) proportional to det(L_S) with |S| = k.
///
/// The eigendecomposition is done once on construction and shared by both
/// sampling routes:
///  - ExactKDPP: eigenvectors are picked with ESP-ratio probabilities, then the
///    projection DPP on them is sampled by elimination + re-orthonormalization
///    of the N x k eigenbasis.
///  - CholeskyApprox: same eigenvector selection; the projection DPP is sampled
///    by k rank-one downdates of the N x N marginal kernel V V^T, O(N^2) each.
///
/// The object is immutable; sample() may be called concurrently with distinct
/// generators.
class KdppSampler {
 public:
  explicit KdppSampler(const QualityDiversityKernel& kernel);
  explicit KdppSampler(const Eigen::Ref<const Eigen::MatrixXd>& l, double jitter = 0.0);

  Index size() const noexcept { return l_.rows(); }
  Index rank() const noexcept { return rank_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

  SubsetSample sample(Index k, Rng& rng, SamplerKind kind = SamplerKind::ExactKDPP,
                      RankPolicy policy = RankPolicy::Fallback) const;

 private:
  std::vector<Index> select_eigenvectors(Index k, Rng& rng) const;
  std::vector<Index> project_exact(const std::vector<Index>& eigen_ids, Rng& rng) const;
  std::vector<Index> project_cholesky(const std::vector<Index>& eigen_ids, Rng& rng) const;

  Eigen::MatrixXd l_;
  double jitter_;
  Eigen::VectorXd eigenvalues_;  // ascending, truncated to zero below tolerance
  Eigen::MatrixXd eigenvectors_;
  Index rank_ = 0;
};

SubsetSample sample_kdpp_exact(const QualityDiversityKernel& kernel, Index k, std::uint64_t seed,
                               RankPolicy policy = RankPolicy::Fallback);
SubsetSample sample_kdpp_cholesky(const QualityDiversityKernel& kernel, Index k, std::uint64_t seed,
                                  RankPolicy policy = RankPolicy::Fallback);

/// Deterministic greedy maximizer of log det(L_S). Each step adds the index
/// with the largest Schur-complement gain (ties to the lowest index), tracked
/// with incremental Cholesky rows. Once no positive gain remains, the budget
/// is filled by relevance like the samplers' fallback.
SubsetSample greedy_map(const QualityDiversityKernel& kernel, Index k);
SubsetSample greedy_map(const Eigen::Ref<const Eigen::MatrixXd>& l, Index k);

/// Appends the highest-diagonal unselected indices (ties to the lowest index)
/// until `chosen` holds k entries.
void fill_by_relevance(const Eigen::Ref<const Eigen::VectorXd>& diagonal, Index k, std::vector<Index>& chosen);

struct OracleEntry {
  std::vector<Index> indices;
  double determinant = 0.0;
  double probability = 0.0;
};

struct OracleTable {
  Index n = 0;
  Index k = 0;
  double normalizer = 0.0;  // sum of det(L_T) over |T| = k
  std::vector<OracleEntry> entries;  // lexicographic subset order
};

inline constexpr double kOracleMaxSubsets = 200000.0;

/// Exact k-DPP distribution by enumerating every size-k subset.
/// Throws TooLarge when C(N, k) > 200000, AllZeroDeterminants when every
/// subset determinant is zero, NumericalError on a clearly negative determinant.
OracleTable enumerate_oracle(const QualityDiversityKernel& kernel, Index k);
OracleTable enumerate_oracle(const Eigen::Ref<const Eigen::MatrixXd>& l, Index k);

double binomial(Index n, Index k) noexcept;

}  // namespace dppselect

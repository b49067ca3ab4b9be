#include "dppselect/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "dppselect/esp.hpp"
#include "dppselect/linalg.hpp"

namespace dppselect {
namespace {

void check_budget(Index k, Index n) {
  if (k < 1 || k > n)
    throw Error(ErrorCode::InvalidBudget, "subset size " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
}

// Modified Gram-Schmidt on the columns of v, in place.
void orthonormalize_columns(Eigen::MatrixXd& v) {
  for (Index c = 0; c < v.cols(); ++c) {
    for (Index p = 0; p < c; ++p) v.col(c) -= v.col(p).dot(v.col(c)) * v.col(p);
    const double norm = v.col(c).norm();
    if (norm > 0.0) v.col(c) /= norm;
  }
}

}  // namespace

double binomial(Index n, Index k) noexcept {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(out);
}

void fill_by_relevance(const Eigen::Ref<const Eigen::VectorXd>& diagonal, Index k, std::vector<Index>& chosen) {
  std::vector<bool> taken(static_cast<std::size_t>(diagonal.size()), false);
  for (Index i : chosen) taken[static_cast<std::size_t>(i)] = true;
  std::vector<Index> rest;
  for (Index i = 0; i < diagonal.size(); ++i)
    if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
  std::stable_sort(rest.begin(), rest.end(), [&](Index a, Index b) { return diagonal(a) > diagonal(b); });
  for (Index i : rest) {
    if (static_cast<Index>(chosen.size()) >= k) break;
    chosen.push_back(i);
  }
}

KdppSampler::KdppSampler(const QualityDiversityKernel& kernel) : KdppSampler(kernel.matrix(), kernel.jitter_applied()) {}

KdppSampler::KdppSampler(const Eigen::Ref<const Eigen::MatrixXd>& l, double jitter) : l_(l), jitter_(jitter) {
  if (l_.rows() != l_.cols() || l_.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "kernel must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l_);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalError, "eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  const double cutoff = kRankTolerance * std::max(eigenvalues_.maxCoeff(), 0.0);
  for (Index i = 0; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_(i) <= cutoff) {
      eigenvalues_(i) = 0.0;
    } else {
      ++rank_;
    }
  }
}

std::vector<Index> KdppSampler::select_eigenvectors(Index k, Rng& rng) const {
  const Index n = eigenvalues_.size();
  // ESP ratios are invariant to a common scale; normalizing keeps e_k in range.
  const double scale = eigenvalues_.maxCoeff();
  const EspTable<double> table = esp(eigenvalues_ / scale, k);
  std::vector<Index> picked;
  Index remaining = k;
  for (Index row = n; row >= 1 && remaining > 0; --row) {
    const double lambda = eigenvalues_(row - 1) / scale;
    const double denom = table(row, remaining);
    const double p = denom > 0.0 ? lambda * table(row - 1, remaining - 1) / denom : 0.0;
    if (rng.uniform() < p) {
      picked.push_back(row - 1);
      --remaining;
    }
  }
  if (remaining != 0) throw Error(ErrorCode::NumericalError, "eigenvector selection did not reach the target size");
  return picked;
}

std::vector<Index> KdppSampler::project_exact(const std::vector<Index>& eigen_ids, Rng& rng) const {
  const Index n = l_.rows();
  Eigen::MatrixXd v(n, static_cast<Index>(eigen_ids.size()));
  for (Index c = 0; c < v.cols(); ++c) v.col(c) = eigenvectors_.col(eigen_ids[static_cast<std::size_t>(c)]);

  std::vector<Index> out;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  while (v.cols() > 0) {
    Eigen::VectorXd weights = v.rowwise().squaredNorm();
    for (Index i = 0; i < n; ++i)
      if (taken[static_cast<std::size_t>(i)]) weights(i) = 0.0;
    const Index item = rng.categorical(weights);
    if (item < 0) throw Error(ErrorCode::NumericalError, "projection DPP ran out of mass");
    out.push_back(item);
    taken[static_cast<std::size_t>(item)] = true;
    if (v.cols() == 1) break;

    // Eliminate the chosen coordinate: subtract the pivot column from the
    // others so row `item` vanishes, drop the pivot, re-orthonormalize.
    Index pivot = 0;
    v.row(item).cwiseAbs().maxCoeff(&pivot);
    const Eigen::VectorXd pivot_col = v.col(pivot) / v(item, pivot);
    Eigen::MatrixXd next(n, v.cols() - 1);
    for (Index c = 0, d = 0; c < v.cols(); ++c) {
      if (c == pivot) continue;
      next.col(d++) = v.col(c) - v(item, c) * pivot_col;
    }
    orthonormalize_columns(next);
    v = std::move(next);
  }
  return out;
}

std::vector<Index> KdppSampler::project_cholesky(const std::vector<Index>& eigen_ids, Rng& rng) const {
  const Index n = l_.rows();
  Eigen::MatrixXd v(n, static_cast<Index>(eigen_ids.size()));
  for (Index c = 0; c < v.cols(); ++c) v.col(c) = eigenvectors_.col(eigen_ids[static_cast<std::size_t>(c)]);
  // Marginal kernel of the projection DPP.
  Eigen::MatrixXd marginal = v * v.transpose();

  std::vector<Index> out;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (std::size_t step = 0; step < eigen_ids.size(); ++step) {
    Eigen::VectorXd weights = marginal.diagonal().cwiseMax(0.0);
    for (Index i = 0; i < n; ++i)
      if (taken[static_cast<std::size_t>(i)]) weights(i) = 0.0;
    const Index item = rng.categorical(weights);
    if (item < 0) throw Error(ErrorCode::NumericalError, "marginal kernel ran out of mass");
    out.push_back(item);
    taken[static_cast<std::size_t>(item)] = true;
    // Condition on `item`: K <- K - K[:, i] K[i, :] / K_ii.
    const Eigen::VectorXd col = marginal.col(item) / std::sqrt(marginal(item, item));
    marginal.noalias() -= col * col.transpose();
  }
  return out;
}

SubsetSample KdppSampler::sample(Index k, Rng& rng, SamplerKind kind, RankPolicy policy) const {
  if (kind == SamplerKind::GreedyMAP) return greedy_map(l_, k);
  check_budget(k, l_.rows());
  if (rank_ < k && policy == RankPolicy::Strict)
    throw Error(ErrorCode::RankDeficient,
                "numerical rank " + std::to_string(rank_) + " < subset size " + std::to_string(k));

  SubsetSample out;
  out.mode = kind;
  out.rank = rank_;
  const Index drawn = std::min(k, rank_);
  if (drawn > 0) {
    const std::vector<Index> eigen_ids = select_eigenvectors(drawn, rng);
    out.indices = kind == SamplerKind::CholeskyApprox ? project_cholesky(eigen_ids, rng) : project_exact(eigen_ids, rng);
  }
  if (drawn < k) {
    out.fallback = true;
    fill_by_relevance(l_.diagonal(), k, out.indices);
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.size = static_cast<Index>(out.indices.size());
  out.log_det = subset_log_det(l_, std::span<const Index>(out.indices), jitter_);
  return out;
}

SubsetSample sample_kdpp_exact(const QualityDiversityKernel& kernel, Index k, std::uint64_t seed, RankPolicy policy) {
  Rng rng(seed);
  return KdppSampler(kernel).sample(k, rng, SamplerKind::ExactKDPP, policy);
}

SubsetSample sample_kdpp_cholesky(const QualityDiversityKernel& kernel, Index k, std::uint64_t seed,
                                  RankPolicy policy) {
  Rng rng(seed);
  return KdppSampler(kernel).sample(k, rng, SamplerKind::CholeskyApprox, policy);
}

SubsetSample greedy_map(const QualityDiversityKernel& kernel, Index k) { return greedy_map(kernel.matrix(), k); }

SubsetSample greedy_map(const Eigen::Ref<const Eigen::MatrixXd>& l, Index k) {
  const Index n = l.rows();
  check_budget(k, n);
  SubsetSample out;
  out.mode = SamplerKind::GreedyMAP;

  // Row t of `factor` holds the t-th Cholesky row of L restricted to the
  // chosen set, evaluated at every index; gains are residual variances.
  Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(k, n);
  Eigen::VectorXd gains = l.diagonal();
  const double floor = kRankTolerance * std::max(gains.maxCoeff(), 0.0);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  double log_det = 0.0;

  for (Index t = 0; t < k; ++t) {
    Index best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (!taken[static_cast<std::size_t>(i)] && gains(i) > best_gain) {
        best_gain = gains(i);
        best = i;
      }
    }
    if (!(best_gain > floor)) break;
    out.indices.push_back(best);
    taken[static_cast<std::size_t>(best)] = true;
    log_det += std::log(best_gain);

    const double root = std::sqrt(best_gain);
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const double e = (l(best, i) - factor.col(best).head(t).dot(factor.col(i).head(t))) / root;
      factor(t, i) = e;
      gains(i) -= e * e;
    }
    factor(t, best) = root;
  }

  Eigen::Index rank = 0;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, Eigen::EigenvaluesOnly);
    const double cutoff = kRankTolerance * std::max(solver.eigenvalues().maxCoeff(), 0.0);
    rank = (solver.eigenvalues().array() > cutoff).count();
  }
  out.rank = rank;
  if (static_cast<Index>(out.indices.size()) < k) {
    out.fallback = true;
    fill_by_relevance(l.diagonal(), k, out.indices);
    log_det = -std::numeric_limits<double>::infinity();
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.size = static_cast<Index>(out.indices.size());
  out.log_det = log_det;
  return out;
}

OracleTable enumerate_oracle(const QualityDiversityKernel& kernel, Index k) {
  return enumerate_oracle(kernel.matrix(), k);
}

OracleTable enumerate_oracle(const Eigen::Ref<const Eigen::MatrixXd>& l, Index k) {
  const Index n = l.rows();
  check_budget(k, n);
  if (binomial(n, k) > kOracleMaxSubsets)
    throw Error(ErrorCode::TooLarge, "C(" + std::to_string(n) + ", " + std::to_string(k) + ") exceeds 200000 subsets");

  OracleTable table;
  table.n = n;
  table.k = k;
  std::vector<Index> subset(static_cast<std::size_t>(k));
  std::iota(subset.begin(), subset.end(), Index{0});
  while (true) {
    double det = subset_determinant(l, std::span<const Index>(subset));
    double hadamard = 1.0;
    for (Index i : subset) hadamard *= std::max(l(i, i), 0.0);
    const double tol = 1e-10 * std::max(1.0, hadamard);
    if (det < -tol) throw Error(ErrorCode::NumericalError, "subset determinant " + std::to_string(det) + " is negative");
    // Determinants at roundoff level relative to the Hadamard bound are zero.
    if (det <= 1e-12 * hadamard) det = 0.0;
    table.entries.push_back(OracleEntry{subset, det, 0.0});
    table.normalizer += det;

    // Next combination in lexicographic order.
    Index pos = k - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < k; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (!(table.normalizer > 0.0))
    throw Error(ErrorCode::AllZeroDeterminants, "every size-" + std::to_string(k) + " subset has zero determinant");
  for (OracleEntry& e : table.entries) e.probability = e.determinant / table.normalizer;
  return table;
}

}  // namespace dppselect

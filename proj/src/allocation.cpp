#include "dppselect/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dppselect {

BudgetSplit cap_split(Index k_ego, Index k, Index n_ego, Index n_exo) {
  if (k > n_ego + n_exo)
    throw Error(ErrorCode::BudgetExceedsFrames,
                "budget " + std::to_string(k) + " exceeds " + std::to_string(n_ego + n_exo) + " frames");
  k_ego = std::clamp<Index>(k_ego, 0, k);
  if (k_ego > n_ego) k_ego = n_ego;
  if (k - k_ego > n_exo) k_ego = k - n_exo;
  return BudgetSplit{k_ego, k - k_ego, k};
}

BudgetSplit soft_allocate(const RelevanceVector& ego, const RelevanceVector& exo, Index k) {
  if (k < 1) throw Error(ErrorCode::InvalidBudget, "budget must be >= 1");
  const double sum_ego = ego.sum();
  const double sum_exo = exo.sum();
  if (!(sum_ego >= 0.0) || !(sum_exo >= 0.0) || !(sum_ego + sum_exo > 0.0))
    throw Error(ErrorCode::InvalidConfig, "soft allocation needs clamped, positive relevance scores");
  const double share = static_cast<double>(k) * (sum_ego / (sum_ego + sum_exo));
  // std::round rounds halves away from zero.
  return cap_split(static_cast<Index>(std::round(share)), k, ego.size(), exo.size());
}

std::vector<View> hard_select(const RelevanceVector& ego, const RelevanceVector& exo) {
  if (ego.size() != exo.size())
    throw Error(ErrorCode::UnsynchronizedStreams, "hard selection needs N_e == N_x, got " +
                                                      std::to_string(ego.size()) + " vs " + std::to_string(exo.size()));
  std::vector<View> mask(static_cast<std::size_t>(ego.size()));
  for (Index t = 0; t < ego.size(); ++t)
    mask[static_cast<std::size_t>(t)] = ego.scores(t) >= exo.scores(t) ? View::Ego : View::Exo;
  return mask;
}

}  // namespace dppselect

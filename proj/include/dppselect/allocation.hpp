#pragma once

#include <vector>

#include "dppselect/scoring.hpp"
#include "dppselect/types.hpp"

namespace dppselect {

/// Relevance-proportional budget split.
///
///   k_ego = round(k * sum(s_ego) / (sum(s_ego) + sum(s_exo))),  k_exo = k - k_ego
///
/// Halves round away from zero. If a view's share exceeds its frame count the
/// excess moves to the other view. Scores are expected to be clamped (> 0).
/// Throws BudgetExceedsFrames when k > N_e + N_x, InvalidBudget when k < 1.
BudgetSplit soft_allocate(const RelevanceVector& ego, const RelevanceVector& exo, Index k);

/// Applies the capacity cap to an arbitrary initial ego share.
BudgetSplit cap_split(Index k_ego, Index k, Index n_ego, Index n_exo);

/// Per-timestep winning view: Ego where s_e(t) >= s_x(t), else Exo.
/// Throws UnsynchronizedStreams unless both vectors have equal length.
std::vector<View> hard_select(const RelevanceVector& ego, const RelevanceVector& exo);

}  // namespace dppselect

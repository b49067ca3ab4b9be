#pragma once

#include <Eigen/Core>

#include "dppselect/types.hpp"

namespace dppselect {

inline constexpr double kDefaultScoreFloor = 1e-6;

/// Query relevance of every frame in one view (raw cosine in [-1, 1]).
struct RelevanceVector {
  View view = View::Ego;
  Eigen::VectorXd scores;

  Index size() const noexcept { return scores.size(); }
  double sum() const noexcept { return scores.sum(); }
};

/// Cosine similarity of each frame against the query, within this view only.
RelevanceVector score_view(const FrameStream& stream, const QueryEmbedding& query);

/// Elementwise max(score, floor). Throws InvalidConfig unless floor > 0.
RelevanceVector clamp_scores(const RelevanceVector& r, double floor = kDefaultScoreFloor);

}  // namespace dppselect

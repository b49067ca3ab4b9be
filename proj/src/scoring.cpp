#include "dppselect/scoring.hpp"

#include <cmath>
#include <string>

namespace dppselect {

RelevanceVector score_view(const FrameStream& stream, const QueryEmbedding& query) {
  if (stream.size() == 0) throw Error(ErrorCode::EmptyStream, "cannot score an empty stream");
  if (stream.dim() != query.embedding.dim())
    throw Error(ErrorCode::DimensionMismatch, "query dim " + std::to_string(query.embedding.dim()) +
                                                  " != frame dim " + std::to_string(stream.dim()));
  return RelevanceVector{stream.view(), stream.embeddings() * query.embedding.values()};
}

RelevanceVector clamp_scores(const RelevanceVector& r, double floor) {
  if (!(floor > 0.0) || !std::isfinite(floor)) throw Error(ErrorCode::InvalidConfig, "score floor must be > 0");
  return RelevanceVector{r.view, r.scores.cwiseMax(floor)};
}

}  // namespace dppselect

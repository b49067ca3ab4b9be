#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dppselect/dpp.hpp"
#include "dppselect/types.hpp"

namespace dppselect {

struct SelectConfig {
  Index budget = 32;
  SelectMode mode = SelectMode::SoftAllocation;
  SamplerKind sampler = SamplerKind::ExactKDPP;
  std::uint64_t seed = 0;
  double score_floor = 1e-6;

  /// Throws InvalidConfig / InvalidBudget on a bad configuration.
  void validate() const;
};

/// Merges per-view index sets into one list ordered by timestamp, Ego before
/// Exo on equal timestamps. Throws IndexOutOfRange for invalid indices.
Selection merge_by_timestamp(std::span<const Index> ego, std::span<const Index> exo, const StreamPair& pair);

/// Query-conditioned selection of cfg.budget frames from the pair.
///
/// SoftAllocation scores each view on its own, splits the budget by summed
/// clamped relevance, samples a k-DPP per view and merges by timestamp.
/// HardSelection keeps the more relevant view per timestep and samples one
/// k-DPP of the full budget over the winners. EgoOnly/ExoOnly sample a single
/// view. Uniform and TopKRelevance are non-DPP baselines.
Selection select(const StreamPair& pair, const QueryEmbedding& query, const SelectConfig& cfg);

/// Runs select() for every query, up to `threads` at a time. Output order
/// follows `queries` and does not depend on the thread count.
std::vector<Selection> select_all(const StreamPair& pair, std::span<const QueryEmbedding> queries,
                                  const SelectConfig& cfg, unsigned threads);

/// Worker count from DPPSELECT_THREADS, else the hardware concurrency.
unsigned thread_budget();

/// Evenly spaced indices floor(j * n / m), j = 0..m-1.
std::vector<Index> evenly_spaced(Index n, Index m);

}  // namespace dppselect

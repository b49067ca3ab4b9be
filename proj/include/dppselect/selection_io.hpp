#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "dppselect/dpp.hpp"
#include "dppselect/pipeline.hpp"
#include "dppselect/types.hpp"

namespace dppselect {

// selections.json:
//   {"budget", "mode", "sampler", "seed", "score_floor",
//    "queries": [{"query_id", "text", "split": {"ego", "exo"},
//                 "jitter": {"ego", "exo"}, "fallback": {"ego", "exo"},
//                 "frames": [{"view", "index", "timestamp", "score"}]}]}
nlohmann::json to_json(const Selection& sel, const QueryEmbedding& query);
nlohmann::json selections_document(std::span<const Selection> selections, std::span<const QueryEmbedding> queries,
                                   const SelectConfig& cfg);

/// One row per query: query_id, mode, sampler, k_ego, k_exo, frames, mean_score.
std::string summary_tsv(std::span<const Selection> selections, std::span<const QueryEmbedding> queries);

// {"n", "k", "normalizer", "subsets": [{"indices", "determinant", "probability"}]}
nlohmann::json to_json(const OracleTable& table);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace dppselect

#pragma once

#include <cstdint>
#include <string_view>

#include <json.hpp>

#include "dppselect/types.hpp"

namespace dppselect {

enum class SynthStructure {
  Random,            // independent random unit vectors
  Clustered,         // contiguous segments around `clusters` centers, intra-cluster cosine >= 0.95
  DuplicateRun,      // runs of `run_length` identical embeddings
  PlantedRelevant,   // one frame of `planted_view` equals the query; the other view is near-orthogonal to it
};

std::string_view to_string(SynthStructure s) noexcept;
SynthStructure parse_structure(std::string_view text);

struct SynthSpec {
  Index n_ego = 16;
  Index n_exo = 16;
  Index dim = 8;
  std::uint64_t seed = 0;
  SynthStructure structure = SynthStructure::Random;
  Index clusters = 3;
  Index run_length = 5;
  View planted_view = View::Ego;
  double fps = 1.0;

  /// Throws InvalidSpec.
  void validate() const;
};

/// Largest |cosine| between the query and any frame of the non-planted view
/// in PlantedRelevant fixtures.
inline constexpr double kPlantedOffViewCosine = 0.05;

struct SynthData {
  StreamPair pair;
  QueryEmbedding query;
  Index planted_index = -1;  // PlantedRelevant only
};

/// Deterministic in spec.seed.
SynthData generate(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SynthSpec& spec);

}  // namespace dppselect

#include "dppselect/selection_io.hpp"

#include <fstream>
#include <sstream>

namespace dppselect {

using nlohmann::json;

json to_json(const Selection& sel, const QueryEmbedding& query) {
  const Provenance& p = sel.provenance;
  json frames = json::array();
  for (const SelectionEntry& e : sel.entries) {
    frames.push_back({{"view", to_string(e.view)},
                      {"index", e.index},
                      {"timestamp", e.timestamp},
                      {"score", e.score ? json(*e.score) : json(nullptr)}});
  }
  return {{"query_id", query.id},
          {"text", query.text},
          {"mode", to_string(p.mode)},
          {"sampler", p.sampler ? json(to_string(*p.sampler)) : json(nullptr)},
          {"seed", p.seed},
          {"split", {{"ego", p.split.k_ego}, {"exo", p.split.k_exo}}},
          {"jitter", {{"ego", p.jitter_ego}, {"exo", p.jitter_exo}}},
          {"fallback", {{"ego", p.fallback_ego}, {"exo", p.fallback_exo}}},
          {"total", sel.total},
          {"frames", std::move(frames)}};
}

json selections_document(std::span<const Selection> selections, std::span<const QueryEmbedding> queries,
                         const SelectConfig& cfg) {
  json doc{{"budget", cfg.budget},
           {"mode", to_string(cfg.mode)},
           {"sampler", to_string(cfg.sampler)},
           {"seed", cfg.seed},
           {"score_floor", cfg.score_floor}};
  json arr = json::array();
  for (std::size_t i = 0; i < selections.size(); ++i) arr.push_back(to_json(selections[i], queries[i]));
  doc["queries"] = std::move(arr);
  return doc;
}

std::string summary_tsv(std::span<const Selection> selections, std::span<const QueryEmbedding> queries) {
  std::ostringstream out;
  out << "query_id\tmode\tsampler\tk_ego\tk_exo\tframes\tmean_score\n";
  for (std::size_t i = 0; i < selections.size(); ++i) {
    const Selection& s = selections[i];
    double sum = 0.0;
    for (const SelectionEntry& e : s.entries) sum += e.score.value_or(0.0);
    const double mean = s.entries.empty() ? 0.0 : sum / static_cast<double>(s.entries.size());
    out << queries[i].id << '\t' << to_string(s.provenance.mode) << '\t'
        << (s.provenance.sampler ? to_string(*s.provenance.sampler) : std::string_view("-")) << '\t'
        << s.provenance.split.k_ego << '\t' << s.provenance.split.k_exo << '\t' << s.total << '\t' << mean << '\n';
  }
  return out.str();
}

json to_json(const OracleTable& table) {
  json subsets = json::array();
  for (const OracleEntry& e : table.entries)
    subsets.push_back({{"indices", e.indices}, {"determinant", e.determinant}, {"probability", e.probability}});
  return {{"n", table.n}, {"k", table.k}, {"normalizer", table.normalizer}, {"subsets", std::move(subsets)}};
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + file.string());
}

}  // namespace dppselect

#include "dppselect/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "dppselect/kernel.hpp"
#include "dppselect/manifest.hpp"
#include "dppselect/pipeline.hpp"
#include "dppselect/scoring.hpp"
#include "dppselect/selection_io.hpp"
#include "dppselect/synth.hpp"

namespace dppselect {
namespace {

namespace fs = std::filesystem;

const QueryEmbedding& find_query(const Manifest& m, const std::string& id) {
  if (m.queries.empty()) throw Error(ErrorCode::MalformedManifest, "manifest has no queries");
  if (id.empty()) return m.queries.front();
  for (const QueryEmbedding& q : m.queries)
    if (q.id == id) return q;
  throw Error(ErrorCode::InvalidConfig, "no query with id '" + id + "'");
}

QualityDiversityKernel view_kernel(const Manifest& m, const QueryEmbedding& q, View view, double floor) {
  const FrameStream& stream = m.pair.stream(view);
  return build_kernel(stream, clamp_scores(score_view(stream, q), floor));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-conditioned k-DPP keyframe selection over paired ego/exo streams", "dppselect"};
  app.require_subcommand(1);

  std::string manifest_dir, out_path, query_id, mode = "soft", sampler = "exact", view = "ego", spec_path;
  long long budget = 32, k = 2;
  std::uint64_t seed = 0;
  double floor = kDefaultScoreFloor;

  auto* select_cmd = app.add_subcommand("select", "Select frames for every query in a manifest");
  select_cmd->add_option("--manifest", manifest_dir, "Manifest directory")->required();
  select_cmd->add_option("--budget", budget, "Total frame budget K")->capture_default_str();
  select_cmd->add_option("--mode", mode, "soft | hard | ego | exo | uniform | topk")->capture_default_str();
  select_cmd->add_option("--sampler", sampler, "exact | cholesky | greedy")->capture_default_str();
  select_cmd->add_option("--seed", seed, "Sampler seed")->capture_default_str();
  select_cmd->add_option("--score-floor", floor, "Relevance clamp floor")->capture_default_str();
  select_cmd->add_option("--out", out_path, "Output directory for selections.json and summary.tsv");

  auto* oracle_cmd = app.add_subcommand("oracle", "Enumerate the exact k-DPP distribution of one view");
  oracle_cmd->add_option("--manifest", manifest_dir, "Manifest directory")->required();
  oracle_cmd->add_option("--k", k, "Subset size")->required();
  oracle_cmd->add_option("--query-id", query_id, "Query id (default: first query)");
  oracle_cmd->add_option("--view", view, "ego | exo")->capture_default_str();
  oracle_cmd->add_option("--score-floor", floor, "Relevance clamp floor")->capture_default_str();
  oracle_cmd->add_option("--out", out_path, "Output JSON file (default: stdout)");

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic manifest");
  synth_cmd->add_option("--spec", spec_path, "Synth spec JSON")->required();
  synth_cmd->add_option("--out", out_path, "Output manifest directory")->required();

  auto* kernel_cmd = app.add_subcommand("kernel", "Dump one view's kernel as row-major float32");
  kernel_cmd->add_option("--manifest", manifest_dir, "Manifest directory")->required();
  kernel_cmd->add_option("--query-id", query_id, "Query id (default: first query)");
  kernel_cmd->add_option("--view", view, "ego | exo")->capture_default_str();
  kernel_cmd->add_option("--score-floor", floor, "Relevance clamp floor")->capture_default_str();
  kernel_cmd->add_option("--out", out_path, "Output .f32 file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*select_cmd) {
      SelectConfig cfg;
      cfg.budget = budget;
      cfg.mode = parse_mode(mode);
      cfg.sampler = parse_sampler(sampler);
      cfg.seed = seed;
      cfg.score_floor = floor;
      cfg.validate();
      const Manifest m = load_manifest(manifest_dir);
      if (m.queries.empty()) throw Error(ErrorCode::MalformedManifest, "manifest has no queries");
      const std::vector<Selection> selections = select_all(m.pair, m.queries, cfg, thread_budget());

      const fs::path dir = out_path.empty() ? fs::path(".") : fs::path(out_path);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
      write_text(dir / "selections.json", selections_document(selections, m.queries, cfg).dump(2) + "\n");
      const std::string summary = summary_tsv(selections, m.queries);
      write_text(dir / "summary.tsv", summary);
      out << summary;
    } else if (*oracle_cmd) {
      const Manifest m = load_manifest(manifest_dir);
      const QueryEmbedding& q = find_query(m, query_id);
      const View v = parse_view(view);
      const OracleTable table = enumerate_oracle(view_kernel(m, q, v, floor), k);
      nlohmann::json doc = to_json(table);
      doc["query_id"] = q.id;
      doc["view"] = to_string(v);
      const std::string text = doc.dump(2) + "\n";
      if (out_path.empty()) {
        out << text;
      } else {
        write_text(out_path, text);
      }
    } else if (*synth_cmd) {
      std::ifstream in(spec_path);
      if (!in) throw Error(ErrorCode::IoError, "cannot open " + spec_path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
      }
      const SynthSpec spec = synth_spec_from_json(doc);
      const SynthData data = generate(spec);
      write_manifest(out_path, data.pair, {data.query}, "synth:" + std::string(to_string(spec.structure)));
      out << "wrote " << data.pair.ego().size() << " ego + " << data.pair.exo().size() << " exo frames to "
          << out_path << "\n";
    } else if (*kernel_cmd) {
      const Manifest m = load_manifest(manifest_dir);
      const QueryEmbedding& q = find_query(m, query_id);
      const QualityDiversityKernel kernel = view_kernel(m, q, parse_view(view), floor);
      dump_kernel(out_path, kernel);
      out << "kernel " << kernel.size() << "x" << kernel.size() << " min_eig " << kernel.psd_report().min_eigenvalue
          << " jitter " << kernel.jitter_applied() << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dppselect

#include "dppselect/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "dppselect/allocation.hpp"
#include "dppselect/kernel.hpp"
#include "dppselect/scoring.hpp"

namespace dppselect {
namespace {

// Generator streams per sampling site; the recorded seed fixes all of them.
constexpr std::uint64_t kEgoStream = 1;
constexpr std::uint64_t kExoStream = 2;
constexpr std::uint64_t kHardStream = 3;

bool dual_view(SelectMode mode) {
  return mode == SelectMode::SoftAllocation || mode == SelectMode::HardSelection || mode == SelectMode::Uniform ||
         mode == SelectMode::TopKRelevance;
}

SubsetSample run_sampler(const QualityDiversityKernel& kernel, Index k, SamplerKind kind, std::uint64_t seed,
                         std::uint64_t stream) {
  if (kind == SamplerKind::GreedyMAP) return greedy_map(kernel, k);
  Rng rng(seed, stream);
  return KdppSampler(kernel).sample(k, rng, kind, RankPolicy::Fallback);
}

void attach_scores(Selection& sel, const RelevanceVector& ego, const RelevanceVector& exo) {
  for (SelectionEntry& e : sel.entries) e.score = (e.view == View::Ego ? ego : exo).scores(e.index);
}

void check_view_budget(Index k, const FrameStream& stream) {
  if (k > stream.size())
    throw Error(ErrorCode::BudgetExceedsFrames, "budget " + std::to_string(k) + " exceeds " +
                                                    std::to_string(stream.size()) + " " +
                                                    std::string(to_string(stream.view())) + " frames");
}

}  // namespace

void SelectConfig::validate() const {
  if (budget < 1) throw Error(ErrorCode::InvalidBudget, "budget must be >= 1");
  if (dual_view(mode) && budget < 2) throw Error(ErrorCode::InvalidBudget, "dual-view modes need a budget >= 2");
  if (!(score_floor > 0.0)) throw Error(ErrorCode::InvalidConfig, "score floor must be > 0");
}

std::vector<Index> evenly_spaced(Index n, Index m) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(std::max<Index>(m, 0)));
  for (Index j = 0; j < m; ++j) out.push_back(j * n / m);
  return out;
}

Selection merge_by_timestamp(std::span<const Index> ego, std::span<const Index> exo, const StreamPair& pair) {
  Selection sel;
  auto add = [&](std::span<const Index> ids, View view) {
    const FrameStream& s = pair.stream(view);
    for (Index i : ids) {
      if (i < 0 || i >= s.size())
        throw Error(ErrorCode::IndexOutOfRange, std::string(to_string(view)) + " index " + std::to_string(i) +
                                                    " outside [0, " + std::to_string(s.size()) + ")");
      sel.entries.push_back(SelectionEntry{view, i, s.timestamp(i), std::nullopt});
    }
  };
  add(ego, View::Ego);
  add(exo, View::Exo);
  std::sort(sel.entries.begin(), sel.entries.end(), [](const SelectionEntry& a, const SelectionEntry& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.view != b.view) return a.view == View::Ego;
    return a.index < b.index;
  });
  for (std::size_t i = 1; i < sel.entries.size(); ++i) {
    if (sel.entries[i].view == sel.entries[i - 1].view && sel.entries[i].index == sel.entries[i - 1].index)
      throw Error(ErrorCode::InvalidConfig, "duplicate frame in merge input");
  }
  sel.total = static_cast<Index>(sel.entries.size());
  return sel;
}

Selection select(const StreamPair& pair, const QueryEmbedding& query, const SelectConfig& cfg) {
  cfg.validate();
  const Index k = cfg.budget;
  const RelevanceVector raw_ego = score_view(pair.ego(), query);
  const RelevanceVector raw_exo = score_view(pair.exo(), query);
  const RelevanceVector ego = clamp_scores(raw_ego, cfg.score_floor);
  const RelevanceVector exo = clamp_scores(raw_exo, cfg.score_floor);

  Provenance prov;
  prov.mode = cfg.mode;
  prov.seed = cfg.seed;
  prov.score_floor = cfg.score_floor;

  std::vector<Index> ego_ids, exo_ids;

  switch (cfg.mode) {
    case SelectMode::SoftAllocation: {
      prov.sampler = cfg.sampler;
      prov.split = soft_allocate(ego, exo, k);
      if (prov.split.k_ego > 0) {
        const QualityDiversityKernel kernel = build_kernel(pair.ego(), ego);
        const SubsetSample s = run_sampler(kernel, prov.split.k_ego, cfg.sampler, cfg.seed, kEgoStream);
        ego_ids = s.indices;
        prov.jitter_ego = kernel.jitter_applied();
        prov.fallback_ego = s.fallback;
      }
      if (prov.split.k_exo > 0) {
        const QualityDiversityKernel kernel = build_kernel(pair.exo(), exo);
        const SubsetSample s = run_sampler(kernel, prov.split.k_exo, cfg.sampler, cfg.seed, kExoStream);
        exo_ids = s.indices;
        prov.jitter_exo = kernel.jitter_applied();
        prov.fallback_exo = s.fallback;
      }
      break;
    }
    case SelectMode::HardSelection: {
      prov.sampler = cfg.sampler;
      const std::vector<View> mask = hard_select(raw_ego, raw_exo);
      const Index n = static_cast<Index>(mask.size());
      if (k > n)
        throw Error(ErrorCode::BudgetExceedsFrames,
                    "budget " + std::to_string(k) + " exceeds " + std::to_string(n) + " timesteps");
      Eigen::MatrixXd winners(n, pair.dim());
      Eigen::VectorXd scores(n);
      for (Index t = 0; t < n; ++t) {
        const bool is_ego = mask[static_cast<std::size_t>(t)] == View::Ego;
        winners.row(t) = (is_ego ? pair.ego() : pair.exo()).embeddings().row(t);
        scores(t) = (is_ego ? ego : exo).scores(t);
      }
      const QualityDiversityKernel kernel = build_kernel(winners, scores, View::Ego);
      const SubsetSample s = run_sampler(kernel, k, cfg.sampler, cfg.seed, kHardStream);
      for (Index t : s.indices) (mask[static_cast<std::size_t>(t)] == View::Ego ? ego_ids : exo_ids).push_back(t);
      prov.split = BudgetSplit{static_cast<Index>(ego_ids.size()), static_cast<Index>(exo_ids.size()), k};
      prov.jitter_ego = prov.jitter_exo = kernel.jitter_applied();
      prov.fallback_ego = prov.fallback_exo = s.fallback;
      break;
    }
    case SelectMode::EgoOnly:
    case SelectMode::ExoOnly: {
      prov.sampler = cfg.sampler;
      const View view = cfg.mode == SelectMode::EgoOnly ? View::Ego : View::Exo;
      check_view_budget(k, pair.stream(view));
      const QualityDiversityKernel kernel = build_kernel(pair.stream(view), view == View::Ego ? ego : exo);
      const SubsetSample s =
          run_sampler(kernel, k, cfg.sampler, cfg.seed, view == View::Ego ? kEgoStream : kExoStream);
      if (view == View::Ego) {
        ego_ids = s.indices;
        prov.split = BudgetSplit{k, 0, k};
        prov.jitter_ego = kernel.jitter_applied();
        prov.fallback_ego = s.fallback;
      } else {
        exo_ids = s.indices;
        prov.split = BudgetSplit{0, k, k};
        prov.jitter_exo = kernel.jitter_applied();
        prov.fallback_exo = s.fallback;
      }
      break;
    }
    case SelectMode::Uniform: {
      prov.split = cap_split((k + 1) / 2, k, pair.ego().size(), pair.exo().size());
      ego_ids = evenly_spaced(pair.ego().size(), prov.split.k_ego);
      exo_ids = evenly_spaced(pair.exo().size(), prov.split.k_exo);
      break;
    }
    case SelectMode::TopKRelevance: {
      if (k > pair.ego().size() + pair.exo().size())
        throw Error(ErrorCode::BudgetExceedsFrames, "budget exceeds total frame count");
      struct Candidate {
        double score;
        View view;
        Index index;
      };
      std::vector<Candidate> all;
      for (Index i = 0; i < ego.size(); ++i) all.push_back({ego.scores(i), View::Ego, i});
      for (Index i = 0; i < exo.size(); ++i) all.push_back({exo.scores(i), View::Exo, i});
      std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
      for (Index i = 0; i < k; ++i) {
        const Candidate& c = all[static_cast<std::size_t>(i)];
        (c.view == View::Ego ? ego_ids : exo_ids).push_back(c.index);
      }
      std::sort(ego_ids.begin(), ego_ids.end());
      std::sort(exo_ids.begin(), exo_ids.end());
      prov.split = BudgetSplit{static_cast<Index>(ego_ids.size()), static_cast<Index>(exo_ids.size()), k};
      break;
    }
  }

  Selection sel = merge_by_timestamp(ego_ids, exo_ids, pair);
  attach_scores(sel, raw_ego, raw_exo);
  sel.provenance = prov;
  if (sel.total != k) throw Error(ErrorCode::NumericalError, "selection size does not match the budget");
  return sel;
}

unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DPPSELECT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

std::vector<Selection> select_all(const StreamPair& pair, std::span<const QueryEmbedding> queries,
                                  const SelectConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<Selection> out(queries.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(queries.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = select(pair, queries[i], cfg);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < queries.size(); i = next++) {
          try {
            out[i] = select(pair, queries[i], cfg);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace dppselect

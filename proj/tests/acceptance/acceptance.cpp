// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dppselect/allocation.hpp"
#include "dppselect/dpp.hpp"
#include "dppselect/esp.hpp"
#include "dppselect/kernel.hpp"
#include "dppselect/pipeline.hpp"
#include "dppselect/scoring.hpp"
#include "dppselect/selection_io.hpp"
#include "dppselect/synth.hpp"
#include "support/chi_square.hpp"
#include "support/oracles.hpp"

namespace {

using namespace dppselect;
namespace to = testing_oracles;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) detail << "first failure: " << what << "; ";
    pass = pass && cond;
  }
};

using Distribution = std::map<std::vector<Index>, double>;

Distribution oracle_distribution(const Eigen::MatrixXd& l, Index k) {
  Distribution out;
  for (const OracleEntry& e : enumerate_oracle(l, k).entries) out[e.indices] = e.probability;
  return out;
}

// Exact sampler within chi-square p > 0.001 and Cholesky sampler within TV
// 0.05 of the enumerated distribution, 20 kernels, 100000 draws each, < 5 min.
void sampler_distribution(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);
  const long draws = 100000;
  double min_p = 1.0, max_tv = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 4 + static_cast<Index>(rng.below(5));  // 4..8
    const Index k = 2 + static_cast<Index>(rng.below(2));  // 2..3
    const Eigen::MatrixXd l = to::random_psd_kernel(rng, n, k);
    const Distribution oracle = oracle_distribution(l, k);
    const KdppSampler sampler(l);

    std::map<std::vector<Index>, long> exact_counts, chol_counts;
    Rng exact_rng(1000 + trial), chol_rng(2000 + trial);
    for (long i = 0; i < draws; ++i) {
      ++exact_counts[sampler.sample(k, exact_rng, SamplerKind::ExactKDPP).indices];
      ++chol_counts[sampler.sample(k, chol_rng, SamplerKind::CholeskyApprox).indices];
    }
    const auto fit = to::chi_square(oracle, exact_counts, draws);
    Distribution chol;
    for (const auto& [s, c] : chol_counts) chol[s] = static_cast<double>(c) / draws;
    const double tv = to::total_variation(chol, oracle);
    min_p = std::min(min_p, fit.p_value);
    max_tv = std::max(max_tv, tv);
    o.require(fit.p_value > 0.001, "exact chi-square p=" + std::to_string(fit.p_value) + " trial " + std::to_string(trial));
    o.require(fit.impossible_hits == 0, "exact sampler hit a zero-probability subset");
    o.require(tv <= 0.05, "cholesky TV=" + std::to_string(tv) + " trial " + std::to_string(trial));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(seconds <= 300.0, "runtime " + std::to_string(seconds) + " s");
  o.detail << "min p=" << min_p << " max TV=" << max_tv << " runtime=" << seconds << "s";
}

// Symmetry, PSD and diagonal checks on 100 synth streams plus the 3-frame example.
void kernel_correctness(Outcome& o) {
  double worst_sym = 0.0, worst_diag = 0.0, worst_psd_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    SynthSpec spec;
    spec.seed = seed;
    spec.n_ego = 8 + static_cast<Index>(rng.below(120));
    spec.n_exo = 8 + static_cast<Index>(rng.below(120));
    spec.dim = 2 + static_cast<Index>(rng.below(64));
    spec.structure = static_cast<SynthStructure>(seed % 4);
    const SynthData d = generate(spec);
    for (View v : {View::Ego, View::Exo}) {
      const RelevanceVector s = clamp_scores(score_view(d.pair.stream(v), d.query));
      const QualityDiversityKernel k = build_kernel(d.pair.stream(v), s);
      const Eigen::MatrixXd& l = k.matrix();
      const double sym = (l - l.transpose()).cwiseAbs().maxCoeff();
      const double diag = (l.diagonal() - s.scores.cwiseAbs2()).cwiseAbs().maxCoeff();
      const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(l, Eigen::EigenvaluesOnly).eigenvalues()(0);
      const double bound = 1e-8 * l.trace() / static_cast<double>(l.rows());
      worst_sym = std::max(worst_sym, sym);
      worst_diag = std::max(worst_diag, diag);
      worst_psd_ratio = std::max(worst_psd_ratio, -min_eig / bound);
      o.require(sym <= 1e-9, "symmetry");
      o.require(diag <= 1e-9, "diagonal = s^2");
      o.require(min_eig >= -bound, "PSD");
    }
  }
  const double h = std::sqrt(0.5);
  Eigen::MatrixXd rows(3, 2);
  rows << 1, 0, 0, 1, h, h;
  const OracleTable t = enumerate_oracle(build_kernel(rows, Eigen::Vector3d::Ones(), View::Ego), 2);
  const double expected[3] = {0.5, 0.25, 0.25};
  for (int i = 0; i < 3; ++i)
    o.require(std::abs(t.entries[static_cast<std::size_t>(i)].probability - expected[i]) <= 1e-9, "3-frame oracle");
  o.detail << "max asym=" << worst_sym << " max diag err=" << worst_diag << " 3-frame=(" << t.entries[0].probability
           << ", " << t.entries[1].probability << ", " << t.entries[2].probability << ")";
}

void budget_allocation(Outcome& o) {
  Rng rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const Index n_e = 1 + static_cast<Index>(rng.below(200));
    const Index n_x = 1 + static_cast<Index>(rng.below(200));
    const Index k = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(std::min<Index>(n_e + n_x, 64))));
    Eigen::VectorXd se(n_e), sx(n_x);
    for (Index i = 0; i < n_e; ++i) se(i) = 2.0 * rng.uniform() - 1.0;
    for (Index i = 0; i < n_x; ++i) sx(i) = 2.0 * rng.uniform() - 1.0;
    const BudgetSplit s = soft_allocate(clamp_scores({View::Ego, se}), clamp_scores({View::Exo, sx}), k);
    o.require(s.k_ego + s.k_exo == k && s.k_ego <= n_e && s.k_exo <= n_x, "conservation");
  }
  for (Index k : {2, 8, 16, 32}) {
    const RelevanceVector e{View::Ego, Eigen::VectorXd::Constant(40, 0.3)};
    const RelevanceVector x{View::Exo, Eigen::VectorXd::Constant(40, 0.3)};
    o.require(soft_allocate(e, x, k) == BudgetSplit{k / 2, k / 2, k}, "symmetric split");
  }
  const BudgetSplit worked = soft_allocate({View::Ego, Eigen::VectorXd::Constant(6, 0.5)},
                                           {View::Exo, Eigen::VectorXd::Constant(4, 0.25)}, 8);
  o.require(worked == BudgetSplit{6, 2, 8}, "worked case (3, 1, 8)");
  const BudgetSplit capped = soft_allocate({View::Ego, Eigen::VectorXd::Constant(3, 1.0 / 3.0)},
                                           {View::Exo, Eigen::VectorXd::Constant(20, 0.05)}, 10);
  o.require(capped == BudgetSplit{3, 7, 10}, "capacity transfer");
  o.detail << "10000 conservation draws; worked=(" << worked.k_ego << ", " << worked.k_exo << ") capped=(" << capped.k_ego
           << ", " << capped.k_exo << ")";
}

void end_to_end_contracts(Outcome& o) {
  const std::vector<SelectMode> modes{SelectMode::SoftAllocation, SelectMode::HardSelection, SelectMode::EgoOnly,
                                      SelectMode::ExoOnly, SelectMode::Uniform, SelectMode::TopKRelevance};
  const std::vector<SamplerKind> samplers{SamplerKind::ExactKDPP, SamplerKind::CholeskyApprox, SamplerKind::GreedyMAP};
  int combos = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.n_ego = spec.n_exo = 48;
    spec.dim = 64;
    spec.structure = static_cast<SynthStructure>(seed % 4);
    const SynthData d = generate(spec);
    const std::vector<QueryEmbedding> queries{d.query};
    for (SelectMode mode : modes) {
      for (SamplerKind sampler : samplers) {
        SelectConfig cfg;
        cfg.mode = mode;
        cfg.sampler = sampler;
        cfg.seed = seed * 31 + 7;
        const auto a = select_all(d.pair, queries, cfg, 1);
        const auto b = select_all(d.pair, queries, cfg, 2);
        const Selection& sel = a.front();
        bool sorted = true, consistent = true;
        for (std::size_t i = 1; i < sel.entries.size(); ++i) sorted = sorted && sel.entries[i - 1].timestamp <= sel.entries[i].timestamp;
        if (mode == SelectMode::EgoOnly) consistent = sel.count(View::Exo) == 0;
        if (mode == SelectMode::ExoOnly) consistent = sel.count(View::Ego) == 0;
        const std::string tag = std::string(to_string(mode)) + "/" + std::string(to_string(sampler));
        o.require(static_cast<Index>(sel.entries.size()) == cfg.budget, tag + " size");
        o.require(sorted, tag + " sorted");
        o.require(consistent, tag + " view consistency");
        o.require(selections_document(a, queries, cfg).dump(2) == selections_document(b, queries, cfg).dump(2),
                  tag + " byte-identical");
        ++combos;
      }
    }
  }
  o.detail << combos << " mode x sampler x fixture runs at K=32";
}

void duplicate_exclusion(Outcome& o) {
  long checked = 0;
  int fixtures_used = 0;
  for (std::uint64_t seed = 0; fixtures_used < 10 && seed < 100; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.structure = SynthStructure::DuplicateRun;
    spec.n_ego = spec.n_exo = 30;
    spec.run_length = 5;  // 6 distinct embeddings per view
    spec.dim = 12;
    const SynthData d = generate(spec);
    for (View v : {View::Ego, View::Exo}) {
      const FrameStream& stream = d.pair.stream(v);
      const KdppSampler sampler(build_kernel(stream, clamp_scores(score_view(stream, d.query))));
      const Index k = std::min<Index>(4, sampler.rank());
      if (k < 2) continue;
      ++fixtures_used;
      Rng rng(seed + 17);
      for (int draw = 0; draw < 10000; ++draw) {
        const SubsetSample s = sampler.sample(k, rng, SamplerKind::ExactKDPP);
        bool distinct = !s.fallback;
        for (std::size_t i = 0; i < s.indices.size(); ++i)
          for (std::size_t j = i + 1; j < s.indices.size(); ++j)
            distinct = distinct && stream.embeddings().row(s.indices[i]) != stream.embeddings().row(s.indices[j]);
        o.require(distinct, "duplicate frames drawn");
        ++checked;
      }
    }
  }
  o.require(fixtures_used >= 10, "too few usable fixtures");
  o.detail << checked << " draws over " << fixtures_used << " view kernels";
}

void scaling_invariance(Outcome& o) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.n_ego = 8;
    spec.n_exo = 7;
    spec.dim = 6;
    spec.structure = seed % 2 ? SynthStructure::Clustered : SynthStructure::Random;
    spec.clusters = 3;
    const SynthData d = generate(spec);
    const RelevanceVector se = clamp_scores(score_view(d.pair.ego(), d.query));
    const RelevanceVector sx = clamp_scores(score_view(d.pair.exo(), d.query));
    const Index k = 3;
    OracleTable base;
    try {
      base = enumerate_oracle(build_kernel(d.pair.ego(), se), k);
    } catch (const Error&) {
      continue;  // rank < k after clamping
    }
    const BudgetSplit split = soft_allocate(se, sx, 8);
    for (double c : {0.5, 2.0, 10.0}) {
      const RelevanceVector e2{View::Ego, c * se.scores}, x2{View::Exo, c * sx.scores};
      const OracleTable scaled = enumerate_oracle(build_kernel(d.pair.ego(), e2), k);
      for (std::size_t i = 0; i < base.entries.size(); ++i)
        worst = std::max(worst, std::abs(base.entries[i].probability - scaled.entries[i].probability));
      o.require(soft_allocate(e2, x2, 8) == split, "budget split changed under scaling");
    }
  }
  o.require(worst <= 1e-9, "probability drift " + std::to_string(worst));
  o.detail << "max probability drift=" << worst;
}

// The spectral route loses ~eps * cond(L) relative accuracy on the smallest
// eigenvalue, so the identity is checked with the templated routines at long
// double; the double-precision error is reported alongside.
void esp_consistency(Outcome& o) {
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Rng rng(99);
  double worst = 0.0, worst_double = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(10));
    const Eigen::MatrixXd l = to::random_psd_kernel(rng, n, n);
    std::vector<Index> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

    const MatrixL ll = l.cast<long double>();
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> eig = Eigen::SelfAdjointEigenSolver<MatrixL>(ll, Eigen::EigenvaluesOnly).eigenvalues().cwiseMax(0.0L);
    const long double det = subset_determinant(ll, std::span<const Index>(all));
    const double rel = static_cast<double>(std::abs(esp(eig, n)(n, n) - det) / std::abs(det));
    worst = std::max(worst, rel);
    o.require(rel <= 1e-6, "e_N vs det relative error " + std::to_string(rel));

    const Eigen::VectorXd eig_d =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(l, Eigen::EigenvaluesOnly).eigenvalues().cwiseMax(0.0);
    const double det_d = subset_determinant(l, std::span<const Index>(all));
    worst_double = std::max(worst_double, std::abs(esp(eig_d, n)(n, n) - det_d) / std::abs(det_d));
  }
  o.detail << "200 kernels, N<=10, max relative error=" << worst << " (double precision: " << worst_double << ")";
}

void planted_routing(Outcome& o) {
  int routed = 0;
  const int fixtures = 1000;
  for (int f = 0; f < fixtures; ++f) {
    Rng rng(50000 + f);
    SynthSpec spec;
    spec.seed = static_cast<std::uint64_t>(f);
    spec.structure = SynthStructure::PlantedRelevant;
    spec.planted_view = View::Ego;
    spec.n_ego = 16 + static_cast<Index>(rng.below(100));
    spec.n_exo = 16 + static_cast<Index>(rng.below(100));
    spec.dim = 8 + static_cast<Index>(rng.below(120));
    const SynthData d = generate(spec);
    const BudgetSplit s = soft_allocate(clamp_scores(score_view(d.pair.ego(), d.query)),
                                        clamp_scores(score_view(d.pair.exo(), d.query)), 32);
    if (s.k_ego > s.k_exo) ++routed;
  }
  const double rate = routed / static_cast<double>(fixtures);
  o.require(rate >= 0.95, "routing rate " + std::to_string(rate));
  o.detail << "k_ego > k_exo in " << routed << "/" << fixtures << " fixtures";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"sampler distribution (exact chi-square, cholesky TV)", sampler_distribution},
      {"kernel correctness", kernel_correctness},
      {"budget allocation", budget_allocation},
      {"end-to-end contracts", end_to_end_contracts},
      {"duplicate exclusion", duplicate_exclusion},
      {"scaling invariance", scaling_invariance},
      {"ESP consistency", esp_consistency},
      {"planted-relevance routing", planted_routing},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

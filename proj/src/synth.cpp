#include "dppselect/synth.hpp"

#include <cmath>
#include <string>

#include "dppselect/rng.hpp"

namespace dppselect {
namespace {

Eigen::VectorXd random_unit(Rng& rng, Index dim) {
  Eigen::VectorXd v(dim);
  do {
    for (Index i = 0; i < dim; ++i) v(i) = rng.normal();
  } while (v.norm() < 1e-6);
  return v.normalized();
}

// Random unit vector orthogonal to `axis` (unit).
Eigen::VectorXd random_orthogonal(Rng& rng, const Eigen::VectorXd& axis) {
  Eigen::VectorXd v;
  do {
    v = random_unit(rng, axis.size());
    v -= v.dot(axis) * axis;
  } while (v.norm() < 1e-6);
  return v.normalized();
}

// Unit vector at angle `angle` from `axis`.
Eigen::VectorXd tilt(Rng& rng, const Eigen::VectorXd& axis, double angle) {
  return (std::cos(angle) * axis + std::sin(angle) * random_orthogonal(rng, axis)).normalized();
}

Eigen::MatrixXd view_embeddings(const SynthSpec& spec, Index n, Rng& rng, const Eigen::VectorXd& query,
                                bool off_view) {
  Eigen::MatrixXd e(n, spec.dim);
  if (off_view) {
    // Within kPlantedOffViewCosine of orthogonal to the query.
    const double max_tilt = std::asin(kPlantedOffViewCosine);
    for (Index i = 0; i < n; ++i) {
      const Eigen::VectorXd base = random_orthogonal(rng, query);
      const double t = (2.0 * rng.uniform() - 1.0) * max_tilt;
      e.row(i) = (std::cos(t) * base + std::sin(t) * query).normalized().transpose();
    }
    return e;
  }
  switch (spec.structure) {
    case SynthStructure::Random:
    case SynthStructure::PlantedRelevant:
      for (Index i = 0; i < n; ++i) e.row(i) = random_unit(rng, spec.dim).transpose();
      break;
    case SynthStructure::Clustered: {
      // Every member lies within 0.15 rad of its center, so two members are
      // within 0.30 rad of each other: cos(0.30) > 0.955.
      const Index c = std::min(spec.clusters, n);
      Eigen::MatrixXd centers(c, spec.dim);
      for (Index j = 0; j < c; ++j) centers.row(j) = random_unit(rng, spec.dim).transpose();
      for (Index i = 0; i < n; ++i) {
        const Index cluster = i * c / n;
        e.row(i) = tilt(rng, centers.row(cluster).transpose(), 0.15 * rng.uniform()).transpose();
      }
      break;
    }
    case SynthStructure::DuplicateRun: {
      Eigen::VectorXd current;
      for (Index i = 0; i < n; ++i) {
        if (i % spec.run_length == 0) current = random_unit(rng, spec.dim);
        e.row(i) = current.transpose();
      }
      break;
    }
  }
  return e;
}

}  // namespace

std::string_view to_string(SynthStructure s) noexcept {
  switch (s) {
    case SynthStructure::Random: return "random";
    case SynthStructure::Clustered: return "clustered";
    case SynthStructure::DuplicateRun: return "duplicate_run";
    case SynthStructure::PlantedRelevant: return "planted_relevant";
  }
  return "unknown";
}

SynthStructure parse_structure(std::string_view text) {
  for (auto s : {SynthStructure::Random, SynthStructure::Clustered, SynthStructure::DuplicateRun,
                 SynthStructure::PlantedRelevant}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown structure '" + std::string(text) + "'");
}

void SynthSpec::validate() const {
  if (n_ego < 1 || n_exo < 1) throw Error(ErrorCode::InvalidSpec, "frame counts must be positive");
  if (dim < 2) throw Error(ErrorCode::InvalidSpec, "dim must be >= 2");
  if (!(fps > 0.0)) throw Error(ErrorCode::InvalidSpec, "fps must be positive");
  if (structure == SynthStructure::Clustered && (clusters < 1 || clusters > std::min(n_ego, n_exo)))
    throw Error(ErrorCode::InvalidSpec, "cluster count must be in [1, min(n_ego, n_exo)]");
  if (structure == SynthStructure::DuplicateRun && run_length < 1)
    throw Error(ErrorCode::InvalidSpec, "run length must be positive");
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Eigen::VectorXd query = random_unit(rng, spec.dim);
  const bool planted = spec.structure == SynthStructure::PlantedRelevant;

  Eigen::MatrixXd ego = view_embeddings(spec, spec.n_ego, rng, query, planted && spec.planted_view == View::Exo);
  Eigen::MatrixXd exo = view_embeddings(spec, spec.n_exo, rng, query, planted && spec.planted_view == View::Ego);

  Index planted_index = -1;
  if (planted) {
    Eigen::MatrixXd& target = spec.planted_view == View::Ego ? ego : exo;
    planted_index = static_cast<Index>(rng.below(static_cast<std::uint64_t>(target.rows())));
    target.row(planted_index) = query.transpose();
  }

  FrameStream ego_stream = FrameStream::create(View::Ego, std::move(ego), {}, spec.fps);
  FrameStream exo_stream = FrameStream::create(View::Exo, std::move(exo), {}, spec.fps);
  return SynthData{StreamPair(std::move(ego_stream), std::move(exo_stream)),
                   QueryEmbedding{"q0", "synthetic query", normalize(query)}, planted_index};
}

SynthSpec synth_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidSpec, "synth spec must be a JSON object");
  SynthSpec spec;
  try {
    spec.n_ego = doc.value("n_ego", spec.n_ego);
    spec.n_exo = doc.value("n_exo", spec.n_exo);
    spec.dim = doc.value("dim", spec.dim);
    spec.seed = doc.value("seed", spec.seed);
    spec.structure = parse_structure(doc.value("structure", std::string(to_string(spec.structure))));
    spec.clusters = doc.value("clusters", spec.clusters);
    spec.run_length = doc.value("run_length", spec.run_length);
    spec.fps = doc.value("fps", spec.fps);
    if (doc.contains("planted_view")) {
      const std::string v = doc["planted_view"].get<std::string>();
      if (v == "ego") spec.planted_view = View::Ego;
      else if (v == "exo") spec.planted_view = View::Exo;
      else throw Error(ErrorCode::InvalidSpec, "planted_view must be ego or exo");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json to_json(const SynthSpec& spec) {
  return {{"n_ego", spec.n_ego},
          {"n_exo", spec.n_exo},
          {"dim", spec.dim},
          {"seed", spec.seed},
          {"structure", to_string(spec.structure)},
          {"clusters", spec.clusters},
          {"run_length", spec.run_length},
          {"planted_view", to_string(spec.planted_view)},
          {"fps", spec.fps}};
}

}  // namespace dppselect

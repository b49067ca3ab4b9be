#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dppselect/error.hpp"

namespace dppselect {

using Index = Eigen::Index;

enum class View : std::uint8_t { Ego = 0, Exo = 1 };

std::string_view to_string(View view) noexcept;
View parse_view(std::string_view text);

/// Unit-norm embedding of dimension >= 2 with finite entries.
class EmbeddingVector {
 public:
  /// Normalizes `values` to unit L2 norm. Throws ZeroVector for norms below
  /// 1e-12, NonFiniteValue for NaN/Inf entries and DimensionMismatch for dim < 2.
  static EmbeddingVector normalized(const Eigen::Ref<const Eigen::VectorXd>& values);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Index dim() const noexcept { return values_.size(); }

 private:
  explicit EmbeddingVector(Eigen::VectorXd values) : values_(std::move(values)) {}
  Eigen::VectorXd values_;
};

/// Returns v / ||v||.
EmbeddingVector normalize(const Eigen::Ref<const Eigen::VectorXd>& v);

struct FrameRecord {
  Index index = 0;
  double timestamp = 0.0;
  Eigen::VectorXd embedding;
};

/// One view's frames. Embeddings are stored row-wise (N x dim), each row unit-norm.
class FrameStream {
 public:
  /// Validates and row-normalizes. An empty `timestamps` synthesizes
  /// index / fps. Sets `renormalized` when any row was not already unit-norm.
  static FrameStream create(View view, Eigen::MatrixXd embeddings, std::vector<double> timestamps,
                            double fps = 1.0, bool* renormalized = nullptr);

  View view() const noexcept { return view_; }
  Index size() const noexcept { return embeddings_.rows(); }
  Index dim() const noexcept { return embeddings_.cols(); }
  double fps() const noexcept { return fps_; }

  const Eigen::MatrixXd& embeddings() const noexcept { return embeddings_; }
  const std::vector<double>& timestamps() const noexcept { return timestamps_; }
  double timestamp(Index i) const { return timestamps_.at(static_cast<std::size_t>(i)); }

  FrameRecord frame(Index i) const;

 private:
  FrameStream(View view, Eigen::MatrixXd embeddings, std::vector<double> timestamps, double fps)
      : view_(view), embeddings_(std::move(embeddings)), timestamps_(std::move(timestamps)), fps_(fps) {}

  View view_;
  Eigen::MatrixXd embeddings_;
  std::vector<double> timestamps_;
  double fps_;
};

struct QueryEmbedding {
  std::string id;
  std::string text;
  EmbeddingVector embedding;
};

class StreamPair {
 public:
  StreamPair(FrameStream ego, FrameStream exo);

  const FrameStream& ego() const noexcept { return ego_; }
  const FrameStream& exo() const noexcept { return exo_; }
  const FrameStream& stream(View view) const noexcept { return view == View::Ego ? ego_ : exo_; }

  Index dim() const noexcept { return ego_.dim(); }
  bool synchronized() const noexcept { return ego_.size() == exo_.size(); }

 private:
  FrameStream ego_;
  FrameStream exo_;
};

/// Split of the total budget between the views.
struct BudgetSplit {
  Index k_ego = 0;
  Index k_exo = 0;
  Index k_total = 0;

  friend bool operator==(const BudgetSplit&, const BudgetSplit&) = default;
};

enum class SelectMode { SoftAllocation, HardSelection, EgoOnly, ExoOnly, Uniform, TopKRelevance };
enum class SamplerKind { ExactKDPP, GreedyMAP, CholeskyApprox };

std::string_view to_string(SelectMode mode) noexcept;
std::string_view to_string(SamplerKind sampler) noexcept;
SelectMode parse_mode(std::string_view text);
SamplerKind parse_sampler(std::string_view text);

struct SelectionEntry {
  View view = View::Ego;
  Index index = 0;
  double timestamp = 0.0;
  std::optional<double> score;
};

// Audit trail attached to every selection.
struct Provenance {
  SelectMode mode = SelectMode::SoftAllocation;
  std::optional<SamplerKind> sampler;
  std::uint64_t seed = 0;
  BudgetSplit split;
  double jitter_ego = 0.0;
  double jitter_exo = 0.0;
  bool fallback_ego = false;
  bool fallback_exo = false;
  double score_floor = 0.0;
};

/// Merged, timestamp-ordered frame list.
struct Selection {
  std::vector<SelectionEntry> entries;
  Index total = 0;
  Provenance provenance;

  Index count(View view) const noexcept;
};

}  // namespace dppselect

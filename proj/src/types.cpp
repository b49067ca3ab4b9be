#include "dppselect/types.hpp"

#include <algorithm>
#include <cmath>

namespace dppselect {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BudgetExceedsFrames: return "BudgetExceedsFrames";
    case ErrorCode::UnsynchronizedStreams: return "UnsynchronizedStreams";
    case ErrorCode::NumericalPSDViolation: return "NumericalPSDViolation";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidBudget: return "InvalidBudget";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::AllZeroDeterminants: return "AllZeroDeterminants";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(View view) noexcept { return view == View::Ego ? "ego" : "exo"; }

View parse_view(std::string_view text) {
  if (text == "ego") return View::Ego;
  if (text == "exo") return View::Exo;
  throw Error(ErrorCode::InvalidConfig, "unknown view '" + std::string(text) + "'");
}

std::string_view to_string(SelectMode mode) noexcept {
  switch (mode) {
    case SelectMode::SoftAllocation: return "soft";
    case SelectMode::HardSelection: return "hard";
    case SelectMode::EgoOnly: return "ego";
    case SelectMode::ExoOnly: return "exo";
    case SelectMode::Uniform: return "uniform";
    case SelectMode::TopKRelevance: return "topk";
  }
  return "unknown";
}

std::string_view to_string(SamplerKind sampler) noexcept {
  switch (sampler) {
    case SamplerKind::ExactKDPP: return "exact";
    case SamplerKind::GreedyMAP: return "greedy";
    case SamplerKind::CholeskyApprox: return "cholesky";
  }
  return "unknown";
}

SelectMode parse_mode(std::string_view text) {
  for (auto mode : {SelectMode::SoftAllocation, SelectMode::HardSelection, SelectMode::EgoOnly,
                    SelectMode::ExoOnly, SelectMode::Uniform, SelectMode::TopKRelevance}) {
    if (to_string(mode) == text) return mode;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "'");
}

SamplerKind parse_sampler(std::string_view text) {
  for (auto sampler : {SamplerKind::ExactKDPP, SamplerKind::GreedyMAP, SamplerKind::CholeskyApprox}) {
    if (to_string(sampler) == text) return sampler;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown sampler '" + std::string(text) + "'");
}

EmbeddingVector EmbeddingVector::normalized(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() < 2)
    throw Error(ErrorCode::DimensionMismatch, "embedding dim must be >= 2, got " + std::to_string(values.size()));
  if (!values.allFinite()) throw Error(ErrorCode::NonFiniteValue, "embedding has NaN/Inf entries");
  const double norm = values.norm();
  if (norm < 1e-12) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero-norm embedding");
  return EmbeddingVector(values / norm);
}

EmbeddingVector normalize(const Eigen::Ref<const Eigen::VectorXd>& v) { return EmbeddingVector::normalized(v); }

FrameStream FrameStream::create(View view, Eigen::MatrixXd embeddings, std::vector<double> timestamps, double fps,
                                bool* renormalized) {
  const std::string tag(to_string(view));
  if (embeddings.rows() == 0) throw Error(ErrorCode::EmptyStream, tag + " stream has no frames");
  if (embeddings.cols() < 2) throw Error(ErrorCode::DimensionMismatch, tag + " embedding dim must be >= 2");
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(ErrorCode::InvalidConfig, tag + " fps must be positive");
  if (!embeddings.allFinite()) throw Error(ErrorCode::NonFiniteValue, tag + " embeddings contain NaN/Inf");

  const auto n = static_cast<std::size_t>(embeddings.rows());
  if (timestamps.empty()) {
    timestamps.resize(n);
    for (std::size_t i = 0; i < n; ++i) timestamps[i] = static_cast<double>(i) / fps;
  }
  if (timestamps.size() != n)
    throw Error(ErrorCode::MalformedManifest, tag + " timestamp count does not match frame count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(timestamps[i]) || timestamps[i] < 0.0)
      throw Error(ErrorCode::MalformedManifest, tag + " timestamps must be finite and non-negative");
    if (i > 0 && timestamps[i] < timestamps[i - 1])
      throw Error(ErrorCode::MalformedManifest, tag + " timestamps must be non-decreasing");
  }

  bool changed = false;
  for (Index i = 0; i < embeddings.rows(); ++i) {
    const double norm = embeddings.row(i).norm();
    if (norm < 1e-12)
      throw Error(ErrorCode::ZeroVector, tag + " frame " + std::to_string(i) + " has a zero embedding");
    if (std::abs(norm - 1.0) > 1e-6) changed = true;
    embeddings.row(i) /= norm;
  }
  if (renormalized) *renormalized = changed;
  return FrameStream(view, std::move(embeddings), std::move(timestamps), fps);
}

FrameRecord FrameStream::frame(Index i) const {
  if (i < 0 || i >= size()) throw Error(ErrorCode::IndexOutOfRange, "frame index " + std::to_string(i));
  return FrameRecord{i, timestamps_[static_cast<std::size_t>(i)], embeddings_.row(i).transpose()};
}

StreamPair::StreamPair(FrameStream ego, FrameStream exo) : ego_(std::move(ego)), exo_(std::move(exo)) {
  if (ego_.view() != View::Ego || exo_.view() != View::Exo)
    throw Error(ErrorCode::InvalidConfig, "stream pair expects (ego, exo) streams");
  if (ego_.dim() != exo_.dim())
    throw Error(ErrorCode::DimensionMismatch, "ego dim " + std::to_string(ego_.dim()) + " != exo dim " +
                                                  std::to_string(exo_.dim()));
}

Index Selection::count(View view) const noexcept {
  return static_cast<Index>(
      std::count_if(entries.begin(), entries.end(), [view](const SelectionEntry& e) { return e.view == view; }));
}

}  // namespace dppselect

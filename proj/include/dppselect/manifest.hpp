#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dppselect/types.hpp"

namespace dppselect {

// On-disk embedding exchange format:
//
//   dir/manifest.json   {dim, fps?, embedder?, ego: [{index, timestamp?}], exo: [...],
//                        queries: [{id, text}]}
//   dir/ego.f32         row-major (N_e x dim) little-endian float32
//   dir/exo.f32         row-major (N_x x dim)
//   dir/queries.f32     row-major (Q x dim)
struct Manifest {
  StreamPair pair;
  std::vector<QueryEmbedding> queries;
  double fps = 1.0;
  std::string embedder;
};

Manifest load_manifest(const std::filesystem::path& dir);

/// Writes a manifest that round-trips through load_manifest. Embeddings are
/// stored as float32, so values survive to ~1e-7.
void write_manifest(const std::filesystem::path& dir, const StreamPair& pair,
                    const std::vector<QueryEmbedding>& queries, const std::string& embedder = {});

/// Reads `rows * cols` little-endian float32 values. `cols` of -1 infers the
/// column count from the file size.
Eigen::MatrixXd read_f32_matrix(const std::filesystem::path& file, Index rows, Index cols);
void write_f32_matrix(const std::filesystem::path& file, const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace dppselect

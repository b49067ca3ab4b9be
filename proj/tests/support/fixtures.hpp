#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Core>

#include "dppselect/types.hpp"

namespace fixtures {

using dppselect::FrameStream;
using dppselect::QueryEmbedding;
using dppselect::StreamPair;
using dppselect::View;

inline FrameStream stream(View view, const Eigen::MatrixXd& rows, std::vector<double> ts = {}) {
  return FrameStream::create(view, rows, std::move(ts));
}

inline StreamPair pair(const Eigen::MatrixXd& ego, const Eigen::MatrixXd& exo, std::vector<double> ego_ts = {},
                       std::vector<double> exo_ts = {}) {
  return StreamPair(stream(View::Ego, ego, std::move(ego_ts)), stream(View::Exo, exo, std::move(exo_ts)));
}

inline QueryEmbedding query(const Eigen::VectorXd& v, std::string id = "q") {
  return QueryEmbedding{std::move(id), "test query", dppselect::normalize(v)};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("dppselect_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures

#include "dppselect/manifest.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace dppselect {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedManifest, what); }

std::uintmax_t file_size_or_throw(const fs::path& file) {
  std::error_code ec;
  const auto size = fs::file_size(file, ec);
  if (ec) malformed("cannot stat " + file.string() + ": " + ec.message());
  return size;
}

struct ViewEntries {
  std::vector<double> timestamps;
  bool has_timestamps = false;
  Index count = 0;
};

ViewEntries parse_entries(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) malformed(std::string("missing array '") + key + "'");
  const json& arr = doc[key];
  ViewEntries out;
  out.count = static_cast<Index>(arr.size());
  if (out.count == 0) throw Error(ErrorCode::EmptyStream, std::string(key) + " stream has no frames");

  std::size_t with_ts = 0;
  for (const json& e : arr)
    if (e.is_object() && e.contains("timestamp")) ++with_ts;
  if (with_ts != 0 && with_ts != arr.size()) malformed(std::string(key) + ": timestamps must be given for all frames or none");
  out.has_timestamps = with_ts == arr.size();

  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& e = arr[i];
    if (!e.is_object() || !e.contains("index") || !e["index"].is_number_integer())
      malformed(std::string(key) + "[" + std::to_string(i) + "] needs an integer 'index'");
    if (e["index"].get<std::int64_t>() != static_cast<std::int64_t>(i))
      malformed(std::string(key) + "[" + std::to_string(i) + "].index must equal its position");
    if (out.has_timestamps) {
      if (!e["timestamp"].is_number()) malformed(std::string(key) + " timestamp must be a number");
      out.timestamps.push_back(e["timestamp"].get<double>());
    }
  }
  return out;
}

Eigen::MatrixXd read_view_matrix(const fs::path& file, Index rows, Index dim, const std::string& what) {
  const auto bytes = file_size_or_throw(file);
  const auto expected = static_cast<std::uintmax_t>(rows) * static_cast<std::uintmax_t>(dim) * 4u;
  if (bytes != expected) {
    const auto row_bytes = static_cast<std::uintmax_t>(rows) * 4u;
    if (row_bytes > 0 && bytes % row_bytes == 0)
      throw Error(ErrorCode::DimensionMismatch, what + " has dim " + std::to_string(bytes / row_bytes) +
                                                    " but manifest dim is " + std::to_string(dim));
    malformed(file.string() + " has " + std::to_string(bytes) + " bytes, expected " + std::to_string(expected));
  }
  return read_f32_matrix(file, rows, dim);
}

}  // namespace

Eigen::MatrixXd read_f32_matrix(const fs::path& file, Index rows, Index cols) {
  const auto bytes = file_size_or_throw(file);
  if (cols < 0) {
    if (rows <= 0 || bytes % (static_cast<std::uintmax_t>(rows) * 4u) != 0)
      malformed(file.string() + ": size not divisible into " + std::to_string(rows) + " rows");
    cols = static_cast<Index>(bytes / (static_cast<std::uintmax_t>(rows) * 4u));
  }
  if (bytes != static_cast<std::uintmax_t>(rows) * static_cast<std::uintmax_t>(cols) * 4u)
    malformed(file.string() + ": unexpected size");

  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  std::vector<unsigned char> buf(static_cast<std::size_t>(bytes));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw Error(ErrorCode::IoError, "short read on " + file.string());

  Eigen::MatrixXd m(rows, cols);
  std::size_t off = 0;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c, off += 4) {
      const std::uint32_t word = std::uint32_t{buf[off]} | (std::uint32_t{buf[off + 1]} << 8) |
                                 (std::uint32_t{buf[off + 2]} << 16) | (std::uint32_t{buf[off + 3]} << 24);
      m(r, c) = static_cast<double>(std::bit_cast<float>(word));
    }
  }
  return m;
}

void write_f32_matrix(const fs::path& file, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::vector<unsigned char> buf;
  buf.reserve(static_cast<std::size_t>(m.size()) * 4u);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const auto word = std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c)));
      for (int b = 0; b < 4; ++b) buf.push_back(static_cast<unsigned char>((word >> (8 * b)) & 0xffu));
    }
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + file.string());
}

Manifest load_manifest(const fs::path& dir) {
  const fs::path json_path = dir / "manifest.json";
  std::ifstream in(json_path);
  if (!in) malformed("cannot open " + json_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    malformed(std::string("manifest.json: ") + e.what());
  }
  if (!doc.is_object()) malformed("manifest.json must be an object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) malformed("missing integer 'dim'");
  const auto dim = doc["dim"].get<Index>();
  if (dim < 2) malformed("dim must be >= 2");

  double fps = 1.0;
  if (doc.contains("fps")) {
    if (!doc["fps"].is_number() || !(doc["fps"].get<double>() > 0.0)) malformed("fps must be a positive number");
    fps = doc["fps"].get<double>();
  }
  std::string embedder;
  if (doc.contains("embedder") && doc["embedder"].is_string()) embedder = doc["embedder"].get<std::string>();

  const ViewEntries ego = parse_entries(doc, "ego");
  const ViewEntries exo = parse_entries(doc, "exo");

  bool ego_renorm = false, exo_renorm = false;
  FrameStream ego_stream = FrameStream::create(View::Ego, read_view_matrix(dir / "ego.f32", ego.count, dim, "ego.f32"),
                                               ego.timestamps, fps, &ego_renorm);
  FrameStream exo_stream = FrameStream::create(View::Exo, read_view_matrix(dir / "exo.f32", exo.count, dim, "exo.f32"),
                                               exo.timestamps, fps, &exo_renorm);

  std::vector<QueryEmbedding> queries;
  bool query_renorm = false;
  if (doc.contains("queries")) {
    if (!doc["queries"].is_array()) malformed("'queries' must be an array");
    const json& arr = doc["queries"];
    if (!arr.empty()) {
      const Eigen::MatrixXd q = read_view_matrix(dir / "queries.f32", static_cast<Index>(arr.size()), dim, "queries.f32");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& e = arr[i];
        if (!e.is_object() || !e.contains("id") || !e["id"].is_string()) malformed("query entries need a string 'id'");
        std::string text = e.contains("text") && e["text"].is_string() ? e["text"].get<std::string>() : std::string{};
        const Eigen::VectorXd row = q.row(static_cast<Index>(i)).transpose();
        if (std::abs(row.norm() - 1.0) > 1e-6) query_renorm = true;
        queries.push_back(QueryEmbedding{e["id"].get<std::string>(), std::move(text), normalize(row)});
      }
    }
  }

  if (ego_renorm || exo_renorm || query_renorm)
    std::clog << "warning: " << dir.string() << ": non-unit embeddings were L2-normalized\n";

  return Manifest{StreamPair(std::move(ego_stream), std::move(exo_stream)), std::move(queries), fps, std::move(embedder)};
}

void write_manifest(const fs::path& dir, const StreamPair& pair, const std::vector<QueryEmbedding>& queries,
                    const std::string& embedder) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  json doc;
  doc["dim"] = pair.dim();
  doc["fps"] = pair.ego().fps();
  if (!embedder.empty()) doc["embedder"] = embedder;
  for (View view : {View::Ego, View::Exo}) {
    const FrameStream& s = pair.stream(view);
    json arr = json::array();
    for (Index i = 0; i < s.size(); ++i) arr.push_back({{"index", i}, {"timestamp", s.timestamp(i)}});
    doc[std::string(to_string(view))] = std::move(arr);
  }
  json qarr = json::array();
  Eigen::MatrixXd q(static_cast<Index>(queries.size()), pair.dim());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].embedding.dim() != pair.dim())
      throw Error(ErrorCode::DimensionMismatch, "query '" + queries[i].id + "' dim differs from stream dim");
    qarr.push_back({{"id", queries[i].id}, {"text", queries[i].text}});
    q.row(static_cast<Index>(i)) = queries[i].embedding.values().transpose();
  }
  doc["queries"] = std::move(qarr);

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest.json in " + dir.string());
  out << doc.dump(2) << '\n';

  write_f32_matrix(dir / "ego.f32", pair.ego().embeddings());
  write_f32_matrix(dir / "exo.f32", pair.exo().embeddings());
  write_f32_matrix(dir / "queries.f32", q);
}

}  // namespace dppselect

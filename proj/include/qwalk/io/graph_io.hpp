#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwalk/backend/types.hpp"
#include "qwalk/error.hpp"
#include "qwalk/graphs.hpp"

namespace qwalk::io {

/// Reads a Matrix Market coordinate file (pattern, real or integer field;
/// general or symmetric). Entries are 1-based. The result is validated by
/// graph_from_adjacency.
inline Graph read_matrix_market(std::istream& in) {
  auto fail = [](const std::string& msg) -> Graph { throw Error(ErrorCode::InvalidArgument, "Matrix Market: " + msg); };

  std::string line;
  if (!std::getline(in, line)) return fail("empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate") {
    return fail("expected '%%MatrixMarket matrix coordinate' header");
  }
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer") return fail("unsupported field '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") return fail("unsupported symmetry '" + symmetry + "'");

  do {
    if (!std::getline(in, line)) return fail("missing size line");
  } while (line.empty() || line[0] == '%');
  std::size_t rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries)) return fail("malformed size line");
  }
  if (rows == 0 || cols == 0) return fail("matrix dimensions must be positive");

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries : entries);
  std::size_t read = 0;
  while (read < entries && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    std::size_t i = 0, j = 0;
    double value = 1.0;
    if (!(entry >> i >> j)) return fail("malformed entry line '" + line + "'");
    if (!pattern && !(entry >> value)) return fail("missing value in entry line '" + line + "'");
    if (i == 0 || j == 0 || i > rows || j > cols) return fail("entry index out of range in '" + line + "'");
    triplets.push_back({i - 1, j - 1, value});
    if (symmetric && i != j) triplets.push_back({j - 1, i - 1, value});
    ++read;
  }
  if (read != entries) return fail("expected " + std::to_string(entries) + " entries, found " + std::to_string(read));
  return graph_from_adjacency(csr_from_triplets(rows, cols, std::move(triplets)));
}

/// Reads {"n": int, "edges": [[v, w], ...]}. Each undirected edge is listed
/// once; listing it twice makes a weight-2 entry and is rejected.
inline Graph read_edge_list(const nlohmann::json& doc) {
  auto fail = [](const std::string& msg) -> Graph { throw Error(ErrorCode::InvalidArgument, "edge list: " + msg); };
  if (!doc.is_object()) return fail("expected an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "n" && key != "edges") return fail("unknown key '" + key + "'");
  }
  if (!doc.contains("n") || !doc["n"].is_number_unsigned() || doc["n"].get<std::size_t>() == 0) {
    return fail("'n' must be a positive integer");
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) return fail("'edges' must be an array");
  const auto n = doc["n"].get<std::size_t>();
  std::vector<Triplet> triplets;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
      return fail("each edge must be a pair of non-negative integers");
    }
    const auto v = e[0].get<std::size_t>();
    const auto w = e[1].get<std::size_t>();
    if (v >= n || w >= n) return fail("edge (" + std::to_string(v) + "," + std::to_string(w) + ") out of range");
    triplets.push_back({v, w, 1.0});
    if (v != w) triplets.push_back({w, v, 1.0});
  }
  return graph_from_adjacency(csr_from_triplets(n, n, std::move(triplets)));
}

/// `format` is "mtx" or "json"; empty means infer from the extension.
inline Graph load_graph_file(const std::filesystem::path& path, std::string format = {}) {
  if (format.empty()) format = path.extension() == ".json" ? "json" : "mtx";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open graph file " + path.string());
  if (format == "mtx") return read_matrix_market(in);
  if (format == "json") {
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "edge list " + path.string() + ": " + e.what());
    }
    return read_edge_list(doc);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown graph file format '" + format + "'");
}

}  // namespace qwalk::io

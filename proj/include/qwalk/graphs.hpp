#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qwalk/backend/types.hpp"
#include "qwalk/error.hpp"

namespace qwalk {

using Vertex = std::size_t;

namespace family {
struct Generic {};
struct Cycle {};
struct Line {};
struct Grid {
  std::size_t nx;
  std::size_t ny;
  bool periodic;
};
struct Hypercube {
  std::size_t dim;
};
}  // namespace family

using GraphKind = std::variant<family::Generic, family::Cycle, family::Line, family::Grid, family::Hypercube>;

/// Simple undirected graph. The adjacency pattern is symmetric with zero
/// diagonal and every stored value is exactly 1.
class Graph {
 public:
  std::size_t vertex_count() const noexcept { return adjacency_.rows(); }
  std::size_t edge_count() const noexcept { return adjacency_.nnz() / 2; }
  const CsrMatrix& adjacency() const noexcept { return adjacency_; }
  const GraphKind& kind() const noexcept { return kind_; }

  std::span<const std::size_t> neighbors(Vertex v) const {
    require_vertex(v);
    return adjacency_.row_cols(v);
  }

  std::size_t degree(Vertex v) const { return neighbors(v).size(); }

  bool has_edge(Vertex v, Vertex w) const {
    if (v >= vertex_count() || w >= vertex_count()) return false;
    auto nb = adjacency_.row_cols(v);
    return std::binary_search(nb.begin(), nb.end(), w);
  }

  void require_vertex(Vertex v) const {
    if (v >= vertex_count()) {
      throw Error(ErrorCode::VertexOutOfRange,
                  "vertex " + std::to_string(v) + " not in 0.." + std::to_string(vertex_count() - 1));
    }
  }

 private:
  friend Graph graph_from_adjacency(const CsrMatrix& a);
  friend Graph make_family_graph(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges, GraphKind kind);

  Graph(CsrMatrix adjacency, GraphKind kind) : adjacency_(std::move(adjacency)), kind_(kind) {}

  CsrMatrix adjacency_;
  GraphKind kind_;
};

/// Validates an adjacency matrix and wraps it as a Generic graph. Explicitly
/// stored zeros are dropped; any other value than 1 is rejected.
inline Graph graph_from_adjacency(const CsrMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::NonSquare,
                "adjacency is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  const std::size_t n = a.rows();
  std::vector<Triplet> kept;
  kept.reserve(a.nnz());
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (vals[k] == ComplexScalar{}) continue;
      if (cols[k] == i) throw Error(ErrorCode::SelfLoopPresent, "self-loop at vertex " + std::to_string(i));
      if (vals[k] != ComplexScalar{1.0}) {
        throw Error(ErrorCode::WeightedEdge,
                    "entry (" + std::to_string(i) + "," + std::to_string(cols[k]) + ") is not 1");
      }
      kept.push_back({i, cols[k], 1.0});
    }
  }
  CsrMatrix pattern = csr_from_triplets(n, n, std::move(kept));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : pattern.row_cols(i)) {
      auto back = pattern.row_cols(j);
      if (!std::binary_search(back.begin(), back.end(), i)) {
        throw Error(ErrorCode::NotSymmetric, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                 ") has no mirror (" + std::to_string(j) + "," +
                                                 std::to_string(i) + ")");
      }
    }
  }
  return Graph(std::move(pattern), family::Generic{});
}

/// Builds a graph from an undirected edge list; duplicate edges collapse.
inline Graph make_family_graph(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges, GraphKind kind) {
  std::vector<Triplet> triplets;
  triplets.reserve(2 * edges.size());
  for (auto [v, w] : edges) {
    triplets.push_back({v, w, 1.0});
    triplets.push_back({w, v, 1.0});
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return std::pair(a.row, a.col) < std::pair(b.row, b.col); });
  triplets.erase(std::unique(triplets.begin(), triplets.end(),
                             [](const Triplet& a, const Triplet& b) { return a.row == b.row && a.col == b.col; }),
                 triplets.end());
  for (const auto& t : triplets) {
    if (t.row == t.col) throw Error(ErrorCode::SelfLoopPresent, "self-loop at vertex " + std::to_string(t.row));
  }
  return Graph(csr_from_triplets(n, n, std::move(triplets)), kind);
}

inline Graph graph_from_edges(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  if (n == 0) throw Error(ErrorCode::SizeTooSmall, "graph needs at least one vertex");
  for (auto [v, w] : edges) {
    if (v >= n || w >= n) {
      throw Error(ErrorCode::VertexOutOfRange, "edge (" + std::to_string(v) + "," + std::to_string(w) + ")");
    }
  }
  return make_family_graph(n, edges, family::Generic{});
}

inline Graph cycle(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::SizeTooSmall, "cycle needs n >= 3");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
  return make_family_graph(n, edges, family::Cycle{});
}

inline Graph line(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::SizeTooSmall, "line needs n >= 2");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return make_family_graph(n, edges, family::Line{});
}

/// Vertex (x, y) has id x + nx*y. With `periodic`, axis neighbors wrap.
inline Graph grid(std::size_t nx, std::size_t ny, bool periodic = true) {
  if (nx < 2 || ny < 2) throw Error(ErrorCode::SizeTooSmall, "grid needs nx, ny >= 2");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      const Vertex v = x + nx * y;
      if (x + 1 < nx) edges.emplace_back(v, (x + 1) + nx * y);
      else if (periodic) edges.emplace_back(v, nx * y);
      if (y + 1 < ny) edges.emplace_back(v, x + nx * (y + 1));
      else if (periodic) edges.emplace_back(v, x);
    }
  }
  return make_family_graph(nx * ny, edges, family::Grid{nx, ny, periodic});
}

/// Vertex ids are bit strings; neighbors differ in exactly one bit.
inline Graph hypercube(std::size_t dim) {
  if (dim < 1) throw Error(ErrorCode::SizeTooSmall, "hypercube needs dim >= 1");
  if (dim >= 8 * sizeof(std::size_t) - 1) throw Error(ErrorCode::InvalidArgument, "hypercube dimension too large");
  const std::size_t n = std::size_t{1} << dim;
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 0; v < n; ++v) {
    for (std::size_t b = 0; b < dim; ++b) {
      const Vertex w = v ^ (std::size_t{1} << b);
      if (v < w) edges.emplace_back(v, w);
    }
  }
  return make_family_graph(n, edges, family::Hypercube{dim});
}

inline std::vector<Vertex> neighbors(const Graph& g, Vertex v) {
  auto nb = g.neighbors(v);
  return {nb.begin(), nb.end()};
}

inline std::size_t degree(const Graph& g, Vertex v) { return g.degree(v); }

// ============================================================================
// Arc basis
// ============================================================================

struct Arc {
  Vertex tail;
  Vertex head;
  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Canonical enumeration of the 2|E| arcs: tail ascending, then head
/// ascending. This is exactly the CSR order of the adjacency matrix, so
/// the arcs leaving v occupy the index span [row_offsets[v], row_offsets[v+1]).
class ArcBasis {
 public:
  explicit ArcBasis(Graph graph) : graph_(std::make_shared<const Graph>(std::move(graph))) {
    const auto& a = graph_->adjacency();
    arcs_.reserve(a.nnz());
    for (Vertex v = 0; v < a.rows(); ++v) {
      for (auto w : a.row_cols(v)) arcs_.push_back({v, w});
    }
  }

  const Graph& graph() const noexcept { return *graph_; }
  std::size_t size() const noexcept { return arcs_.size(); }
  std::span<const Arc> arcs() const noexcept { return arcs_; }

  /// First arc index with the given tail.
  std::size_t span_begin(Vertex v) const { return graph_->adjacency().row_offsets()[v]; }
  std::size_t span_end(Vertex v) const { return graph_->adjacency().row_offsets()[v + 1]; }

  std::size_t index_of(Vertex tail, Vertex head) const {
    if (tail >= graph_->vertex_count() || head >= graph_->vertex_count()) {
      throw Error(ErrorCode::NotAnArc, arc_name(tail, head));
    }
    auto nb = graph_->adjacency().row_cols(tail);
    auto it = std::lower_bound(nb.begin(), nb.end(), head);
    if (it == nb.end() || *it != head) throw Error(ErrorCode::NotAnArc, arc_name(tail, head));
    return span_begin(tail) + static_cast<std::size_t>(it - nb.begin());
  }

  Arc at(std::size_t index) const {
    if (index >= arcs_.size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "arc index " + std::to_string(index) + " >= " + std::to_string(arcs_.size()));
    }
    return arcs_[index];
  }

 private:
  static std::string arc_name(Vertex v, Vertex w) {
    return "(" + std::to_string(v) + "," + std::to_string(w) + ") is not an arc";
  }

  std::shared_ptr<const Graph> graph_;
  std::vector<Arc> arcs_;
};

inline ArcBasis arc_basis(const Graph& g) { return ArcBasis(g); }
inline std::size_t arc_index(const ArcBasis& b, Vertex v, Vertex w) { return b.index_of(v, w); }
inline Arc arc_at(const ArcBasis& b, std::size_t idx) { return b.at(idx); }

inline std::string family_name(const GraphKind& kind) {
  struct Namer {
    std::string operator()(const family::Generic&) const { return "generic"; }
    std::string operator()(const family::Cycle&) const { return "cycle"; }
    std::string operator()(const family::Line&) const { return "line"; }
    std::string operator()(const family::Grid&) const { return "grid"; }
    std::string operator()(const family::Hypercube&) const { return "hypercube"; }
  };
  return std::visit(Namer{}, kind);
}

}  // namespace qwalk

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "qwalk/backend/engine.hpp"
#include "qwalk/backend/types.hpp"
#include "qwalk/error.hpp"
#include "qwalk/graphs.hpp"
#include "qwalk/walk_state.hpp"

namespace qwalk::coined {

enum class ShiftKind { FlipFlop, Persistent };
enum class CoinKind { Grover };
enum class MarkedPolicy { None, MinusIdentity };

inline ShiftKind shift_from_name(std::string_view name) {
  if (name == "flipflop") return ShiftKind::FlipFlop;
  if (name == "persistent") return ShiftKind::Persistent;
  throw Error(ErrorCode::InvalidArgument, "unknown shift '" + std::string(name) + "'");
}

inline CoinKind coin_from_name(std::string_view name) {
  if (name == "grover") return CoinKind::Grover;
  throw Error(ErrorCode::InvalidArgument, "unknown coin '" + std::string(name) + "'");
}

inline MarkedPolicy policy_from_name(std::string_view name) {
  if (name == "none") return MarkedPolicy::None;
  if (name == "minus_identity") return MarkedPolicy::MinusIdentity;
  throw Error(ErrorCode::InvalidArgument, "unknown marked policy '" + std::string(name) + "'");
}

struct CoinedSpec {
  Graph graph;
  ShiftKind shift = ShiftKind::FlipFlop;
  CoinKind coin = CoinKind::Grover;
  std::vector<Vertex> marked;
  MarkedPolicy marked_policy = MarkedPolicy::MinusIdentity;
};

namespace detail {

inline CsrMatrix permutation_matrix(const std::vector<std::size_t>& target_of) {
  // Column j holds a single 1 in row target_of[j].
  const std::size_t n = target_of.size();
  std::vector<Triplet> triplets;
  triplets.reserve(n);
  for (std::size_t j = 0; j < n; ++j) triplets.push_back({target_of[j], j, 1.0});
  return csr_from_triplets(n, n, std::move(triplets));
}

inline void require_nonempty(const ArcBasis& basis) {
  if (basis.size() == 0) throw Error(ErrorCode::InvalidArgument, "graph has no edges; the arc basis is empty");
}

}  // namespace detail

/// S|v,w> = |w,v>.
inline CsrMatrix flip_flop_shift(const ArcBasis& basis) {
  detail::require_nonempty(basis);
  std::vector<std::size_t> target(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const Arc a = basis.at(j);
    target[j] = basis.index_of(a.head, a.tail);
  }
  return detail::permutation_matrix(target);
}

/// Direction-preserving shift: the walker steps to the head of its arc and
/// keeps travelling in the same lattice direction. Where that direction
/// leaves a non-periodic lattice the walker turns around, i.e. (v,w) maps to
/// (w,v).
inline CsrMatrix persistent_shift(const ArcBasis& basis) {
  detail::require_nonempty(basis);
  const Graph& g = basis.graph();
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> target(basis.size());

  auto unsupported = [](const std::string& why) {
    throw Error(ErrorCode::UnsupportedGraphForPersistentShift, why);
  };

  std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, family::Cycle>) {
          for (std::size_t j = 0; j < basis.size(); ++j) {
            const Arc a = basis.at(j);
            const bool forward = a.head == (a.tail + 1) % n;
            const Vertex next = forward ? (a.head + 1) % n : (a.head + n - 1) % n;
            target[j] = basis.index_of(a.head, next);
          }
        } else if constexpr (std::is_same_v<K, family::Line>) {
          for (std::size_t j = 0; j < basis.size(); ++j) {
            const Arc a = basis.at(j);
            const bool forward = a.head > a.tail;
            const bool blocked = forward ? a.head + 1 >= n : a.head == 0;
            const Vertex next = blocked ? a.tail : (forward ? a.head + 1 : a.head - 1);
            target[j] = basis.index_of(a.head, next);
          }
        } else if constexpr (std::is_same_v<K, family::Grid>) {
          const auto nx = static_cast<long>(kind.nx);
          const auto ny = static_cast<long>(kind.ny);
          if (kind.periodic && (nx < 3 || ny < 3)) {
            unsupported("periodic grid needs both sides >= 3 for distinct lattice directions");
          }
          auto wrap = [](long c, long m) { return ((c % m) + m) % m; };
          for (std::size_t j = 0; j < basis.size(); ++j) {
            const Arc a = basis.at(j);
            const long tx = static_cast<long>(a.tail) % nx, ty = static_cast<long>(a.tail) / nx;
            const long hx = static_cast<long>(a.head) % nx, hy = static_cast<long>(a.head) / nx;
            long dx = 0, dy = 0;
            if (!kind.periodic) {
              dx = hx - tx;
              dy = hy - ty;
            } else if (ty == hy) {
              dx = (wrap(tx + 1, nx) == hx) ? 1 : -1;
            } else {
              dy = (wrap(ty + 1, ny) == hy) ? 1 : -1;
            }
            long x = hx + dx, y = hy + dy;
            Vertex next = a.tail;
            if (kind.periodic) {
              next = static_cast<Vertex>(wrap(x, nx) + nx * wrap(y, ny));
            } else if (x >= 0 && x < nx && y >= 0 && y < ny) {
              next = static_cast<Vertex>(x + nx * y);
            }
            target[j] = basis.index_of(a.head, next);
          }
        } else {
          unsupported("persistent shift is defined only for cycle, line and grid graphs, not " + family_name(kind));
        }
      },
      g.kind());
  return detail::permutation_matrix(target);
}

/// Block-diagonal Grover coin; the block of vertex v is (2/d(v)) J - I over
/// the arcs leaving v.
inline CsrMatrix grover_coin(const ArcBasis& basis) {
  detail::require_nonempty(basis);
  const Graph& g = basis.graph();
  std::vector<Triplet> triplets;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const std::size_t begin = basis.span_begin(v);
    const std::size_t end = basis.span_end(v);
    const double d = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = begin; j < end; ++j) {
        const double value = 2.0 / d - (i == j ? 1.0 : 0.0);
        if (value != 0.0) triplets.push_back({i, j, value});
      }
    }
  }
  return csr_from_triplets(basis.size(), basis.size(), std::move(triplets));
}

/// With MinusIdentity, every coin block of a marked vertex becomes -I.
inline CsrMatrix apply_marked_policy(const CsrMatrix& coin, const ArcBasis& basis, std::span<const Vertex> marked,
                                     MarkedPolicy policy) {
  const std::size_t n = basis.graph().vertex_count();
  std::vector<char> is_marked(n, 0);
  for (auto v : marked) {
    if (v >= n) throw Error(ErrorCode::MarkedVertexOutOfRange, "marked vertex " + std::to_string(v));
    is_marked[v] = 1;
  }
  if (policy == MarkedPolicy::None || marked.empty()) return coin;

  std::vector<Triplet> triplets;
  triplets.reserve(coin.nnz());
  for (Vertex v = 0; v < n; ++v) {
    for (std::size_t i = basis.span_begin(v); i < basis.span_end(v); ++i) {
      if (is_marked[v]) {
        triplets.push_back({i, i, -1.0});
        continue;
      }
      auto cols = coin.row_cols(i);
      auto vals = coin.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) triplets.push_back({i, cols[k], vals[k]});
    }
  }
  return csr_from_triplets(coin.rows(), coin.cols(), std::move(triplets));
}

inline void validate(const CoinedSpec& spec) {
  for (auto v : spec.marked) {
    if (v >= spec.graph.vertex_count()) {
      throw Error(ErrorCode::MarkedVertexOutOfRange, "marked vertex " + std::to_string(v));
    }
  }
  if (!spec.marked.empty() && spec.marked_policy == MarkedPolicy::None) {
    throw Error(ErrorCode::InvalidArgument, "marked vertices require the minus_identity marked policy");
  }
}

inline CsrMatrix shift_operator(const ArcBasis& basis, ShiftKind kind) {
  return kind == ShiftKind::FlipFlop ? flip_flop_shift(basis) : persistent_shift(basis);
}

inline CsrMatrix coin_operator(const ArcBasis& basis, const CoinedSpec& spec) {
  // Grover is the only coin kind.
  return apply_marked_policy(grover_coin(basis), basis, spec.marked, spec.marked_policy);
}

/// U = S C, coin first.
inline CsrMatrix evolution_operator(const Engine& engine, const CoinedSpec& spec) {
  validate(spec);
  const ArcBasis basis(spec.graph);
  return engine.matmul(engine.move_to_device(shift_operator(basis, spec.shift)),
                       engine.move_to_device(coin_operator(basis, spec)));
}

/// Vertex marginals p_v = sum over arcs leaving v of |amplitude|^2.
inline std::vector<std::vector<double>> probability_distribution(const ArcBasis& basis,
                                                                 std::span<const WalkState> states) {
  std::vector<std::vector<double>> out;
  out.reserve(states.size());
  const std::size_t n = basis.graph().vertex_count();
  for (const auto& s : states) {
    if (s.basis() != Basis::Arc) throw Error(ErrorCode::BasisMismatch, "vertex-basis state passed to arc routine");
    if (s.dim() != basis.size()) {
      throw Error(ErrorCode::DimensionMismatch, "state dimension " + std::to_string(s.dim()) + " vs " +
                                                    std::to_string(basis.size()) + " arcs");
    }
    std::vector<double> p(n, 0.0);
    for (Vertex v = 0; v < n; ++v) {
      for (std::size_t i = basis.span_begin(v); i < basis.span_end(v); ++i) p[v] += std::norm(s[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Coined walk instance holding its arc basis and sparse U.
class CoinedWalk {
 public:
  CoinedWalk(const Engine& engine, CoinedSpec spec)
      : spec_(std::move(spec)), basis_(spec_.graph), evolution_(evolution_operator(engine, spec_)) {}

  const CoinedSpec& spec() const noexcept { return spec_; }
  const ArcBasis& arc_basis() const noexcept { return basis_; }
  const CsrMatrix& get_evolution_operator() const noexcept { return evolution_; }
  std::size_t dim() const noexcept { return basis_.size(); }

  WalkState ket(Vertex tail, Vertex head) const {
    const std::size_t idx = basis_.index_of(tail, head);
    ComplexVector amps(dim());
    amps.set(idx, 1.0);
    return WalkState(Basis::Arc, std::move(amps));
  }

  /// States U^k psi0 for each k in the range, by repeated sparse matvec.
  std::vector<WalkState> simulate(const Engine& engine, const SimRange& range, const WalkState& psi0) const {
    if (psi0.basis() != Basis::Arc) throw Error(ErrorCode::BasisMismatch, "coined walk needs an arc-basis state");
    if (psi0.dim() != dim()) {
      throw Error(ErrorCode::DimensionMismatch, "initial state dimension " + std::to_string(psi0.dim()) +
                                                    " vs " + std::to_string(dim()) + " arcs");
    }
    qwalk::detail::require_normalized(psi0);

    const DeviceMatrix u = engine.move_to_device(evolution_);
    DeviceVector current = engine.move_to_device(psi0.amplitudes());
    std::size_t at_step = 0;
    std::vector<WalkState> states;
    for (auto k : range.indices()) {
      for (; at_step < k; ++at_step) current = engine.move_to_device(engine.matvec_mul(current, u));
      states.emplace_back(Basis::Arc, current.value());
    }
    return states;
  }

  std::vector<std::vector<double>> probability_distribution(std::span<const WalkState> states) const {
    return coined::probability_distribution(basis_, states);
  }

 private:
  CoinedSpec spec_;
  ArcBasis basis_;
  CsrMatrix evolution_;
};

}  // namespace qwalk::coined

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qwalk/backend/engine.hpp"
#include "qwalk/backend/types.hpp"
#include "qwalk/error.hpp"
#include "qwalk/graphs.hpp"
#include "qwalk/walk_state.hpp"

namespace qwalk::ctqw {

inline constexpr double kDefaultTolerance = 1e-12;
inline constexpr std::size_t kMaxSeriesTerms = 1000;

struct CtqwSpec {
  Graph graph;
  double gamma = 1.0;    // hopping rate
  double delta_t = 1.0;  // time between consecutive snapshot indices
  std::vector<Vertex> marked;
};

inline void validate(const CtqwSpec& spec) {
  if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must be a positive finite number");
  }
  if (!(spec.delta_t > 0.0) || !std::isfinite(spec.delta_t)) {
    throw Error(ErrorCode::InvalidArgument, "delta_t must be a positive finite number");
  }
  for (auto v : spec.marked) {
    if (v >= spec.graph.vertex_count()) {
      throw Error(ErrorCode::MarkedVertexOutOfRange, "marked vertex " + std::to_string(v));
    }
  }
}

/// H = -gamma * A - sum over marked v of |v><v|.
inline CsrMatrix build_hamiltonian(const CtqwSpec& spec) {
  const auto& a = spec.graph.adjacency();
  const std::size_t n = a.rows();
  std::vector<Triplet> triplets;
  triplets.reserve(a.nnz() + spec.marked.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : a.row_cols(i)) triplets.push_back({i, j, -spec.gamma});
  }
  std::vector<Vertex> marked = spec.marked;
  std::sort(marked.begin(), marked.end());
  marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
  for (auto v : marked) {
    if (v >= n) throw Error(ErrorCode::MarkedVertexOutOfRange, "marked vertex " + std::to_string(v));
    triplets.push_back({v, v, -1.0});
  }
  return csr_from_triplets(n, n, std::move(triplets));
}

/// Maximum absolute row sum.
inline double infinity_norm(const CsrMatrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (auto z : m.row_values(i)) row += std::abs(z);
    best = std::max(best, row);
  }
  return best;
}

/// Computes exp(-i H t) psi without forming the exponential.
///
/// The interval is split into s = ceil(||H||_inf |t|) sub-steps so that each
/// sub-step's Taylor series has ||H dt|| <= 1. Each series is truncated once
/// the latest term's norm drops below tol * ||psi_substep||.
inline WalkState evolve_state(const Engine& engine, const DeviceMatrix& h, double h_norm, const WalkState& psi,
                              double t, double tol = kDefaultTolerance, std::size_t max_terms = kMaxSeriesTerms) {
  if (psi.basis() != Basis::Vertex) throw Error(ErrorCode::BasisMismatch, "evolve_state needs a vertex-basis state");
  if (h.rows() != psi.dim() || h.cols() != psi.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "Hamiltonian dimension " + std::to_string(h.rows()) +
                                                  " vs state dimension " + std::to_string(psi.dim()));
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "time must be finite");
  if (t == 0.0) return psi;
  if (!std::isfinite(h_norm * std::abs(t))) {
    throw Error(ErrorCode::NonFinite, "||H|| * |t| overflows; reduce gamma or the time step");
  }

  const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(h_norm * std::abs(t))));
  const double dt = t / static_cast<double>(substeps);

  DeviceVector current = engine.move_to_device(psi.amplitudes());
  for (std::size_t s = 0; s < substeps; ++s) {
    const double scale = engine.vector_norm(current);
    DeviceVector term = current;
    DeviceVector sum = current;
    for (std::size_t k = 1;; ++k) {
      if (scale == 0.0) break;
      const ComplexScalar factor{0.0, -dt / static_cast<double>(k)};
      term = engine.move_to_device(engine.vector_scale(factor, engine.move_to_device(engine.matvec_mul(term, h))));
      sum = engine.move_to_device(engine.vector_axpy(1.0, term, sum));
      if (engine.vector_norm(term) <= tol * scale) break;
      if (k >= max_terms) {
        throw Error(ErrorCode::SeriesNotConverged,
                    "Taylor series did not reach tolerance within " + std::to_string(max_terms) + " terms");
      }
    }
    current = sum;
  }
  return WalkState(Basis::Vertex, current.value());
}

inline WalkState evolve_state(const Engine& engine, const CsrMatrix& h, const WalkState& psi, double t,
                              double tol = kDefaultTolerance, std::size_t max_terms = kMaxSeriesTerms) {
  const double h_norm = infinity_norm(h);
  return evolve_state(engine, engine.move_to_device(h), h_norm, psi, t, tol, max_terms);
}

/// Squared moduli of each vertex-basis state.
inline std::vector<std::vector<double>> probability_distribution(std::span<const WalkState> states) {
  std::vector<std::vector<double>> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    if (s.basis() != Basis::Vertex) {
      throw Error(ErrorCode::BasisMismatch, "arc-basis state passed to vertex probability routine");
    }
    std::vector<double> p(s.dim());
    for (std::size_t v = 0; v < p.size(); ++v) p[v] = std::norm(s[v]);
    out.push_back(std::move(p));
  }
  return out;
}

/// Continuous-time walk instance: spec plus its Hamiltonian.
class ContinuousTimeWalk {
 public:
  explicit ContinuousTimeWalk(CtqwSpec spec) : spec_(std::move(spec)), hamiltonian_(build(spec_)) {
    h_norm_ = infinity_norm(hamiltonian_);
  }

  const CtqwSpec& spec() const noexcept { return spec_; }
  const CsrMatrix& get_hamiltonian() const noexcept { return hamiltonian_; }
  std::size_t dim() const noexcept { return spec_.graph.vertex_count(); }

  WalkState ket(Vertex v) const {
    spec_.graph.require_vertex(v);
    ComplexVector amps(dim());
    amps.set(v, 1.0);
    return WalkState(Basis::Vertex, std::move(amps));
  }

  /// Snapshot time for index k.
  double time_of(std::size_t k) const noexcept { return static_cast<double>(k) * spec_.delta_t; }

  /// States at t = k * delta_t for each k in the range. The first snapshot is
  /// evolved from psi0; every later one is evolved by step * delta_t from the
  /// previous snapshot.
  std::vector<WalkState> simulate(const Engine& engine, const SimRange& range, const WalkState& psi0,
                                  double tol = kDefaultTolerance) const {
    if (psi0.basis() != Basis::Vertex) throw Error(ErrorCode::BasisMismatch, "CTQW needs a vertex-basis state");
    if (psi0.dim() != dim()) {
      throw Error(ErrorCode::DimensionMismatch, "initial state dimension " + std::to_string(psi0.dim()) +
                                                    " vs " + std::to_string(dim()) + " vertices");
    }
    detail::require_normalized(psi0);

    const DeviceMatrix h = engine.move_to_device(hamiltonian_);
    std::vector<WalkState> states;
    const auto ks = range.indices();
    states.reserve(ks.size());
    if (ks.empty()) return states;

    WalkState current = evolve_state(engine, h, h_norm_, psi0, time_of(ks.front()), tol);
    states.push_back(current);
    const double step_time = time_of(range.step());
    for (std::size_t i = 1; i < ks.size(); ++i) {
      current = evolve_state(engine, h, h_norm_, current, step_time, tol);
      states.push_back(current);
    }
    return states;
  }

  std::vector<std::vector<double>> probability_distribution(std::span<const WalkState> states) const {
    return ctqw::probability_distribution(states);
  }

 private:
  static CsrMatrix build(const CtqwSpec& spec) {
    validate(spec);
    return build_hamiltonian(spec);
  }

  CtqwSpec spec_;
  CsrMatrix hamiltonian_;
  double h_norm_ = 0.0;
};

}  // namespace qwalk::ctqw

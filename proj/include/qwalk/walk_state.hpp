#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qwalk/backend/types.hpp"
#include "qwalk/error.hpp"

namespace qwalk {

enum class Basis { Vertex, Arc };

/// Amplitudes tagged with the basis they are expressed in. Supports the
/// ket arithmetic used to assemble initial states; such sums may be
/// unnormalized until handed to a simulation.
class WalkState {
 public:
  WalkState(Basis basis, ComplexVector amplitudes) : basis_(basis), amplitudes_(std::move(amplitudes)) {}

  Basis basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return amplitudes_.dim(); }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  ComplexScalar operator[](std::size_t i) const noexcept { return amplitudes_[i]; }

  double norm() const {
    double sum = 0.0;
    for (auto z : amplitudes_.entries()) sum += std::norm(z);
    return std::sqrt(sum);
  }

  friend WalkState operator+(const WalkState& a, const WalkState& b) {
    check_compatible(a, b);
    std::vector<ComplexScalar> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return WalkState(a.basis_, ComplexVector(std::move(out)));
  }

  friend WalkState operator-(const WalkState& a, const WalkState& b) { return a + (-1.0) * b; }

  friend WalkState operator*(ComplexScalar s, const WalkState& a) {
    std::vector<ComplexScalar> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i];
    return WalkState(a.basis_, ComplexVector(std::move(out)));
  }

  friend bool operator==(const WalkState&, const WalkState&) = default;

 private:
  static void check_compatible(const WalkState& a, const WalkState& b) {
    if (a.basis_ != b.basis_) throw Error(ErrorCode::BasisMismatch, "cannot add vertex- and arc-basis states");
    if (a.dim() != b.dim()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "state dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
  }

  Basis basis_;
  ComplexVector amplitudes_;
};

/// Snapshot selector: k = start, start+step, ... strictly below stop.
class SimRange {
 public:
  /// Shorthand for (0, count, 1).
  explicit SimRange(std::size_t count) : SimRange(0, count, 1) {}

  SimRange(std::size_t start, std::size_t stop, std::size_t step) : start_(start), stop_(stop), step_(step) {
    if (step == 0) throw Error(ErrorCode::InvalidArgument, "range step must be >= 1");
    if (start > stop) throw Error(ErrorCode::InvalidArgument, "range start must not exceed stop");
  }

  std::size_t start() const noexcept { return start_; }
  std::size_t stop() const noexcept { return stop_; }
  std::size_t step() const noexcept { return step_; }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = start_; k < stop_; k += step_) out.push_back(k);
    return out;
  }

 private:
  std::size_t start_;
  std::size_t stop_;
  std::size_t step_;
};

namespace detail {

inline constexpr double kInitialNormTolerance = 1e-8;

inline void require_normalized(const WalkState& psi) {
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > kInitialNormTolerance) {
    throw Error(ErrorCode::UnnormalizedInitialState, "initial state has norm " + std::to_string(norm));
  }
}

}  // namespace detail

}  // namespace qwalk

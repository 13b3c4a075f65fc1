#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "qwalk/backend/types.hpp"
#include "qwalk/backend/worker_pool.hpp"
#include "qwalk/error.hpp"

namespace qwalk {

// Serial and ParallelCpu are built here. The remaining kinds name bridges
// that exist elsewhere; requesting one fails with UnsupportedEngineKind.
enum class EngineKind { Serial, ParallelCpu, OpenCl, Cuda, Aurora };

enum class EngineState { Initialized, Stopped };

constexpr std::string_view to_string(EngineKind kind) noexcept {
  switch (kind) {
    case EngineKind::Serial: return "serial";
    case EngineKind::ParallelCpu: return "parallel";
    case EngineKind::OpenCl: return "opencl";
    case EngineKind::Cuda: return "cuda";
    case EngineKind::Aurora: return "aurora";
  }
  return "unknown";
}

inline EngineKind engine_kind_from_name(std::string_view name) {
  for (auto k : {EngineKind::Serial, EngineKind::ParallelCpu, EngineKind::OpenCl, EngineKind::Cuda,
                 EngineKind::Aurora}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::UnsupportedEngineKind, "unknown engine '" + std::string(name) + "'");
}

class Engine;

/// Vector registered with an engine. Only Engine::move_to_device creates these.
class DeviceVector {
 public:
  std::size_t dim() const noexcept { return data_->dim(); }
  const ComplexVector& value() const noexcept { return *data_; }

 private:
  friend class Engine;
  DeviceVector(std::shared_ptr<const ComplexVector> data, std::uint64_t owner)
      : data_(std::move(data)), owner_(owner) {}

  std::shared_ptr<const ComplexVector> data_;
  std::uint64_t owner_;
};

/// Dense or CSR matrix registered with an engine.
class DeviceMatrix {
 public:
  using Storage = std::variant<DenseMatrix, CsrMatrix>;

  std::size_t rows() const noexcept {
    return std::visit([](const auto& m) { return m.rows(); }, *data_);
  }
  std::size_t cols() const noexcept {
    return std::visit([](const auto& m) { return m.cols(); }, *data_);
  }
  bool is_sparse() const noexcept { return std::holds_alternative<CsrMatrix>(*data_); }
  const Storage& value() const noexcept { return *data_; }

 private:
  friend class Engine;
  DeviceMatrix(std::shared_ptr<const Storage> data, std::uint64_t owner) : data_(std::move(data)), owner_(owner) {}

  std::shared_ptr<const Storage> data_;
  std::uint64_t owner_;
};

/// Compute engine behind the homogeneous linear-algebra API.
///
/// The serial engine is the reference. The parallel engine splits output
/// rows into contiguous blocks, one per worker; every output element is
/// accumulated by a single worker in index order, so results are
/// bit-identical to the serial engine. Reductions to a scalar (norm, dot)
/// run in index order on the calling thread for the same reason.
class Engine {
 public:
  Engine(Engine&&) noexcept = default;
  Engine& operator=(Engine&&) noexcept = default;
  ~Engine() = default;

  EngineKind kind() const noexcept { return kind_; }
  unsigned thread_count() const noexcept { return threads_; }
  EngineState state() const noexcept { return pool_ ? EngineState::Initialized : EngineState::Stopped; }

  void stop() {
    if (!pool_) throw Error(ErrorCode::AlreadyStopped, "engine already stopped");
    pool_.reset();
  }

  DeviceVector move_to_device(ComplexVector v) const {
    require_running();
    return DeviceVector(std::make_shared<const ComplexVector>(std::move(v)), id_);
  }
  DeviceMatrix move_to_device(DenseMatrix m) const {
    require_running();
    return DeviceMatrix(std::make_shared<const DeviceMatrix::Storage>(std::move(m)), id_);
  }
  DeviceMatrix move_to_device(CsrMatrix m) const {
    require_running();
    return DeviceMatrix(std::make_shared<const DeviceMatrix::Storage>(std::move(m)), id_);
  }

  /// w[i] = sum_j M[i][j] * v[j].
  ComplexVector matvec_mul(const DeviceVector& v, const DeviceMatrix& m) const {
    require_running();
    check_owner(v.owner_);
    check_owner(m.owner_);
    if (m.cols() != v.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "matvec_mul: matrix has " + std::to_string(m.cols()) +
                                                    " columns, vector has dimension " + std::to_string(v.dim()));
    }
    std::vector<ComplexScalar> out(m.rows());
    const auto x = v.value().entries();
    std::visit(
        [&](const auto& mat) {
          using M = std::decay_t<decltype(mat)>;
          if constexpr (std::is_same_v<M, DenseMatrix>) {
            for_blocks(mat.rows(), mat.rows() * mat.cols(), [&](std::size_t begin, std::size_t end) {
              for (std::size_t i = begin; i < end; ++i) {
                auto row = mat.row(i);
                ComplexScalar acc{};
                for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * x[j];
                out[i] = acc;
              }
            });
          } else {
            const auto offsets = mat.row_offsets();
            const auto cols = mat.col_indices();
            const auto vals = mat.values();
            for_blocks(mat.rows(), mat.nnz(), [&](std::size_t begin, std::size_t end) {
              for (std::size_t i = begin; i < end; ++i) {
                ComplexScalar acc{};
                for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) acc += vals[k] * x[cols[k]];
                out[i] = acc;
              }
            });
          }
        },
        m.value());
    return ComplexVector::adopt(std::move(out));
  }

  /// y + alpha * x.
  ComplexVector vector_axpy(ComplexScalar alpha, const DeviceVector& x, const DeviceVector& y) const {
    require_running();
    check_owner(x.owner_);
    check_owner(y.owner_);
    require_same_dim(x, y, "vector_axpy");
    const auto xs = x.value().entries();
    const auto ys = y.value().entries();
    std::vector<ComplexScalar> out(xs.size());
    for_blocks(xs.size(), xs.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out[i] = ys[i] + alpha * xs[i];
    });
    return ComplexVector::adopt(std::move(out));
  }

  ComplexVector vector_scale(ComplexScalar alpha, const DeviceVector& x) const {
    require_running();
    check_owner(x.owner_);
    const auto xs = x.value().entries();
    std::vector<ComplexScalar> out(xs.size());
    for_blocks(xs.size(), xs.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out[i] = alpha * xs[i];
    });
    return ComplexVector::adopt(std::move(out));
  }

  /// Euclidean norm.
  double vector_norm(const DeviceVector& x) const {
    require_running();
    check_owner(x.owner_);
    double sum = 0.0;
    for (auto z : x.value().entries()) sum += std::norm(z);
    return std::sqrt(sum);
  }

  /// Inner product <x|y>, conjugating x.
  ComplexScalar vector_dot(const DeviceVector& x, const DeviceVector& y) const {
    require_running();
    check_owner(x.owner_);
    check_owner(y.owner_);
    require_same_dim(x, y, "vector_dot");
    const auto xs = x.value().entries();
    const auto ys = y.value().entries();
    ComplexScalar sum{};
    for (std::size_t i = 0; i < xs.size(); ++i) sum += std::conj(xs[i]) * ys[i];
    return sum;
  }

  /// Sparse product a * b. Both operands must be CSR.
  CsrMatrix matmul(const DeviceMatrix& a, const DeviceMatrix& b) const {
    require_running();
    check_owner(a.owner_);
    check_owner(b.owner_);
    if (!a.is_sparse() || !b.is_sparse()) {
      throw Error(ErrorCode::InvalidArgument, "matmul: both operands must be sparse");
    }
    if (a.cols() != b.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "matmul: inner dimensions " + std::to_string(a.cols()) +
                                                    " and " + std::to_string(b.rows()));
    }
    const auto& lhs = std::get<CsrMatrix>(a.value());
    const auto& rhs = std::get<CsrMatrix>(b.value());

    std::vector<std::vector<std::size_t>> row_cols(lhs.rows());
    std::vector<std::vector<ComplexScalar>> row_vals(lhs.rows());
    for_blocks(lhs.rows(), lhs.nnz() + rhs.nnz(), [&](std::size_t begin, std::size_t end) {
      std::vector<ComplexScalar> accum(rhs.cols());
      std::vector<char> touched(rhs.cols(), 0);
      std::vector<std::size_t> pattern;
      for (std::size_t i = begin; i < end; ++i) {
        pattern.clear();
        auto lc = lhs.row_cols(i);
        auto lv = lhs.row_values(i);
        for (std::size_t p = 0; p < lc.size(); ++p) {
          auto rc = rhs.row_cols(lc[p]);
          auto rv = rhs.row_values(lc[p]);
          for (std::size_t q = 0; q < rc.size(); ++q) {
            if (!touched[rc[q]]) {
              touched[rc[q]] = 1;
              pattern.push_back(rc[q]);
            }
            accum[rc[q]] += lv[p] * rv[q];
          }
        }
        std::sort(pattern.begin(), pattern.end());
        row_cols[i] = pattern;
        row_vals[i].reserve(pattern.size());
        for (auto c : pattern) {
          row_vals[i].push_back(accum[c]);
          accum[c] = {};
          touched[c] = 0;
        }
      }
    });

    std::vector<std::size_t> offsets(lhs.rows() + 1, 0);
    for (std::size_t i = 0; i < lhs.rows(); ++i) offsets[i + 1] = offsets[i] + row_cols[i].size();
    std::vector<std::size_t> cols;
    std::vector<ComplexScalar> vals;
    cols.reserve(offsets.back());
    vals.reserve(offsets.back());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
      cols.insert(cols.end(), row_cols[i].begin(), row_cols[i].end());
      vals.insert(vals.end(), row_vals[i].begin(), row_vals[i].end());
    }
    return CsrMatrix(lhs.rows(), rhs.cols(), std::move(offsets), std::move(cols), std::move(vals));
  }

 private:
  friend Engine init_engine(EngineKind kind, std::optional<unsigned> thread_count);

  // Below this much work a parallel call runs on the calling thread; the
  // per-row arithmetic is the same either way.
  static constexpr std::size_t kParallelWorkThreshold = 1u << 14;

  Engine(EngineKind kind, unsigned threads)
      : kind_(kind), threads_(threads), pool_(std::make_unique<detail::WorkerPool>(threads)), id_(next_id()) {}

  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
  }

  void require_running() const {
    if (!pool_) throw Error(ErrorCode::EngineStopped, "engine is stopped");
  }

  void check_owner(std::uint64_t owner) const {
    if (owner != id_) throw Error(ErrorCode::ForeignHandle, "handle was moved to a different engine");
  }

  static void require_same_dim(const DeviceVector& x, const DeviceVector& y, const char* op) {
    if (x.dim() != y.dim()) {
      throw Error(ErrorCode::DimensionMismatch, std::string(op) + ": dimensions " + std::to_string(x.dim()) +
                                                    " and " + std::to_string(y.dim()));
    }
  }

  template <typename Body>
  void for_blocks(std::size_t rows, std::size_t work, Body&& body) const {
    const unsigned workers = pool_->size();
    if (workers == 1 || rows < workers || work < kParallelWorkThreshold) {
      body(std::size_t{0}, rows);
      return;
    }
    pool_->run([&](unsigned w) {
      const std::size_t begin = rows * w / workers;
      const std::size_t end = rows * (w + 1) / workers;
      body(begin, end);
    });
  }

  EngineKind kind_;
  unsigned threads_;
  std::unique_ptr<detail::WorkerPool> pool_;
  std::uint64_t id_;
};

/// Starts an engine. `thread_count` is ignored by the serial engine; for the
/// parallel engine std::nullopt resolves to the hardware concurrency.
inline Engine init_engine(EngineKind kind, std::optional<unsigned> thread_count = std::nullopt) {
  switch (kind) {
    case EngineKind::Serial:
      return Engine(kind, 1);
    case EngineKind::ParallelCpu: {
      if (thread_count && *thread_count == 0) {
        throw Error(ErrorCode::InvalidArgument, "thread_count must be positive");
      }
      unsigned n = thread_count ? *thread_count : std::max(1u, std::thread::hardware_concurrency());
      return Engine(kind, n);
    }
    default:
      throw Error(ErrorCode::UnsupportedEngineKind,
                  "engine '" + std::string(to_string(kind)) + "' is not built into this library");
  }
}

inline void stop_engine(Engine& engine) { engine.stop(); }

}  // namespace qwalk

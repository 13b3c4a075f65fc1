#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <stdexcept>
#include <vector>

#include "qwalk/error.hpp"

namespace qwalk {

using ComplexScalar = std::complex<double>;

namespace detail {

inline bool is_finite(ComplexScalar z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(ComplexScalar z, const char* where) {
  if (!is_finite(z)) {
    throw Error(ErrorCode::NonFinite, std::string(where) + ": non-finite entry");
  }
}

}  // namespace detail

// ============================================================================
// ComplexVector
// ============================================================================

/// Dense array of double-precision complex amplitudes.
class ComplexVector {
 public:
  /// Zero vector of the given dimension.
  explicit ComplexVector(std::size_t dim) : entries_(dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "vector dimension must be positive");
  }

  ComplexVector(std::initializer_list<ComplexScalar> entries)
      : ComplexVector(std::vector<ComplexScalar>(entries)) {}

  explicit ComplexVector(std::vector<ComplexScalar> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw Error(ErrorCode::InvalidArgument, "vector dimension must be positive");
    for (auto z : entries_) detail::require_finite(z, "ComplexVector");
  }

  /// Takes ownership of kernel output without the finiteness scan. Only the
  /// backend calls this; a long product chain is allowed to overflow.
  static ComplexVector adopt(std::vector<ComplexScalar>&& entries) {
    ComplexVector v;
    v.entries_ = std::move(entries);
    return v;
  }

  std::size_t dim() const noexcept { return entries_.size(); }

  ComplexScalar operator[](std::size_t i) const noexcept { return entries_[i]; }

  ComplexScalar at(std::size_t i) const {
    if (i >= entries_.size()) throw Error(ErrorCode::IndexOutOfRange, "vector index " + std::to_string(i));
    return entries_[i];
  }

  void set(std::size_t i, ComplexScalar value) {
    if (i >= entries_.size()) throw Error(ErrorCode::IndexOutOfRange, "vector index " + std::to_string(i));
    detail::require_finite(value, "vector_set");
    entries_[i] = value;
  }

  std::span<const ComplexScalar> entries() const noexcept { return entries_; }

  friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

 private:
  ComplexVector() = default;

  std::vector<ComplexScalar> entries_;
};

inline ComplexVector vector_new(std::size_t dim) { return ComplexVector(dim); }

inline void vector_set(ComplexVector& v, std::size_t i, double re, double im) { v.set(i, {re, im}); }

// ============================================================================
// DenseMatrix
// ============================================================================

/// Row-major dense complex matrix.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t n_rows, std::size_t n_cols) : n_rows_(n_rows), n_cols_(n_cols) {
    if (n_rows == 0 || n_cols == 0) {
      throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
    }
    if (n_cols > entries_.max_size() / n_rows) throw std::length_error("dense matrix size overflows");
    entries_.assign(n_rows * n_cols, ComplexScalar{});
  }

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }

  ComplexScalar operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_cols_ + j]; }

  void set(std::size_t i, std::size_t j, ComplexScalar value) {
    if (i >= n_rows_ || j >= n_cols_) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "matrix entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    detail::require_finite(value, "matrix_set");
    entries_[i * n_cols_ + j] = value;
  }

  std::span<const ComplexScalar> entries() const noexcept { return entries_; }

  std::span<const ComplexScalar> row(std::size_t i) const noexcept {
    return std::span<const ComplexScalar>(entries_).subspan(i * n_cols_, n_cols_);
  }

 private:
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<ComplexScalar> entries_;
};

inline DenseMatrix matrix_new(std::size_t n_rows, std::size_t n_cols) { return DenseMatrix(n_rows, n_cols); }

inline void matrix_set(DenseMatrix& m, std::size_t i, std::size_t j, double re, double im) {
  m.set(i, j, {re, im});
}

// ============================================================================
// CsrMatrix
// ============================================================================

struct Triplet {
  std::size_t row;
  std::size_t col;
  ComplexScalar value;
};

/// Compressed-sparse-row complex matrix. Column indices are strictly
/// increasing within each row.
class CsrMatrix {
 public:
  CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
            std::vector<std::size_t> col_indices, std::vector<ComplexScalar> values)
      : n_rows_(n_rows),
        n_cols_(n_cols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
  }

  /// All-zero matrix with no stored entries.
  static CsrMatrix zeros(std::size_t n_rows, std::size_t n_cols) {
    return CsrMatrix(n_rows, n_cols, std::vector<std::size_t>(n_rows + 1, 0), {}, {});
  }

  static CsrMatrix identity(std::size_t n) {
    std::vector<std::size_t> offsets(n + 1);
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return CsrMatrix(n, n, std::move(offsets), std::move(cols), std::vector<ComplexScalar>(n, 1.0));
  }

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const ComplexScalar> values() const noexcept { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const noexcept {
    return std::span<const std::size_t>(col_indices_).subspan(row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]);
  }
  std::span<const ComplexScalar> row_values(std::size_t i) const noexcept {
    return std::span<const ComplexScalar>(values_).subspan(row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]);
  }

  /// Stored value at (i, j), or zero when the entry is structurally absent.
  ComplexScalar coeff(std::size_t i, std::size_t j) const {
    if (i >= n_rows_ || j >= n_cols_) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "matrix entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return {};
    return values_[row_offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  void validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidCsr, msg); };
    if (n_rows_ == 0 || n_cols_ == 0) fail("dimensions must be positive");
    if (row_offsets_.size() != n_rows_ + 1) fail("row_offsets must have n_rows+1 entries");
    if (row_offsets_.front() != 0) fail("row_offsets[0] must be 0");
    if (row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size()) {
      fail("row_offsets[n_rows], col_indices and values disagree on nnz");
    }
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (row_offsets_[i] > row_offsets_[i + 1]) fail("row_offsets must be non-decreasing");
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        if (col_indices_[k] >= n_cols_) fail("column index out of range in row " + std::to_string(i));
        if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
          fail("column indices not strictly increasing in row " + std::to_string(i));
        }
      }
    }
    for (auto z : values_) detail::require_finite(z, "CsrMatrix");
  }

  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> col_indices_;
  std::vector<ComplexScalar> values_;
};

/// Assembles a CSR matrix from coordinates in any order. Duplicate
/// coordinates are summed; entries that sum to exactly zero are kept.
inline CsrMatrix csr_from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= n_rows || t.col >= n_cols) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) + ")");
    }
    detail::require_finite(t.value, "csr_from_triplets");
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<std::size_t> offsets(n_rows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<ComplexScalar> values;
  cols.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      values.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    values.push_back(t.value);
    ++offsets[t.row + 1];
  }
  for (std::size_t i = 0; i < n_rows; ++i) offsets[i + 1] += offsets[i];
  return CsrMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(values));
}

inline DenseMatrix densify(const CsrMatrix& m) {
  DenseMatrix dense(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) dense.set(i, cols[k], vals[k]);
  }
  return dense;
}

inline CsrMatrix conjugate_transpose(const CsrMatrix& m) {
  std::vector<Triplet> triplets;
  triplets.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) triplets.push_back({cols[k], i, std::conj(vals[k])});
  }
  return csr_from_triplets(m.cols(), m.rows(), std::move(triplets));
}

}  // namespace qwalk

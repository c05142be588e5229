#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace srhgnn {

/// Row-major dense storage used throughout the numerical core.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored.
class CsrMatrix {
 public:
  CsrMatrix() : CsrMatrix(0, 0) {}
  CsrMatrix(std::size_t rows, std::size_t cols);

  /// Duplicate coordinates are summed; entries that sum to zero are dropped.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                 std::vector<Triplet> triplets);
  static CsrMatrix identity(std::size_t n);
  static CsrMatrix diagonal(const std::vector<double>& diag);
  static CsrMatrix from_dense(const Matrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t row_nnz(std::size_t r) const {
    return row_ptr_[r + 1] - row_ptr_[r];
  }

  /// Stored value at (r, c), zero when absent.
  double at(std::size_t r, std::size_t c) const;
  bool contains(std::size_t r, std::size_t c) const;

  CsrMatrix transpose() const;
  Matrix to_dense() const;
  bool is_symmetric() const;

  /// this * dense. Throws ContractError on inner-dimension mismatch.
  Matrix multiply(const Matrix& dense) const;
  /// this^T * dense, without materializing the transpose.
  Matrix transpose_multiply(const Matrix& dense) const;

  /// Throws ContractError if indices are unsorted, out of range, or values
  /// contain explicit zeros.
  void validate() const;

  bool operator==(const CsrMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// psi(A): number of stored nonzeros.
inline std::size_t count_nonzeros(const CsrMatrix& m) { return m.nnz(); }

}  // namespace srhgnn

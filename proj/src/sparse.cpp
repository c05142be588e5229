#include "srhgnn/sparse.hpp"

#include <algorithm>
#include <string>

#include "srhgnn/errors.hpp"

namespace srhgnn {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw ContractError("sparse triplet (" + std::to_string(t.row) + ", " +
                          std::to_string(t.col) + ") outside " +
                          std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  CsrMatrix out(rows, cols);
  std::size_t i = 0;
  while (i < triplets.size()) {
    const std::size_t r = triplets[i].row;
    const std::size_t c = triplets[i].col;
    double sum = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
      sum += triplets[i].value;
      ++i;
    }
    if (sum != 0.0) {
      out.col_idx_.push_back(c);
      out.values_.push_back(sum);
      ++out.row_ptr_[r + 1];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) out.row_ptr_[r + 1] += out.row_ptr_[r];
  return out;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  return diagonal(std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::diagonal(const std::vector<double>& diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
  return from_triplets(diag.size(), diag.size(), std::move(t));
}

CsrMatrix CsrMatrix::from_dense(const Matrix& dense) {
  std::vector<Triplet> t;
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    for (Eigen::Index c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        t.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c),
                     dense(r, c)});
      }
    }
  }
  return from_triplets(static_cast<std::size_t>(dense.rows()),
                       static_cast<std::size_t>(dense.cols()), std::move(t));
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

bool CsrMatrix::contains(std::size_t r, std::size_t c) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  return std::binary_search(begin, end, c);
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix out(cols_, rows_);
  out.col_idx_.resize(nnz());
  out.values_.resize(nnz());
  for (std::size_t c : col_idx_) ++out.row_ptr_[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) out.row_ptr_[c + 1] += out.row_ptr_[c];
  std::vector<std::size_t> cursor(out.row_ptr_.begin(), out.row_ptr_.end() - 1);
  // Rows are visited in order, so each output row receives sorted columns.
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const std::size_t dst = cursor[col_idx_[p]]++;
      out.col_idx_[dst] = r;
      out.values_[dst] = values_[p];
    }
  }
  return out;
}

Matrix CsrMatrix::to_dense() const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows_),
                            static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[p])) =
          values_[p];
    }
  }
  return out;
}

bool CsrMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      if (at(col_idx_[p], r) != values_[p]) return false;
    }
  }
  return true;
}

Matrix CsrMatrix::multiply(const Matrix& dense) const {
  if (static_cast<std::size_t>(dense.rows()) != cols_) {
    throw ContractError("sparse-dense product: " + std::to_string(rows_) + "x" +
                        std::to_string(cols_) + " times " +
                        std::to_string(dense.rows()) + "x" +
                        std::to_string(dense.cols()));
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows_), dense.cols());
  for (std::size_t r = 0; r < rows_; ++r) {
    auto dst = out.row(static_cast<Eigen::Index>(r));
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      dst += values_[p] * dense.row(static_cast<Eigen::Index>(col_idx_[p]));
    }
  }
  return out;
}

Matrix CsrMatrix::transpose_multiply(const Matrix& dense) const {
  if (static_cast<std::size_t>(dense.rows()) != rows_) {
    throw ContractError("sparse^T-dense product: dimension mismatch");
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(cols_), dense.cols());
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto src = dense.row(static_cast<Eigen::Index>(r));
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      out.row(static_cast<Eigen::Index>(col_idx_[p])) += values_[p] * src;
    }
  }
  return out;
}

void CsrMatrix::validate() const {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != values_.size() || col_idx_.size() != values_.size()) {
    throw ContractError("CSR: inconsistent index arrays");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) throw ContractError("CSR: row_ptr not monotone");
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      if (col_idx_[p] >= cols_) throw ContractError("CSR: column out of range");
      if (p > row_ptr_[r] && col_idx_[p - 1] >= col_idx_[p]) {
        throw ContractError("CSR: columns unsorted in row " + std::to_string(r));
      }
      if (values_[p] == 0.0) throw ContractError("CSR: explicit zero stored");
    }
  }
}

}  // namespace srhgnn

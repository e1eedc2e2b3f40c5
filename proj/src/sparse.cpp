#include "stfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stfem {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (static_cast<Index>(row_offsets_.size()) != rows_ + 1 || row_offsets_.front() != 0 ||
      static_cast<std::size_t>(row_offsets_.back()) != col_indices_.size() ||
      col_indices_.size() != values_.size())
    throw LinearAlgebraError("inconsistent CSR arrays");
  for (Index i = 0; i < rows_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i]) throw LinearAlgebraError("row offsets not monotone");
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= cols_)
        throw LinearAlgebraError("column index out of range in row " + std::to_string(i));
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw LinearAlgebraError("column indices not sorted/unique in row " + std::to_string(i));
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> offsets(rows + 1, 0);
  std::vector<Index> cols_out;
  std::vector<double> vals;
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const Triplet& t = triplets[k];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw LinearAlgebraError("triplet index out of range");
    if (k > 0 && t.row == triplets[k - 1].row && t.col == triplets[k - 1].col) {
      vals.back() += t.value;
      continue;
    }
    cols_out.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> offsets(n + 1), cols(n);
  std::iota(offsets.begin(), offsets.end(), Index{0});
  std::iota(cols.begin(), cols.end(), Index{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

std::ptrdiff_t SparseMatrix::find(Index i, Index j) const {
  const auto first = col_indices_.begin() + row_offsets_[i];
  const auto last = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return it - col_indices_.begin();
}

double SparseMatrix::at(Index i, Index j) const {
  const auto k = find(i, j);
  return k < 0 ? 0.0 : values_[k];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_)
    throw LinearAlgebraError("matrix-vector dimension mismatch");
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += values_[k] * x[col_indices_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::block(Index r0, Index r1, Index c0, Index c1) const {
  require(0 <= r0 && r0 <= r1 && r1 <= rows_ && 0 <= c0 && c0 <= c1 && c1 <= cols_,
          "block range out of bounds");
  std::vector<Index> offsets{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = r0; i < r1; ++i) {
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const Index j = col_indices_[k];
      if (j >= c0 && j < c1) {
        cols.push_back(j - c0);
        vals.push_back(values_[k]);
      }
    }
    offsets.push_back(static_cast<Index>(cols.size()));
  }
  return SparseMatrix(r1 - r0, c1 - c0, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> offsets(cols_ + 1, 0);
  for (Index j : col_indices_) ++offsets[j + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> cols(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<Index> next(offsets.begin(), offsets.end() - 1);
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const Index pos = next[col_indices_[k]]++;
      cols[pos] = i;
      vals[pos] = values_[k];
    }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace stfem

#pragma once

#include <span>
#include <vector>

#include "stfem/common.hpp"

namespace stfem {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix. Column indices are sorted and unique per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets, std::vector<Index> col_indices,
               std::vector<double> values);

  /// Duplicates are summed.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const Index> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Entry (i, j), zero outside the pattern.
  double at(Index i, Index j) const;
  /// Position of (i, j) in values(), or -1 outside the pattern.
  std::ptrdiff_t find(Index i, Index j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  /// Rows [r0, r1) x columns [c0, c1) as a new matrix.
  SparseMatrix block(Index r0, Index r1, Index c0, Index c1) const;
  SparseMatrix transpose() const;
  std::vector<double> diagonal() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace stfem

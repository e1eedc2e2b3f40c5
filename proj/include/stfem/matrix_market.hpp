#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stfem/sparse.hpp"

namespace stfem {

/// `%%MatrixMarket matrix coordinate real general`, 1-based, 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);

/// Dense column vector in `array real general` layout.
void write_matrix_market(std::ostream& out, const std::vector<double>& v);
void write_matrix_market(const std::string& path, const std::vector<double>& v);

/// Reads coordinate (real/integer/pattern; general/symmetric/skew-symmetric)
/// files. Throws std::runtime_error on malformed input.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);

/// Reads an `array real general` column vector.
std::vector<double> read_matrix_market_vector(std::istream& in);

}  // namespace stfem

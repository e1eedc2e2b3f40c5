#include "stfem/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace stfem {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Banner {
  std::string format, field, symmetry;
};

Banner read_banner(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("Matrix Market: empty input");
  std::istringstream ss(line);
  std::string tag, object;
  Banner b;
  ss >> tag >> object >> b.format >> b.field >> b.symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix")
    throw std::runtime_error("Matrix Market: bad banner '" + line + "'");
  b.format = lower(b.format);
  b.field = lower(b.field);
  b.symmetry = lower(b.symmetry);
  if (b.field == "complex") throw std::runtime_error("Matrix Market: complex matrices not supported");
  return b;
}

// Next line that is neither a comment nor blank.
std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return line;
  }
  throw std::runtime_error("Matrix Market: unexpected end of input");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  return out;
}

}  // namespace

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonzeros() << '\n' << std::setprecision(17);
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k)
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
  auto out = open_out(path);
  write_matrix_market(out, a);
}

void write_matrix_market(std::ostream& out, const std::vector<double>& v) {
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n" << std::setprecision(17);
  for (double x : v) out << x << '\n';
}

void write_matrix_market(const std::string& path, const std::vector<double>& v) {
  auto out = open_out(path);
  write_matrix_market(out, v);
}

SparseMatrix read_matrix_market(std::istream& in) {
  const Banner b = read_banner(in);
  if (b.format != "coordinate") throw std::runtime_error("Matrix Market: expected coordinate format");
  long rows = 0, cols = 0, entries = 0;
  {
    std::istringstream ss(next_data_line(in));
    if (!(ss >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
      throw std::runtime_error("Matrix Market: bad size line");
  }
  const bool pattern = b.field == "pattern";
  std::vector<Triplet> triplets;
  triplets.reserve(entries);
  for (long k = 0; k < entries; ++k) {
    std::istringstream ss(next_data_line(in));
    long i = 0, j = 0;
    double v = 1.0;
    if (!(ss >> i >> j) || (!pattern && !(ss >> v)))
      throw std::runtime_error("Matrix Market: bad entry " + std::to_string(k + 1));
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw std::runtime_error("Matrix Market: entry out of range");
    triplets.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
    if (i != j && b.symmetry == "symmetric")
      triplets.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
    if (i != j && b.symmetry == "skew-symmetric")
      triplets.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), -v});
  }
  return SparseMatrix::from_triplets(static_cast<Index>(rows), static_cast<Index>(cols), std::move(triplets));
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(in);
}

std::vector<double> read_matrix_market_vector(std::istream& in) {
  const Banner b = read_banner(in);
  if (b.format != "array") throw std::runtime_error("Matrix Market: expected array format");
  long rows = 0, cols = 0;
  std::istringstream ss(next_data_line(in));
  if (!(ss >> rows >> cols) || cols != 1) throw std::runtime_error("Matrix Market: expected a column vector");
  std::vector<double> v(rows);
  for (long i = 0; i < rows; ++i) {
    std::istringstream ls(next_data_line(in));
    if (!(ls >> v[i])) throw std::runtime_error("Matrix Market: bad vector entry");
  }
  return v;
}

}  // namespace stfem

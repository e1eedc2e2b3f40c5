#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "stfem/assembly.hpp"
#include "stfem/matrix_market.hpp"
#include "stfem/problems.hpp"
#include "stfem/solver.hpp"
#include "stfem/sparse.hpp"

using namespace stfem;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& a) {
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) t.push_back({i, j, a(i, j)});
  return SparseMatrix::from_triplets(static_cast<Index>(a.rows()), static_cast<Index>(a.cols()), std::move(t));
}

Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) d(i, a.col_indices()[k]) = a.values()[k];
  return d;
}

// Sparse SPD test matrix: 2D five-point Laplacian plus a random diagonal shift.
SparseMatrix spd_matrix(int m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet> t;
  auto id = [m](int i, int j) { return static_cast<Index>(i * m + j); };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      t.push_back({id(i, j), id(i, j), 4.0 + u(rng)});
      if (i > 0) t.push_back({id(i, j), id(i - 1, j), -1.0});
      if (i + 1 < m) t.push_back({id(i, j), id(i + 1, j), -1.0});
      if (j > 0) t.push_back({id(i, j), id(i, j - 1), -1.0});
      if (j + 1 < m) t.push_back({id(i, j), id(i, j + 1), -1.0});
    }
  return SparseMatrix::from_triplets(m * m, m * m, std::move(t));
}

std::vector<double> random_vector(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

BlockSystem smooth_benchmark(int n) {
  const auto mesh = build_structured_mesh(2, n, 1.0);
  const auto spaces = make_spaces(mesh, 1);
  const auto exact = smooth_example(0.01);
  ProblemCoefficients coeff;
  coeff.varrho = 0.01;
  return assemble_system(mesh, spaces, coeff, StabilizationConfig::per_element(0.1),
                         [exact](const Point& x) { return exact.target(x); });
}

}  // namespace

TEST_CASE("CSR construction validates its arrays") {
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1, 2}, {1, 0, 0}, {1.0, 2.0}), LinearAlgebraError);
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 2}, {1, 0}, {1.0, 2.0}), LinearAlgebraError);
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1, 2}, {0, 2}, {1.0, 2.0}), LinearAlgebraError);
  CHECK_NOTHROW(SparseMatrix(2, 2, {0, 1, 2}, {0, 1}, {1.0, 2.0}));
}

TEST_CASE("triplets sum duplicates and sort columns") {
  const auto a = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, -1.0}});
  CHECK(a.nonzeros() == 3);
  CHECK(a.at(0, 2) == 1.5);
  CHECK(a.at(0, 0) == 2.0);
  CHECK(a.at(0, 1) == 0.0);
  CHECK(a.find(0, 1) == -1);
  CHECK(a.col_indices()[0] == 0);
  CHECK(a.col_indices()[1] == 2);
  const auto y = a.multiply(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(y[0] == 6.5);
  CHECK(y[1] == -2.0);
  const auto at = a.transpose();
  CHECK(at.rows() == 3);
  CHECK(at.at(2, 0) == 1.5);
  const auto b = a.block(0, 2, 1, 3);
  CHECK(b.cols() == 2);
  CHECK(b.at(0, 1) == 1.5);
  CHECK(b.at(1, 0) == -1.0);
}

TEST_CASE("fgmres on the identity converges in one iteration") {
  const auto a = SparseMatrix::identity(5);
  const std::vector<double> b{1, -2, 3, 0.5, 7};
  const auto r = fgmres(a, b, IdentityPreconditioner{});
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  for (int i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("fgmres on a 2 x 2 upper triangular system") {
  const auto a = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 1, 1.0}});
  const auto r = fgmres(a, std::vector<double>{3.0, 1.0}, IdentityPreconditioner{});
  CHECK(r.report.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fgmres with zero right-hand side returns zero") {
  const auto a = SparseMatrix::identity(3);
  const auto r = fgmres(a, std::vector<double>(3, 0.0), IdentityPreconditioner{});
  CHECK(r.report.converged);
  CHECK(r.x == std::vector<double>(3, 0.0));
}

TEST_CASE("fgmres matches dense LU on SPD systems") {
  std::mt19937 rng(1);
  for (int m : {3, 8, 14}) {
    const auto a = spd_matrix(m, rng);
    const auto b = random_vector(a.rows(), rng);
    SolverOptions opts;
    opts.rtol = 1e-12;
    const auto r = fgmres(a, b, IdentityPreconditioner{}, opts);
    REQUIRE(r.report.converged);
    const Eigen::VectorXd x = to_dense(a).lu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
    for (Index i = 0; i < a.rows(); ++i) CHECK(r.x[i] == doctest::Approx(x[i]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("residual history is non-increasing within a cycle") {
  std::mt19937 rng(2);
  const auto a = spd_matrix(12, rng);
  const auto b = random_vector(a.rows(), rng);
  SolverOptions opts;
  opts.restart = 10;
  const auto r = fgmres(a, b, IdentityPreconditioner{}, opts);
  CHECK(r.report.converged);
  CHECK(r.report.relative_residual <= 1e-8);
  const auto& h = r.report.residual_history;
  for (std::size_t i = 1; i < h.size(); ++i)
    if ((i - 1) % opts.restart != 0) CHECK(h[i] <= h[i - 1] * (1 + 1e-12));
}

TEST_CASE("non-convergence is reported") {
  std::mt19937 rng(3);
  const auto a = spd_matrix(20, rng);
  const auto b = random_vector(a.rows(), rng);
  SolverOptions opts;
  opts.restart = 2;
  opts.max_iterations = 4;
  const auto r = fgmres(a, b, IdentityPreconditioner{}, opts);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations == 4);
  CHECK(r.x.size() == b.size());
  CHECK(r.report.relative_residual > 1e-8);
}

TEST_CASE("jacobi on a diagonal matrix is exact") {
  const auto a = SparseMatrix::from_triplets(3, 3, {{0, 0, 2.0}, {1, 1, -4.0}, {2, 2, 0.5}});
  const auto m = make_jacobi(a);
  const auto r = fgmres(a, std::vector<double>{1, 1, 1}, *m);
  CHECK(r.report.iterations == 1);
  CHECK(r.x[1] == doctest::Approx(-0.25));
}

TEST_CASE("ILU0 of a triangular matrix is exact") {
  const auto a = SparseMatrix::from_triplets(
      4, 4, {{0, 0, 2.0}, {1, 0, 1.0}, {1, 1, 3.0}, {2, 1, -1.0}, {2, 2, 1.5}, {3, 0, 0.5}, {3, 3, 4.0}});
  const auto m = make_ilu0(a);
  const std::vector<double> b{1.0, 2.0, -1.0, 0.25};
  std::vector<double> z(4);
  m->apply(b, z);
  const auto az = a.multiply(z);
  for (int i = 0; i < 4; ++i) CHECK(az[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("sparse LU preconditioner is exact") {
  std::mt19937 rng(4);
  const auto a = spd_matrix(6, rng);
  const auto m = make_sparse_lu(a);
  const auto r = fgmres(a, random_vector(a.rows(), rng), *m);
  CHECK(r.report.iterations == 1);
}

TEST_CASE("zero diagonal is reported with its row") {
  const auto a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 2, 1.0}, {2, 2, 1.0}});
  try {
    make_ilu0(a);
    FAIL("expected an exception");
  } catch (const LinearAlgebraError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  CHECK_THROWS_AS(make_jacobi(a), LinearAlgebraError);
  CHECK_THROWS_AS(make_symmetric_gauss_seidel(a, 1), LinearAlgebraError);
}

TEST_CASE("preconditioners reduce iterations on the n = 8 benchmark") {
  const auto system = smooth_benchmark(8);
  const auto none = fgmres(system.matrix, system.rhs, IdentityPreconditioner{});
  for (PreconditionerKind kind :
       {PreconditionerKind::ILU0, PreconditionerKind::SymGaussSeidel, PreconditionerKind::SparseLU}) {
    const auto m = build_block_preconditioner(system, kind);
    const auto r = fgmres(system.matrix, system.rhs, *m);
    INFO(to_string(kind));
    CHECK(r.report.converged);
    CHECK(r.report.iterations < none.report.iterations);
    // preconditioning leaves the solution unchanged
    for (std::size_t i = 0; i < r.x.size(); ++i) CHECK(std::abs(r.x[i] - none.x[i]) < 1e-6);
  }
}

TEST_CASE("benchmark systems converge to the prescribed tolerance") {
  const auto system = smooth_benchmark(4);
  const auto m = build_block_preconditioner(system, PreconditionerKind::ILU0);
  const auto r = fgmres(system.matrix, system.rhs, *m);
  CHECK(r.report.converged);
  const auto ax = system.matrix.multiply(r.x);
  std::vector<double> res(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) res[i] = system.rhs[i] - ax[i];
  CHECK(norm2(res) <= 1e-8 * norm2(system.rhs));
  CHECK(r.report.relative_residual == doctest::Approx(norm2(res) / norm2(system.rhs)).epsilon(1e-6));
}

TEST_CASE("preconditioner names") {
  for (auto kind : {PreconditionerKind::None, PreconditionerKind::Jacobi, PreconditionerKind::SymGaussSeidel,
                    PreconditionerKind::ILU0, PreconditionerKind::SparseLU})
    CHECK(parse_preconditioner_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_preconditioner_kind("amg"), std::invalid_argument);
}

TEST_CASE("pd probe") {
  CHECK(pd_probe(SparseMatrix::identity(4), 50) == doctest::Approx(1.0).epsilon(1e-14));
  const auto skew = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, -1.0}});
  CHECK(std::abs(pd_probe(skew, 50)) < 1e-15);
  CHECK(pd_probe(smooth_benchmark(2).matrix, 100) > 0.0);
}

TEST_CASE("solver csv") {
  SolverReport r;
  r.residual_history = {1.0, 0.1, 1e-9};
  std::ostringstream out;
  write_solver_csv(out, r);
  CHECK(out.str().rfind("iter,relres\n0,1\n", 0) == 0);
}

TEST_CASE("matrix market round trip") {
  std::mt19937 rng(5);
  const auto a = spd_matrix(4, rng);
  std::stringstream s;
  write_matrix_market(s, a);
  const auto b = read_matrix_market(s);
  REQUIRE(b.rows() == a.rows());
  REQUIRE(b.nonzeros() == a.nonzeros());
  for (std::size_t k = 0; k < a.nonzeros(); ++k) CHECK(a.values()[k] == b.values()[k]);

  const std::vector<double> v{1.0 / 3.0, -2.5e-17, 4.0};
  std::stringstream sv;
  write_matrix_market(sv, v);
  CHECK(read_matrix_market_vector(sv) == v);

  std::istringstream sym(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 2\n1 1 2.0\n3 1 -1.0\n");
  const auto m = read_matrix_market(sym);
  CHECK(m.at(0, 2) == -1.0);
  CHECK(m.at(2, 0) == -1.0);
  CHECK(m.at(0, 0) == 2.0);

  std::istringstream pattern("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n");
  CHECK(read_matrix_market(pattern).at(1, 0) == 1.0);

  std::istringstream bad("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
  CHECK_THROWS(read_matrix_market(bad));
}

TEST_CASE("from_dense helper agrees with to_dense") {
  Eigen::MatrixXd d(2, 2);
  d << 1, 0, 3, 4;
  CHECK((to_dense(from_dense(d)) - d).norm() == 0.0);
}

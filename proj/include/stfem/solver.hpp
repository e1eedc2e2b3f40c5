#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stfem/sparse.hpp"

namespace stfem {

/// z = M^{-1} r for some approximate inverse M^{-1}. Implementations may
/// vary between calls; fgmres is flexible.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> z) const override;
};

enum class PreconditionerKind { None, Jacobi, SymGaussSeidel, ILU0, SparseLU };

PreconditionerKind parse_preconditioner_kind(const std::string& name);
const char* to_string(PreconditionerKind kind);

/// Zero-fill incomplete LU on the pattern of `a`. Exact for triangular
/// patterns. Throws LinearAlgebraError naming the row of a zero pivot.
std::unique_ptr<Preconditioner> make_ilu0(const SparseMatrix& a);
/// Exact sparse LU factorization (COLAMD ordering).
std::unique_ptr<Preconditioner> make_sparse_lu(const SparseMatrix& a);
std::unique_ptr<Preconditioner> make_jacobi(const SparseMatrix& a);
/// `sweeps` symmetric Gauss-Seidel sweeps from a zero initial guess.
std::unique_ptr<Preconditioner> make_symmetric_gauss_seidel(const SparseMatrix& a, int sweeps);

/// Approximate inverse of diag(K11, K22) where K11 = K[0:split, 0:split].
std::unique_ptr<Preconditioner> build_block_preconditioner(const SparseMatrix& k, Index split,
                                                           PreconditionerKind kind, int sweeps = 1);

struct SolverOptions {
  double rtol = 1e-8;
  int restart = 50;
  int max_iterations = 500;
};

struct SolverReport {
  int iterations = 0;
  /// Relative residual estimate ||r_j|| / ||b||, starting with the initial residual.
  std::vector<double> residual_history;
  /// True residual ||b - A x|| / ||b|| of the returned iterate.
  double relative_residual = 0.0;
  double seconds = 0.0;
  bool converged = false;
};

struct SolveResult {
  std::vector<double> x;
  SolverReport report;
};

/// Restarted flexible GMRES with right preconditioning. The returned iterate
/// is the last one computed even when the iteration did not converge.
SolveResult fgmres(const SparseMatrix& a, std::span<const double> b, const Preconditioner& m,
                   const SolverOptions& options = {}, std::span<const double> x0 = {});

/// Smallest x^T A x over `trials` random unit vectors.
double pd_probe(const SparseMatrix& a, int trials, std::uint64_t seed = 20210101);

/// CSV rows `iter,relres` from a solver report.
void write_solver_csv(std::ostream& out, const SolverReport& report);

}  // namespace stfem

#include "stfem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace stfem {

namespace {

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(std::vector<double> inverse_diagonal) : inv_(std::move(inverse_diagonal)) {}
  void apply(std::span<const double> r, std::span<double> z) const override {
    for (std::size_t i = 0; i < inv_.size(); ++i) z[i] = inv_[i] * r[i];
  }

 private:
  std::vector<double> inv_;
};

std::vector<Index> diagonal_positions(const SparseMatrix& a) {
  std::vector<Index> pos(a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    const auto k = a.find(i, i);
    if (k < 0 || a.values()[k] == 0.0)
      throw LinearAlgebraError("zero diagonal entry in row " + std::to_string(i));
    pos[i] = static_cast<Index>(k);
  }
  return pos;
}

class Ilu0Preconditioner final : public Preconditioner {
 public:
  explicit Ilu0Preconditioner(const SparseMatrix& a) : lu_(a), diag_(diagonal_positions(a)) {
    const auto offsets = lu_.row_offsets();
    const auto cols = lu_.col_indices();
    auto vals = lu_.values();
    std::vector<Index> where(lu_.cols(), -1);
    for (Index i = 0; i < lu_.rows(); ++i) {
      for (Index k = offsets[i]; k < offsets[i + 1]; ++k) where[cols[k]] = k;
      for (Index k = offsets[i]; k < diag_[i]; ++k) {
        const Index p = cols[k];
        const double pivot = vals[diag_[p]];
        if (pivot == 0.0) throw LinearAlgebraError("zero pivot in row " + std::to_string(p));
        vals[k] /= pivot;
        for (Index m = diag_[p] + 1; m < offsets[p + 1]; ++m)
          if (where[cols[m]] >= 0) vals[where[cols[m]]] -= vals[k] * vals[m];
      }
      if (vals[diag_[i]] == 0.0) throw LinearAlgebraError("zero pivot in row " + std::to_string(i));
      for (Index k = offsets[i]; k < offsets[i + 1]; ++k) where[cols[k]] = -1;
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const override {
    const auto offsets = lu_.row_offsets();
    const auto cols = lu_.col_indices();
    const auto vals = lu_.values();
    const Index n = lu_.rows();
    for (Index i = 0; i < n; ++i) {
      double s = r[i];
      for (Index k = offsets[i]; k < diag_[i]; ++k) s -= vals[k] * z[cols[k]];
      z[i] = s;
    }
    for (Index i = n - 1; i >= 0; --i) {
      double s = z[i];
      for (Index k = diag_[i] + 1; k < offsets[i + 1]; ++k) s -= vals[k] * z[cols[k]];
      z[i] = s / vals[diag_[i]];
    }
  }

 private:
  SparseMatrix lu_;
  std::vector<Index> diag_;
};

class SymGaussSeidelPreconditioner final : public Preconditioner {
 public:
  SymGaussSeidelPreconditioner(const SparseMatrix& a, int sweeps)
      : a_(a), diag_(diagonal_positions(a)), sweeps_(sweeps) {
    require(sweeps >= 1, "Gauss-Seidel needs at least one sweep");
  }

  void apply(std::span<const double> r, std::span<double> z) const override {
    const auto offsets = a_.row_offsets();
    const auto cols = a_.col_indices();
    const auto vals = a_.values();
    const Index n = a_.rows();
    std::fill(z.begin(), z.end(), 0.0);
    auto relax = [&](Index i) {
      double s = r[i];
      for (Index k = offsets[i]; k < offsets[i + 1]; ++k)
        if (k != diag_[i]) s -= vals[k] * z[cols[k]];
      z[i] = s / vals[diag_[i]];
    };
    for (int sweep = 0; sweep < sweeps_; ++sweep) {
      for (Index i = 0; i < n; ++i) relax(i);
      for (Index i = n - 1; i >= 0; --i) relax(i);
    }
  }

 private:
  SparseMatrix a_;
  std::vector<Index> diag_;
  int sweeps_;
};

class SparseLUPreconditioner final : public Preconditioner {
 public:
  explicit SparseLUPreconditioner(const SparseMatrix& a) {
    Eigen::SparseMatrix<double> m(a.rows(), a.cols());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(a.nonzeros());
    const auto offsets = a.row_offsets();
    for (Index i = 0; i < a.rows(); ++i)
      for (Index k = offsets[i]; k < offsets[i + 1]; ++k)
        entries.emplace_back(i, a.col_indices()[k], a.values()[k]);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    lu_.analyzePattern(m);
    lu_.factorize(m);
    if (lu_.info() != Eigen::Success) throw LinearAlgebraError("sparse LU failed: " + lu_.lastErrorMessage());
  }
  void apply(std::span<const double> r, std::span<double> z) const override {
    const Eigen::Map<const Eigen::VectorXd> rhs(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())) = lu_.solve(rhs);
  }

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

class BlockDiagonalPreconditioner final : public Preconditioner {
 public:
  BlockDiagonalPreconditioner(Index split, std::unique_ptr<Preconditioner> first,
                              std::unique_ptr<Preconditioner> second)
      : split_(split), first_(std::move(first)), second_(std::move(second)) {}

  void apply(std::span<const double> r, std::span<double> z) const override {
    first_->apply(r.subspan(0, split_), z.subspan(0, split_));
    second_->apply(r.subspan(split_), z.subspan(split_));
  }

 private:
  Index split_;
  std::unique_ptr<Preconditioner> first_;
  std::unique_ptr<Preconditioner> second_;
};

std::unique_ptr<Preconditioner> make_kind(const SparseMatrix& a, PreconditionerKind kind, int sweeps) {
  switch (kind) {
    case PreconditionerKind::None: return std::make_unique<IdentityPreconditioner>();
    case PreconditionerKind::Jacobi: return make_jacobi(a);
    case PreconditionerKind::SymGaussSeidel: return make_symmetric_gauss_seidel(a, sweeps);
    case PreconditionerKind::ILU0: return make_ilu0(a);
    case PreconditionerKind::SparseLU: return make_sparse_lu(a);
  }
  throw std::invalid_argument("unknown preconditioner kind");
}

}  // namespace

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  std::copy(r.begin(), r.end(), z.begin());
}

PreconditionerKind parse_preconditioner_kind(const std::string& name) {
  if (name == "none") return PreconditionerKind::None;
  if (name == "jacobi") return PreconditionerKind::Jacobi;
  if (name == "sgs" || name == "gauss-seidel") return PreconditionerKind::SymGaussSeidel;
  if (name == "ilu0") return PreconditionerKind::ILU0;
  if (name == "lu") return PreconditionerKind::SparseLU;
  throw std::invalid_argument("unknown preconditioner '" + name + "' (none|jacobi|sgs|ilu0|lu)");
}

const char* to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::None: return "none";
    case PreconditionerKind::Jacobi: return "jacobi";
    case PreconditionerKind::SymGaussSeidel: return "sgs";
    case PreconditionerKind::ILU0: return "ilu0";
    case PreconditionerKind::SparseLU: return "lu";
  }
  return "?";
}

std::unique_ptr<Preconditioner> make_ilu0(const SparseMatrix& a) {
  require(a.rows() == a.cols(), "ILU0 needs a square matrix");
  return std::make_unique<Ilu0Preconditioner>(a);
}

std::unique_ptr<Preconditioner> make_sparse_lu(const SparseMatrix& a) {
  require(a.rows() == a.cols(), "LU needs a square matrix");
  return std::make_unique<SparseLUPreconditioner>(a);
}

std::unique_ptr<Preconditioner> make_jacobi(const SparseMatrix& a) {
  require(a.rows() == a.cols(), "Jacobi needs a square matrix");
  const auto pos = diagonal_positions(a);
  std::vector<double> inv(a.rows());
  for (Index i = 0; i < a.rows(); ++i) inv[i] = 1.0 / a.values()[pos[i]];
  return std::make_unique<JacobiPreconditioner>(std::move(inv));
}

std::unique_ptr<Preconditioner> make_symmetric_gauss_seidel(const SparseMatrix& a, int sweeps) {
  require(a.rows() == a.cols(), "Gauss-Seidel needs a square matrix");
  return std::make_unique<SymGaussSeidelPreconditioner>(a, sweeps);
}

std::unique_ptr<Preconditioner> build_block_preconditioner(const SparseMatrix& k, Index split,
                                                           PreconditionerKind kind, int sweeps) {
  require(k.rows() == k.cols(), "block preconditioner needs a square matrix");
  require(split >= 0 && split <= k.rows(), "block split out of range");
  if (kind == PreconditionerKind::None) return std::make_unique<IdentityPreconditioner>();
  const Index n = k.rows();
  return std::make_unique<BlockDiagonalPreconditioner>(split, make_kind(k.block(0, split, 0, split), kind, sweeps),
                                                       make_kind(k.block(split, n, split, n), kind, sweeps));
}

SolveResult fgmres(const SparseMatrix& a, std::span<const double> b, const Preconditioner& m,
                   const SolverOptions& options, std::span<const double> x0) {
  require(a.rows() == a.cols(), "fgmres needs a square matrix");
  require(static_cast<Index>(b.size()) == a.rows(), "right-hand side has wrong length");
  require(options.rtol > 0.0 && options.rtol < 1.0, "rtol must lie in (0,1)");
  require(options.restart >= 1, "restart must be at least 1");
  require(x0.empty() || x0.size() == b.size(), "initial guess has wrong length");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  const int restart = options.restart;

  SolveResult result;
  SolverReport& report = result.report;
  std::vector<double>& x = result.x;
  x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());

  const double bnorm = norm2(b);
  auto finish = [&](double residual) {
    report.relative_residual = bnorm > 0.0 ? residual / bnorm : residual;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    report.residual_history.push_back(0.0);
    finish(0.0);
    return result;
  }
  const double target = options.rtol * bnorm;

  std::vector<double> r(n);
  auto residual = [&]() {
    a.multiply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm2(r);
  };
  double beta = residual();
  report.residual_history.push_back(beta / bnorm);
  if (beta <= target) {
    report.converged = true;
    finish(beta);
    return result;
  }

  std::vector<std::vector<double>> v(restart + 1, std::vector<double>(n));
  std::vector<std::vector<double>> z(restart, std::vector<double>(n));
  std::vector<std::vector<double>> h(restart + 1, std::vector<double>(restart, 0.0));
  std::vector<double> cs(restart), sn(restart), g(restart + 1);
  std::vector<double> w(n);

  bool breakdown = false;
  while (report.iterations < options.max_iterations) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int cols = 0;
    for (int j = 0; j < restart && report.iterations < options.max_iterations; ++j) {
      m.apply(v[j], z[j]);
      a.multiply(z[j], w);
      // modified Gram-Schmidt with one reorthogonalization pass
      for (int i = 0; i <= j; ++i) h[i][j] = 0.0;
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const double c = dot(w, v[i]);
          h[i][j] += c;
          for (std::size_t k = 0; k < n; ++k) w[k] -= c * v[i][k];
        }
      const double hnext = norm2(w);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double rho = std::hypot(h[j][j], hnext);
      if (rho == 0.0) {
        breakdown = true;
        break;
      }
      cs[j] = h[j][j] / rho;
      sn[j] = hnext / rho;
      h[j][j] = rho;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++report.iterations;
      ++cols;
      report.residual_history.push_back(std::abs(g[j + 1]) / bnorm);
      if (hnext <= 1e-14 * rho) {
        breakdown = true;
        break;
      }
      for (std::size_t k = 0; k < n; ++k) v[j + 1][k] = w[k] / hnext;
      if (std::abs(g[j + 1]) <= target) break;
    }
    // x += Z y with H y = g (upper triangular)
    std::vector<double> y(cols);
    for (int i = cols - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < cols; ++k) s -= h[i][k] * y[k];
      y[i] = s / h[i][i];
    }
    for (int i = 0; i < cols; ++i)
      for (std::size_t k = 0; k < n; ++k) x[k] += y[i] * z[i][k];
    beta = residual();
    if (beta <= target) {
      report.converged = true;
      break;
    }
    if (breakdown || cols == 0) break;
  }
  finish(beta);
  return result;
}

double pd_probe(const SparseMatrix& a, int trials, std::uint64_t seed) {
  require(a.rows() == a.cols(), "pd_probe needs a square matrix");
  require(trials >= 1, "pd_probe needs at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(a.rows()), y(a.rows());
  double smallest = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    for (double& xi : x) xi = normal(rng);
    const double nrm = norm2(x);
    for (double& xi : x) xi /= nrm;
    a.multiply(x, y);
    smallest = std::min(smallest, dot(x, y));
  }
  return smallest;
}

void write_solver_csv(std::ostream& out, const SolverReport& report) {
  out << "iter,relres\n" << std::setprecision(10);
  for (std::size_t i = 0; i < report.residual_history.size(); ++i)
    out << i << ',' << report.residual_history[i] << '\n';
}

}  // namespace stfem

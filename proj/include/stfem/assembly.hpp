#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stfem/dofmap.hpp"
#include "stfem/geometry.hpp"
#include "stfem/mesh.hpp"
#include "stfem/reference_element.hpp"
#include "stfem/solver.hpp"
#include "stfem/sparse.hpp"

namespace stfem {

using ScalarFunction = std::function<double(const Point&)>;

/// lambda_K = theta h_K^2 per cell, or one global lambda (0 gives the
/// unstabilized Galerkin form).
struct StabilizationConfig {
  enum class Mode { PerElement, Global };
  Mode mode = Mode::PerElement;
  double theta = 0.1;
  double lambda = 0.0;

  static StabilizationConfig per_element(double theta) { return {Mode::PerElement, theta, 0.0}; }
  static StabilizationConfig global(double lambda) { return {Mode::Global, 0.0, lambda}; }

  std::vector<double> lambdas(const SpaceTimeMesh& mesh) const;
};

/// Inverse-inequality constant c_inv with ||lap_x w||_K <= c_inv h_K^-1 ||grad_x w||_K,
/// maximized over the element space on the Kuhn simplices and their
/// bisection descendants. Zero for k = 1. Cached per (d, k).
double estimate_inverse_constant(int spatial_dim, int degree);

/// theta = 0.1 for k = 1, otherwise 0.9 / c_inv^2.
double default_theta(int spatial_dim, int degree);

struct ProblemCoefficients {
  double varrho = 1.0;
  /// One value (constant nu) or one value per cell.
  std::vector<double> nu{1.0};

  double nu_on(Index cell) const { return nu.size() == 1 ? nu[0] : nu[cell]; }
  void validate(Index num_cells) const;
};

/// Local blocks of a_h on one cell, rows = test functions, columns = trial functions.
struct ElementBlocks {
  Eigen::MatrixXd yy;  // trial y, test v
  Eigen::MatrixXd yp;  // trial p, test v
  Eigen::MatrixXd py;  // trial y, test q
  Eigen::MatrixXd pp;  // trial p, test q
};

ElementBlocks element_matrix(const ElementGeometry& geometry, const ReferenceElement& element, double varrho,
                             double nu, double lambda);

/// Adjoint-test entries -int_K y_d (psi_n - lambda dt psi_n); the state-test part of l_h is zero.
Eigen::VectorXd element_load(const ElementGeometry& geometry, const ReferenceElement& element,
                             const ScalarFunction& target, double lambda);

/// Reference elements and dof maps of one discretization level.
struct FiniteElementSpaces {
  int degree;
  ReferenceElement matrix_element;  // quadrature exact to degree 2k
  ReferenceElement load_element;    // quadrature exact to degree max(2k, 6)
  DofMap state;
  DofMap adjoint;
};

FiniteElementSpaces make_spaces(const SpaceTimeMesh& mesh, int degree);

/// K_h (y_h, p_h) = (0, f_h) on the free dofs. Rows/columns [0, n_state) are
/// the state block, [n_state, n_state + n_adjoint) the adjoint block.
struct BlockSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  Index n_state = 0;
  Index n_adjoint = 0;
  std::vector<double> lambdas;  // per cell

  Index size() const { return n_state + n_adjoint; }
  std::span<const double> state_part(std::span<const double> x) const { return x.subspan(0, n_state); }
  std::span<const double> adjoint_part(std::span<const double> x) const { return x.subspan(n_state); }
};

BlockSystem assemble_system(const SpaceTimeMesh& mesh, const FiniteElementSpaces& spaces,
                            const ProblemCoefficients& coefficients, const StabilizationConfig& stabilization,
                            const ScalarFunction& target);

/// a_h(y, p; v, q) for discrete functions given by their free coefficients.
double bilinear_form(const BlockSystem& system, std::span<const double> y, std::span<const double> p,
                     std::span<const double> v, std::span<const double> q);

inline std::unique_ptr<Preconditioner> build_block_preconditioner(const BlockSystem& system,
                                                                  PreconditionerKind kind, int sweeps = 1) {
  return build_block_preconditioner(system.matrix, system.n_state, kind, sweeps);
}

}  // namespace stfem

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stfem/assembly.hpp"
#include "stfem/dofmap.hpp"
#include "stfem/mesh.hpp"
#include "stfem/reference_element.hpp"

namespace stfem {

/// Value, space-time gradient (time at index d) and spatial Laplacian of a field.
struct FieldSample {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  double laplacian_x = 0.0;
};

/// A function on the mesh, sampled at physical point `x` of `cell` whose
/// reference coordinates are `reference`. Discrete fields use the cell and
/// reference point; closed forms use only `x`.
using Field = std::function<FieldSample(Index cell, const Point& reference, const Point& x)>;

Field discrete_field(const SpaceTimeMesh& mesh, const DofMap& dofs, const ReferenceElement& element,
                     std::vector<double> nodal_values);
Field analytic_field(std::function<double(const Point&)> value,
                     std::function<Eigen::Vector3d(const Point&)> gradient,
                     std::function<double(const Point&)> laplacian_x = {});
Field difference(Field a, Field b);
Field scaled(Field a, double factor);
Field zero_field();

/// The six weighted constituents of ||(v, q)||_h^2.
struct NormHTerms {
  double state_trace = 0.0;    // varrho ||v(., T)||^2
  double state_grad = 0.0;     // varrho ||grad_x v||^2
  double state_dt = 0.0;       // varrho sum_K lambda_K ||dt v||_K^2
  double adjoint_trace = 0.0;  // ||q(., 0)||^2
  double adjoint_grad = 0.0;   // ||grad_x q||^2
  double adjoint_dt = 0.0;     // sum_K lambda_K ||dt q||_K^2

  double squared() const {
    return state_trace + state_grad + state_dt + adjoint_trace + adjoint_grad + adjoint_dt;
  }
  double value() const;
};

NormHTerms norm_h_terms(const SpaceTimeMesh& mesh, const Field& v, const Field& q, double varrho,
                        std::span<const double> lambdas, int quad_degree);
double norm_h(const SpaceTimeMesh& mesh, const Field& v, const Field& q, double varrho,
              std::span<const double> lambdas, int quad_degree);

/// ||(y,p)||_{h,*}; every lambda_K must be positive.
double norm_h_star(const SpaceTimeMesh& mesh, const Field& y, const Field& p, double varrho,
                   std::span<const double> lambdas, int quad_degree);

double l2_norm(const SpaceTimeMesh& mesh, const Field& f, int quad_degree);

struct CostValue {
  double tracking = 0.0;  // 1/2 ||y - y_d||^2
  double control = 0.0;   // varrho/2 ||u||^2
  double total() const { return tracking + control; }
};

CostValue cost_functional(const SpaceTimeMesh& mesh, const Field& y, const Field& u, const ScalarFunction& target,
                          double varrho, int quad_degree);

struct ResidualIndicator {
  std::vector<double> state;    // eta_{K,state}^2
  std::vector<double> adjoint;  // eta_{K,adjoint}^2
  std::vector<double> total;    // sum of both
  double sum() const;
};

/// Strong residuals of both optimality equations weighted by h_K^2 plus
/// spatial flux jumps over interior faces weighted by h_K.
ResidualIndicator residual_indicator(const SpaceTimeMesh& mesh, const FiniteElementSpaces& spaces,
                                     std::span<const double> state_values, std::span<const double> adjoint_values,
                                     const ScalarFunction& target, const ProblemCoefficients& coefficients);

/// Minimal set, greedy by descending eta^2 (ties: lower index first), carrying
/// at least theta of the total.
std::vector<Index> doerfler_mark(std::span<const double> eta2, double theta);

/// Smallest c with ||w||_{L2(Q)} <= c ||grad_x w||_{L2(Q)} over both discrete
/// spaces, from the generalized eigenproblem of the spatial stiffness and mass
/// matrices on the free dofs. Dense; meant for small meshes.
double estimate_friedrichs_constant(const SpaceTimeMesh& mesh, const FiniteElementSpaces& spaces);

/// One row of a convergence or adaptivity table.
struct ErrorReport {
  std::optional<NormHTerms> error_h;
  std::optional<double> l2_y;
  std::optional<double> l2_p;
  std::optional<double> l2_u;
  CostValue cost;
  std::optional<double> eta2;
};

}  // namespace stfem

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stfem/common.hpp"
#include "stfem/quadrature.hpp"

namespace stfem {

/// Nodal Lagrange P_k basis (k = 1, 2, 3) on the reference triangle or
/// tetrahedron, tabulated at a quadrature rule.
///
/// Node j sits at barycentric lattice point alpha_j / k, where alpha_j[0]
/// belongs to the origin vertex and alpha_j[i] to the unit vertex e_i.
/// Vertex nodes come first, in vertex order.
class ReferenceElement {
 public:
  ReferenceElement(int dim, int degree, int quad_degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(nodes_.size()); }

  std::span<const Point> nodes() const { return nodes_; }
  std::span<const std::array<int, 4>> node_indices() const { return node_indices_; }
  const QuadratureRule& quadrature() const { return quadrature_; }

  void values(const Point& xi, std::span<double> out) const;
  void gradients(const Point& xi, std::span<Eigen::Vector3d> out) const;
  void hessians(const Point& xi, std::span<Eigen::Matrix3d> out) const;

  // Tabulation at the quadrature points of quadrature().
  double value(std::size_t q, int j) const { return values_[q * num_basis() + j]; }
  const Eigen::Vector3d& gradient(std::size_t q, int j) const { return gradients_[q * num_basis() + j]; }
  const Eigen::Matrix3d& hessian(std::size_t q, int j) const { return hessians_[q * num_basis() + j]; }

 private:
  int dim_;
  int degree_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 4>> node_indices_;
  std::vector<std::array<int, 3>> exponents_;  // monomial basis
  Eigen::MatrixXd coefficients_;               // column j: monomial coefficients of basis j
  QuadratureRule quadrature_;
  std::vector<double> values_;
  std::vector<Eigen::Vector3d> gradients_;
  std::vector<Eigen::Matrix3d> hessians_;
};

}  // namespace stfem

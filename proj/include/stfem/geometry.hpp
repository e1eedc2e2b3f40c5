#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stfem/common.hpp"
#include "stfem/mesh.hpp"

namespace stfem {

/// Affine map x = origin + J xi from the reference simplex. For triangles
/// the 3x3 matrices carry an identity block in the unused third direction.
struct ElementGeometry {
  int simplex_dim = 0;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Matrix3d jacobian = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d inverse_transpose = Eigen::Matrix3d::Identity();
  double det = 0.0;
  double volume = 0.0;

  Point map(const Point& xi) const;
  Point to_reference(const Point& x) const;
  Eigen::Vector3d physical_gradient(const Eigen::Vector3d& ref_gradient) const {
    return inverse_transpose * ref_gradient;
  }
  Eigen::Matrix3d physical_hessian(const Eigen::Matrix3d& ref_hessian) const {
    return inverse_transpose * ref_hessian * inverse_transpose.transpose();
  }
};

/// Throws MeshError for a degenerate or negatively oriented simplex.
ElementGeometry element_geometry(std::span<const Point> vertices, int simplex_dim);
ElementGeometry element_geometry(const SpaceTimeMesh& mesh, Index cell);
std::vector<ElementGeometry> element_geometries(const SpaceTimeMesh& mesh);

/// Sum of the spatial second derivatives (the first `spatial_dim` diagonal entries).
inline double spatial_laplacian(const Eigen::Matrix3d& hessian, int spatial_dim) {
  double s = 0.0;
  for (int i = 0; i < spatial_dim; ++i) s += hessian(i, i);
  return s;
}

}  // namespace stfem

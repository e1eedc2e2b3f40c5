#include "stfem/geometry.hpp"

#include <cmath>
#include <string>

#include "stfem/quadrature.hpp"

namespace stfem {

Point ElementGeometry::map(const Point& xi) const {
  const Eigen::Vector3d x = origin + jacobian * Eigen::Vector3d(xi[0], xi[1], xi[2]);
  Point p{x[0], x[1], x[2]};
  if (simplex_dim == 2) p[2] = 0.0;
  return p;
}

Point ElementGeometry::to_reference(const Point& x) const {
  const Eigen::Vector3d xi = inverse_transpose.transpose() * (Eigen::Vector3d(x[0], x[1], x[2]) - origin);
  Point p{xi[0], xi[1], xi[2]};
  if (simplex_dim == 2) p[2] = 0.0;
  return p;
}

ElementGeometry element_geometry(std::span<const Point> vertices, int simplex_dim) {
  require(simplex_dim == 2 || simplex_dim == 3, "simplex dimension must be 2 or 3");
  require(static_cast<int>(vertices.size()) == simplex_dim + 1, "wrong number of simplex vertices");
  ElementGeometry g;
  g.simplex_dim = simplex_dim;
  g.origin = Eigen::Vector3d(vertices[0][0], vertices[0][1], vertices[0][2]);
  g.jacobian.setIdentity();
  double scale = 0.0;
  for (int i = 0; i < simplex_dim; ++i)
    for (int r = 0; r < simplex_dim; ++r) {
      g.jacobian(r, i) = vertices[i + 1][r] - vertices[0][r];
      scale = std::max(scale, std::abs(g.jacobian(r, i)));
    }
  g.det = g.jacobian.determinant();
  if (!(g.det > 1e-14 * std::pow(scale, simplex_dim)))
    throw MeshError("degenerate or inverted simplex (det = " + std::to_string(g.det) + ")");
  g.inverse_transpose = g.jacobian.inverse().transpose();
  g.volume = g.det * reference_volume(simplex_dim);
  return g;
}

ElementGeometry element_geometry(const SpaceTimeMesh& mesh, Index cell) {
  require(cell >= 0 && cell < mesh.num_cells(), "cell index out of range");
  std::array<Point, 4> v;
  const auto ids = mesh.cell_vertices(cell);
  for (std::size_t i = 0; i < ids.size(); ++i) v[i] = mesh.vertex(ids[i]);
  return element_geometry(std::span<const Point>(v.data(), ids.size()), mesh.simplex_dim());
}

std::vector<ElementGeometry> element_geometries(const SpaceTimeMesh& mesh) {
  std::vector<ElementGeometry> out;
  out.reserve(mesh.num_cells());
  for (Index c = 0; c < mesh.num_cells(); ++c) out.push_back(element_geometry(mesh, c));
  return out;
}

}  // namespace stfem

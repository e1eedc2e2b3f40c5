#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stfem/common.hpp"

namespace stfem {

enum class FaceTag : std::uint8_t { Interior, SigmaLateral, SigmaZero, SigmaT };

const char* to_string(FaceTag tag);

/// A simplex of the space-time mesh.
///
/// `vertices` is positively oriented (det of the edge matrix > 0) and is the
/// order used by all finite element code. `bisection_order` and `tag` carry
/// the Maubach refinement state: the refinement edge joins
/// bisection_order[0] and bisection_order[tag].
struct Cell {
  std::array<Index, 4> vertices{-1, -1, -1, -1};
  std::array<Index, 4> bisection_order{-1, -1, -1, -1};
  std::uint8_t tag = 0;
};

/// Codimension-one face. `cells[1]` is -1 on the boundary.
struct Face {
  std::array<Index, 3> vertices{-1, -1, -1};
  std::array<Index, 2> cells{-1, -1};
  FaceTag tag = FaceTag::Interior;
};

/// Conforming simplicial decomposition of Q = (0,1)^d x (0,T), d in {1,2}.
/// Immutable once constructed; refinement produces a new mesh.
class SpaceTimeMesh {
 public:
  /// Validates volumes, orients cells and derives the tagged face list.
  /// `origin` optionally records, per cell, the index of the parent cell in
  /// the mesh this one was refined from.
  SpaceTimeMesh(int spatial_dim, double final_time, std::vector<Point> vertices,
                std::vector<Cell> cells, std::vector<Index> origin = {});

  int spatial_dim() const { return spatial_dim_; }
  int simplex_dim() const { return spatial_dim_ + 1; }
  int vertices_per_cell() const { return spatial_dim_ + 2; }
  double final_time() const { return final_time_; }

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }

  std::span<const Point> vertices() const { return vertices_; }
  const Point& vertex(Index i) const { return vertices_[i]; }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const Index> cell_vertices(Index c) const {
    return std::span<const Index>(cells_[c].vertices.data(), vertices_per_cell());
  }
  std::span<const Face> faces() const { return faces_; }

  /// Parent index in the previous mesh, empty for generated meshes.
  std::span<const Index> origin() const { return origin_; }

  double cell_volume(Index c) const;
  /// Longest edge length of the cell.
  double cell_diameter(Index c) const;
  std::vector<double> cell_diameters() const;
  Point centroid(Index c) const;

  double time_of(const Point& p) const { return p[spatial_dim_]; }

  bool on_initial_plane(Index v) const;
  bool on_final_plane(Index v) const;
  bool on_lateral_boundary(Index v) const;

 private:
  void build_faces();

  int spatial_dim_;
  double final_time_;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<Index> origin_;
};

/// Kuhn subdivision of the uniform grid with n subdivisions per axis:
/// 2 triangles per square (d = 1), 6 tetrahedra per cube (d = 2).
SpaceTimeMesh build_structured_mesh(int spatial_dim, int n, double final_time);

/// Bisects every marked cell at least once and closes the result to a
/// conforming mesh. Indices outside the cell range are rejected.
SpaceTimeMesh refine(const SpaceTimeMesh& mesh, std::span<const Index> marked);

/// Bisects all cells simplex_dim() times, halving every cell diameter on
/// Kuhn meshes.
SpaceTimeMesh refine_uniform(const SpaceTimeMesh& mesh);

/// Maximum cell diameter h.
double mesh_size(const SpaceTimeMesh& mesh);

struct MeshAudit {
  bool positive_volumes = true;
  bool conforming = true;  // every face shared by 1 (boundary) or 2 cells, no hanging vertices
  bool tags_consistent = true;
  double total_volume = 0.0;
  std::string message;

  bool ok() const { return positive_volumes && conforming && tags_consistent; }
};

/// Exhaustive structural check; used by tests and after refinement in debug runs.
MeshAudit audit(const SpaceTimeMesh& mesh);

/// Nodal data attached to a VTK export (one value per mesh vertex).
struct PointData {
  std::string name;
  std::vector<double> values;
};

/// Legacy ASCII VTK unstructured grid (cell type 5 for triangles, 10 for tetrahedra).
void write_vtk(std::ostream& out, const SpaceTimeMesh& mesh,
               std::span<const PointData> point_data = {});
void write_vtk(const std::string& path, const SpaceTimeMesh& mesh,
               std::span<const PointData> point_data = {});

}  // namespace stfem

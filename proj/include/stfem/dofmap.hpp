#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stfem/common.hpp"
#include "stfem/mesh.hpp"
#include "stfem/reference_element.hpp"

namespace stfem {

/// StateY0h vanishes on the lateral boundary and at t = 0; AdjointPTh on the
/// lateral boundary and at t = T.
enum class SpaceKind { StateY0h, AdjointPTh };

const char* to_string(SpaceKind kind);

/// Continuous global numbering of the Lagrange nodes of a P_k space on a mesh,
/// plus the Dirichlet mask of one space kind. Free dofs are numbered
/// consecutively in global order.
class DofMap {
 public:
  DofMap(const SpaceTimeMesh& mesh, const ReferenceElement& element, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  int degree() const { return degree_; }
  int dofs_per_cell() const { return dofs_per_cell_; }
  Index num_cells() const { return num_cells_; }
  Index num_dofs() const { return static_cast<Index>(nodes_.size()); }
  Index num_free() const { return static_cast<Index>(free_to_global_.size()); }
  Index num_constrained() const { return num_dofs() - num_free(); }

  std::span<const Index> cell_dofs(Index cell) const {
    return std::span<const Index>(cell_dofs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell_,
                                  dofs_per_cell_);
  }
  bool is_constrained(Index dof) const { return free_index_[dof] < 0; }
  /// Position among the free dofs, or -1 for constrained dofs.
  Index free_index(Index dof) const { return free_index_[dof]; }
  std::span<const Index> free_dofs() const { return free_to_global_; }
  std::span<const Point> nodes() const { return nodes_; }
  /// Dof sitting at each mesh vertex.
  std::span<const Index> vertex_dofs() const { return vertex_dofs_; }

  /// Full nodal vector from free values, zero on constrained dofs.
  std::vector<double> expand(std::span<const double> free_values) const;
  std::vector<double> restrict_to_free(std::span<const double> values) const;

  bool matches(const SpaceTimeMesh& mesh) const {
    return mesh.num_cells() == num_cells_ && mesh.num_vertices() == num_vertices_;
  }

 private:
  SpaceKind kind_;
  int degree_;
  int dofs_per_cell_;
  Index num_cells_;
  Index num_vertices_;
  std::vector<Index> cell_dofs_;
  std::vector<Point> nodes_;
  std::vector<Index> free_index_;
  std::vector<Index> free_to_global_;
  std::vector<Index> vertex_dofs_;
};

DofMap build_dofmap(const SpaceTimeMesh& mesh, const ReferenceElement& element, SpaceKind kind);

/// Nodal interpolant over all dofs (constraints ignored).
std::vector<double> interpolate(const DofMap& dofs, const std::function<double(const Point&)>& f);

}  // namespace stfem

#include "stfem/dofmap.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace stfem {

const char* to_string(SpaceKind kind) {
  return kind == SpaceKind::StateY0h ? "StateY0h" : "AdjointPTh";
}

DofMap::DofMap(const SpaceTimeMesh& mesh, const ReferenceElement& element, SpaceKind kind)
    : kind_(kind),
      degree_(element.degree()),
      dofs_per_cell_(element.num_basis()),
      num_cells_(mesh.num_cells()),
      num_vertices_(mesh.num_vertices()) {
  require(element.dim() == mesh.simplex_dim(), "reference element dimension does not match the mesh");
  const int nv = mesh.vertices_per_cell();
  const auto lattice = element.node_indices();

  // A node is identified by its support vertices and their lattice weights.
  using Key = std::array<Index, 8>;
  std::map<Key, Index> numbering;
  std::vector<std::vector<Index>> supports;
  cell_dofs_.resize(static_cast<std::size_t>(num_cells_) * dofs_per_cell_);
  vertex_dofs_.assign(num_vertices_, -1);

  for (Index c = 0; c < num_cells_; ++c) {
    const auto verts = mesh.cell_vertices(c);
    for (int j = 0; j < dofs_per_cell_; ++j) {
      std::array<std::pair<Index, Index>, 4> pairs;
      int count = 0;
      for (int i = 0; i < nv; ++i)
        if (lattice[j][i] > 0) pairs[count++] = {verts[i], lattice[j][i]};
      std::sort(pairs.begin(), pairs.begin() + count);
      Key key;
      key.fill(-1);
      for (int i = 0; i < count; ++i) {
        key[2 * i] = pairs[i].first;
        key[2 * i + 1] = pairs[i].second;
      }
      const auto [it, inserted] = numbering.try_emplace(key, static_cast<Index>(nodes_.size()));
      if (inserted) {
        Point x{0.0, 0.0, 0.0};
        std::vector<Index> support;
        for (int i = 0; i < count; ++i) {
          const Point& v = mesh.vertex(pairs[i].first);
          for (int r = 0; r < 3; ++r) x[r] += v[r] * pairs[i].second / degree_;
          support.push_back(pairs[i].first);
        }
        nodes_.push_back(x);
        supports.push_back(std::move(support));
        if (count == 1) vertex_dofs_[pairs[0].first] = it->second;
      }
      cell_dofs_[static_cast<std::size_t>(c) * dofs_per_cell_ + j] = it->second;
    }
  }

  // A node lies on a box face iff all of its support vertices do.
  auto all_of_support = [&](const std::vector<Index>& s, auto&& pred) {
    return std::all_of(s.begin(), s.end(), pred);
  };
  free_index_.assign(nodes_.size(), -1);
  for (Index n = 0; n < num_dofs(); ++n) {
    const auto& s = supports[n];
    bool lateral = false;
    for (int axis = 0; axis < mesh.spatial_dim() && !lateral; ++axis)
      for (double value : {0.0, 1.0})
        lateral = lateral || all_of_support(s, [&](Index v) {
                    return std::abs(mesh.vertex(v)[axis] - value) <= 1e-12;
                  });
    const bool temporal =
        kind_ == SpaceKind::StateY0h
            ? all_of_support(s, [&](Index v) { return mesh.on_initial_plane(v); })
            : all_of_support(s, [&](Index v) { return mesh.on_final_plane(v); });
    if (!(lateral || temporal)) {
      free_index_[n] = static_cast<Index>(free_to_global_.size());
      free_to_global_.push_back(n);
    }
  }
}

std::vector<double> DofMap::expand(std::span<const double> free_values) const {
  require(static_cast<Index>(free_values.size()) == num_free(), "free vector has wrong length");
  std::vector<double> full(nodes_.size(), 0.0);
  for (Index i = 0; i < num_free(); ++i) full[free_to_global_[i]] = free_values[i];
  return full;
}

std::vector<double> DofMap::restrict_to_free(std::span<const double> values) const {
  require(static_cast<Index>(values.size()) == num_dofs(), "nodal vector has wrong length");
  std::vector<double> out(free_to_global_.size());
  for (Index i = 0; i < num_free(); ++i) out[i] = values[free_to_global_[i]];
  return out;
}

DofMap build_dofmap(const SpaceTimeMesh& mesh, const ReferenceElement& element, SpaceKind kind) {
  return DofMap(mesh, element, kind);
}

std::vector<double> interpolate(const DofMap& dofs, const std::function<double(const Point&)>& f) {
  std::vector<double> values(dofs.num_dofs());
  for (Index i = 0; i < dofs.num_dofs(); ++i) values[i] = f(dofs.nodes()[i]);
  return values;
}

}  // namespace stfem

#include "stfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace stfem {

namespace {

constexpr double kPlaneTolerance = 1e-12;

// Signed determinant of the edge matrix [x_1 - x_0, ..., x_D - x_0].
double signed_measure(const std::vector<Point>& vertices, std::span<const Index> v, int simplex_dim) {
  const Point& x0 = vertices[v[0]];
  double e[3][3] = {};
  for (int i = 0; i < simplex_dim; ++i)
    for (int r = 0; r < simplex_dim; ++r) e[r][i] = vertices[v[i + 1]][r] - x0[r];
  if (simplex_dim == 2) return e[0][0] * e[1][1] - e[0][1] * e[1][0];
  return e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
         e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
         e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double grid_coordinate(int j, int n, double length) { return j == n ? length : length * j / n; }

}  // namespace

const char* to_string(FaceTag tag) {
  switch (tag) {
    case FaceTag::Interior: return "Interior";
    case FaceTag::SigmaLateral: return "SigmaLateral";
    case FaceTag::SigmaZero: return "SigmaZero";
    case FaceTag::SigmaT: return "SigmaT";
  }
  return "?";
}

SpaceTimeMesh::SpaceTimeMesh(int spatial_dim, double final_time, std::vector<Point> vertices,
                             std::vector<Cell> cells, std::vector<Index> origin)
    : spatial_dim_(spatial_dim),
      final_time_(final_time),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      origin_(std::move(origin)) {
  require(spatial_dim == 1 || spatial_dim == 2, "spatial dimension must be 1 or 2");
  require(final_time > 0.0, "final time must be positive");
  require(origin_.empty() || origin_.size() == cells_.size(), "origin map size mismatch");
  const int dim = simplex_dim();
  const int nv = vertices_per_cell();
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    Cell& cell = cells_[c];
    if (cell.tag == 0) cell.tag = static_cast<std::uint8_t>(dim);
    for (int i = 0; i < nv; ++i) {
      const Index v = cell.bisection_order[i];
      if (v < 0 || v >= num_vertices())
        throw MeshError("cell " + std::to_string(c) + " references vertex out of range");
    }
    cell.vertices = cell.bisection_order;
    const double det =
        signed_measure(vertices_, std::span<const Index>(cell.vertices.data(), nv), dim);
    if (std::abs(det) <= 1e-300 || !std::isfinite(det))
      throw MeshError("cell " + std::to_string(c) + " is degenerate");
    if (det < 0.0) std::swap(cell.vertices[nv - 2], cell.vertices[nv - 1]);
  }
  build_faces();
}

bool SpaceTimeMesh::on_initial_plane(Index v) const {
  return std::abs(time_of(vertices_[v])) <= kPlaneTolerance * final_time_;
}

bool SpaceTimeMesh::on_final_plane(Index v) const {
  return std::abs(time_of(vertices_[v]) - final_time_) <= kPlaneTolerance * final_time_;
}

bool SpaceTimeMesh::on_lateral_boundary(Index v) const {
  for (int i = 0; i < spatial_dim_; ++i) {
    const double x = vertices_[v][i];
    if (std::abs(x) <= kPlaneTolerance || std::abs(x - 1.0) <= kPlaneTolerance) return true;
  }
  return false;
}

void SpaceTimeMesh::build_faces() {
  const int dim = simplex_dim();
  const int nv = vertices_per_cell();
  struct Entry {
    std::array<Index, 3> key;
    Index cell;
  };
  std::vector<Entry> entries;
  entries.reserve(cells_.size() * nv);
  for (Index c = 0; c < num_cells(); ++c) {
    for (int skip = 0; skip < nv; ++skip) {
      Entry e{{-1, -1, -1}, c};
      int k = 0;
      for (int i = 0; i < nv; ++i)
        if (i != skip) e.key[k++] = cells_[c].vertices[i];
      std::sort(e.key.begin(), e.key.begin() + dim);
      entries.push_back(e);
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.cell < b.cell;
  });
  faces_.clear();
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i > 2) throw MeshError("face shared by more than two cells");
    Face f;
    f.vertices = entries[i].key;
    f.cells[0] = entries[i].cell;
    if (j - i == 2) {
      f.cells[1] = entries[i + 1].cell;
      f.tag = FaceTag::Interior;
    } else {
      bool all_zero = true, all_final = true;
      for (int k = 0; k < dim; ++k) {
        all_zero = all_zero && on_initial_plane(f.vertices[k]);
        all_final = all_final && on_final_plane(f.vertices[k]);
      }
      f.tag = all_zero ? FaceTag::SigmaZero : all_final ? FaceTag::SigmaT : FaceTag::SigmaLateral;
    }
    faces_.push_back(f);
    i = j;
  }
}

double SpaceTimeMesh::cell_volume(Index c) const {
  const int dim = simplex_dim();
  return signed_measure(vertices_, cell_vertices(c), dim) / factorial(dim);
}

double SpaceTimeMesh::cell_diameter(Index c) const {
  const auto v = cell_vertices(c);
  double longest = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r) {
        const double d = vertices_[v[i]][r] - vertices_[v[j]][r];
        s += d * d;
      }
      longest = std::max(longest, s);
    }
  return std::sqrt(longest);
}

std::vector<double> SpaceTimeMesh::cell_diameters() const {
  std::vector<double> h(cells_.size());
  for (Index c = 0; c < num_cells(); ++c) h[c] = cell_diameter(c);
  return h;
}

Point SpaceTimeMesh::centroid(Index c) const {
  Point p{0.0, 0.0, 0.0};
  const auto v = cell_vertices(c);
  for (Index i : v)
    for (int r = 0; r < 3; ++r) p[r] += vertices_[i][r];
  for (double& x : p) x /= static_cast<double>(v.size());
  return p;
}

SpaceTimeMesh build_structured_mesh(int spatial_dim, int n, double final_time) {
  require(spatial_dim == 1 || spatial_dim == 2, "spatial dimension must be 1 or 2");
  require(n >= 1, "number of subdivisions must be at least 1");
  require(final_time > 0.0, "final time must be positive");
  const int dim = spatial_dim + 1;
  const int np = n + 1;

  std::vector<Point> vertices;
  auto vertex_id = [&](const std::array<int, 3>& ijk) {
    Index id = 0;
    for (int r = dim - 1; r >= 0; --r) id = id * np + ijk[r];
    return id;
  };
  const Index nvert = dim == 2 ? np * np : np * np * np;
  vertices.resize(nvert);
  std::array<int, 3> ijk{0, 0, 0};
  for (Index id = 0; id < nvert; ++id) {
    Index rest = id;
    for (int r = 0; r < dim; ++r) {
      ijk[r] = rest % np;
      rest /= np;
    }
    Point p{0.0, 0.0, 0.0};
    for (int r = 0; r < spatial_dim; ++r) p[r] = grid_coordinate(ijk[r], n, 1.0);
    p[spatial_dim] = grid_coordinate(ijk[spatial_dim], n, final_time);
    vertices[vertex_id(ijk)] = p;
  }

  std::array<int, 3> axes{0, 1, 2};
  std::vector<std::array<int, 3>> permutations;
  do {
    permutations.push_back(axes);
  } while (std::next_permutation(axes.begin(), axes.begin() + dim));

  std::vector<Cell> cells;
  const Index ncubes = dim == 2 ? n * n : n * n * n;
  cells.reserve(static_cast<std::size_t>(ncubes) * permutations.size());
  for (Index cube = 0; cube < ncubes; ++cube) {
    std::array<int, 3> corner{0, 0, 0};
    Index rest = cube;
    for (int r = 0; r < dim; ++r) {
      corner[r] = rest % n;
      rest /= n;
    }
    for (const auto& perm : permutations) {
      Cell cell;
      std::array<int, 3> p = corner;
      cell.bisection_order[0] = vertex_id(p);
      for (int s = 0; s < dim; ++s) {
        ++p[perm[s]];
        cell.bisection_order[s + 1] = vertex_id(p);
      }
      cell.tag = static_cast<std::uint8_t>(dim);
      cells.push_back(cell);
    }
  }
  return SpaceTimeMesh(spatial_dim, final_time, std::move(vertices), std::move(cells));
}

SpaceTimeMesh refine(const SpaceTimeMesh& mesh, std::span<const Index> marked) {
  const int dim = mesh.simplex_dim();
  std::vector<Point> vertices(mesh.vertices().begin(), mesh.vertices().end());
  std::vector<Cell> cells(mesh.cells().begin(), mesh.cells().end());
  std::vector<Index> origin(cells.size());
  std::iota(origin.begin(), origin.end(), Index{0});

  std::vector<char> flagged(cells.size(), 0);
  for (Index m : marked) {
    require(m >= 0 && m < mesh.num_cells(), "marked cell index out of range");
    flagged[m] = 1;
  }

  std::unordered_map<std::uint64_t, Index> midpoints;
  auto midpoint = [&](Index a, Index b) {
    const auto [it, inserted] = midpoints.try_emplace(edge_key(a, b), static_cast<Index>(vertices.size()));
    if (inserted) {
      Point z;
      for (int r = 0; r < 3; ++r) z[r] = 0.5 * (vertices[a][r] + vertices[b][r]);
      vertices.push_back(z);
    }
    return it->second;
  };

  while (std::find(flagged.begin(), flagged.end(), 1) != flagged.end()) {
    std::vector<Cell> next;
    std::vector<Index> next_origin;
    next.reserve(cells.size() * 2);
    next_origin.reserve(cells.size() * 2);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!flagged[c]) {
        next.push_back(cells[c]);
        next_origin.push_back(origin[c]);
        continue;
      }
      const auto& v = cells[c].bisection_order;
      const int k = cells[c].tag;
      const Index z = midpoint(v[0], v[k]);
      const auto child_tag = static_cast<std::uint8_t>(k > 1 ? k - 1 : dim);
      Cell first, second;
      first.tag = second.tag = child_tag;
      for (int i = 0; i < k; ++i) first.bisection_order[i] = v[i];
      for (int i = 0; i < k; ++i) second.bisection_order[i] = v[i + 1];
      first.bisection_order[k] = second.bisection_order[k] = z;
      for (int i = k + 1; i <= dim; ++i) first.bisection_order[i] = second.bisection_order[i] = v[i];
      next.push_back(first);
      next.push_back(second);
      next_origin.push_back(origin[c]);
      next_origin.push_back(origin[c]);
    }
    cells = std::move(next);
    origin = std::move(next_origin);

    // Closure: any cell still containing a bisected edge has a hanging vertex.
    flagged.assign(cells.size(), 0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& v = cells[c].bisection_order;
      for (int i = 0; i <= dim && !flagged[c]; ++i)
        for (int j = i + 1; j <= dim; ++j)
          if (midpoints.count(edge_key(v[i], v[j]))) {
            flagged[c] = 1;
            break;
          }
    }
  }
  return SpaceTimeMesh(mesh.spatial_dim(), mesh.final_time(), std::move(vertices), std::move(cells),
                       std::move(origin));
}

SpaceTimeMesh refine_uniform(const SpaceTimeMesh& mesh) {
  SpaceTimeMesh current = mesh;
  for (int round = 0; round < mesh.simplex_dim(); ++round) {
    std::vector<Index> all(current.num_cells());
    std::iota(all.begin(), all.end(), Index{0});
    current = refine(current, all);
  }
  return current;
}

double mesh_size(const SpaceTimeMesh& mesh) {
  require(mesh.num_cells() > 0, "mesh is empty");
  double h = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) h = std::max(h, mesh.cell_diameter(c));
  return h;
}

MeshAudit audit(const SpaceTimeMesh& mesh) {
  MeshAudit result;
  std::ostringstream msg;
  const int dim = mesh.simplex_dim();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const double vol = mesh.cell_volume(c);
    if (!(vol > 0.0)) {
      result.positive_volumes = false;
      msg << "cell " << c << " has non-positive volume; ";
    }
    result.total_volume += vol;
  }
  const double expected = mesh.final_time();
  if (std::abs(result.total_volume - expected) > 1e-12 * expected) {
    result.conforming = false;
    msg << "total volume " << result.total_volume << " != " << expected << "; ";
  }

  auto on_common_plane = [&](const Face& f) {
    for (int axis = 0; axis < mesh.spatial_dim(); ++axis)
      for (double value : {0.0, 1.0}) {
        bool all = true;
        for (int k = 0; k < dim; ++k)
          all = all && std::abs(mesh.vertex(f.vertices[k])[axis] - value) <= kPlaneTolerance;
        if (all) return true;
      }
    bool zero = true, final = true;
    for (int k = 0; k < dim; ++k) {
      zero = zero && mesh.on_initial_plane(f.vertices[k]);
      final = final && mesh.on_final_plane(f.vertices[k]);
    }
    return zero || final;
  };

  for (const Face& f : mesh.faces()) {
    if (f.tag == FaceTag::Interior) {
      if (f.cells[1] < 0) result.conforming = false;
      continue;
    }
    if (!on_common_plane(f)) {
      result.conforming = false;
      msg << "boundary face with vertex " << f.vertices[0] << " is not on the domain boundary; ";
    }
    bool zero = true, final = true, touches_zero = false, touches_final = false;
    for (int k = 0; k < dim; ++k) {
      zero = zero && mesh.on_initial_plane(f.vertices[k]);
      final = final && mesh.on_final_plane(f.vertices[k]);
      touches_zero = touches_zero || mesh.on_initial_plane(f.vertices[k]);
      touches_final = touches_final || mesh.on_final_plane(f.vertices[k]);
    }
    const FaceTag expected_tag =
        zero ? FaceTag::SigmaZero : final ? FaceTag::SigmaT : FaceTag::SigmaLateral;
    if (f.tag != expected_tag || (touches_zero && f.tag == FaceTag::SigmaT) ||
        (touches_final && f.tag == FaceTag::SigmaZero)) {
      result.tags_consistent = false;
      msg << "face tag " << to_string(f.tag) << " inconsistent; ";
    }
  }
  result.message = msg.str();
  return result;
}

void write_vtk(std::ostream& out, const SpaceTimeMesh& mesh, std::span<const PointData> point_data) {
  const int nv = mesh.vertices_per_cell();
  out << "# vtk DataFile Version 3.0\n"
      << "space-time mesh d=" << mesh.spatial_dim() << "\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n" << std::setprecision(16);
  for (const Point& p : mesh.vertices()) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  out << "CELLS " << mesh.num_cells() << ' ' << static_cast<long>(mesh.num_cells()) * (nv + 1) << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    out << nv;
    for (Index v : mesh.cell_vertices(c)) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  const int type = nv == 3 ? 5 : 10;
  for (Index c = 0; c < mesh.num_cells(); ++c) out << type << '\n';
  if (point_data.empty()) return;
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  for (const PointData& data : point_data) {
    if (static_cast<Index>(data.values.size()) != mesh.num_vertices())
      throw std::invalid_argument("point data '" + data.name + "' has wrong length");
    out << "SCALARS " << data.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : data.values) out << v << '\n';
  }
}

void write_vtk(const std::string& path, const SpaceTimeMesh& mesh, std::span<const PointData> point_data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_vtk(out, mesh, point_data);
}

}  // namespace stfem

#include "stfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace stfem {

namespace {

// Per-quadrature-point physical quantities of every basis function.
struct BasisAtPoint {
  std::vector<double> value;
  std::vector<Eigen::Vector3d> grad_x;  // time component zeroed
  std::vector<double> dt;
  std::vector<double> lap_x;
};

void pull_back(const ElementGeometry& g, const ReferenceElement& e, std::size_t q, BasisAtPoint& out) {
  const int n = e.num_basis();
  const int d = g.simplex_dim - 1;
  out.value.resize(n);
  out.grad_x.resize(n);
  out.dt.resize(n);
  out.lap_x.resize(n);
  for (int j = 0; j < n; ++j) {
    out.value[j] = e.value(q, j);
    Eigen::Vector3d grad = g.physical_gradient(e.gradient(q, j));
    out.dt[j] = grad[d];
    for (int r = d; r < 3; ++r) grad[r] = 0.0;
    out.grad_x[j] = grad;
    out.lap_x[j] = e.degree() >= 2 ? spatial_laplacian(g.physical_hessian(e.hessian(q, j)), d) : 0.0;
  }
}

}  // namespace

std::vector<double> StabilizationConfig::lambdas(const SpaceTimeMesh& mesh) const {
  if (mode == Mode::Global) {
    require(lambda >= 0.0, "global stabilization parameter must be non-negative");
    return std::vector<double>(mesh.num_cells(), lambda);
  }
  require(theta > 0.0, "stabilization scale theta must be positive");
  std::vector<double> out = mesh.cell_diameters();
  for (double& h : out) h = theta * h * h;
  return out;
}

double estimate_inverse_constant(int spatial_dim, int degree) {
  require(spatial_dim == 1 || spatial_dim == 2, "spatial dimension must be 1 or 2");
  require(degree >= 1 && degree <= 3, "polynomial degree must be 1, 2 or 3");
  if (degree == 1) return 0.0;
  static std::mutex mutex;
  static std::map<std::pair<int, int>, double> cache;
  std::lock_guard lock(mutex);
  if (const auto it = cache.find({spatial_dim, degree}); it != cache.end()) return it->second;

  const ReferenceElement element(spatial_dim + 1, degree, 2 * degree);
  const int n = element.num_basis();
  double worst = 0.0;
  SpaceTimeMesh mesh = build_structured_mesh(spatial_dim, 1, 1.0);
  for (int round = 0; round <= spatial_dim + 1; ++round) {
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      const ElementGeometry g = element_geometry(mesh, c);
      Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
      Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, n);
      BasisAtPoint b;
      for (std::size_t q = 0; q < element.quadrature().size(); ++q) {
        pull_back(g, element, q, b);
        const double w = element.quadrature().weights[q] * g.det;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            lap(i, j) += w * b.lap_x[i] * b.lap_x[j];
            grad(i, j) += w * b.grad_x[i].dot(b.grad_x[j]);
          }
      }
      // max of w^T lap w / w^T grad w on the complement of ker(grad)
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(grad);
      const double cutoff = 1e-10 * eig.eigenvalues().maxCoeff();
      std::vector<int> keep;
      for (int i = 0; i < n; ++i)
        if (eig.eigenvalues()[i] > cutoff) keep.push_back(i);
      Eigen::MatrixXd z(n, keep.size());
      for (std::size_t k = 0; k < keep.size(); ++k)
        z.col(k) = eig.eigenvectors().col(keep[k]) / std::sqrt(eig.eigenvalues()[keep[k]]);
      const Eigen::MatrixXd reduced = z.transpose() * lap * z;
      const double mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(reduced).eigenvalues().maxCoeff();
      const double h = mesh.cell_diameter(c);
      worst = std::max(worst, h * h * mu);
    }
    std::vector<Index> all(mesh.num_cells());
    std::iota(all.begin(), all.end(), Index{0});
    mesh = refine(mesh, all);
  }
  const double c_inv = std::sqrt(worst);
  cache[{spatial_dim, degree}] = c_inv;
  return c_inv;
}

double default_theta(int spatial_dim, int degree) {
  if (degree == 1) return 0.1;
  const double c_inv = estimate_inverse_constant(spatial_dim, degree);
  return 0.9 / (c_inv * c_inv);
}

void ProblemCoefficients::validate(Index num_cells) const {
  require(varrho > 0.0, "regularization parameter must be positive");
  require(nu.size() == 1 || static_cast<Index>(nu.size()) == num_cells,
          "nu must be constant or given per cell");
  for (double v : nu) require(v > 0.0 && std::isfinite(v), "nu must be positive");
}

ElementBlocks element_matrix(const ElementGeometry& geometry, const ReferenceElement& element, double varrho,
                             double nu, double lambda) {
  require(lambda >= 0.0, "stabilization parameter must be non-negative");
  require(geometry.simplex_dim == element.dim(), "element dimension mismatch");
  if (!(geometry.det > 0.0)) throw MeshError("degenerate element");
  const int n = element.num_basis();
  ElementBlocks blocks{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                       Eigen::MatrixXd::Zero(n, n)};
  BasisAtPoint b;
  for (std::size_t q = 0; q < element.quadrature().size(); ++q) {
    pull_back(geometry, element, q, b);
    const double w = element.quadrature().weights[q] * geometry.det;
    for (int i = 0; i < n; ++i) {
      const double v = b.value[i];
      const double dtv = b.dt[i];
      for (int j = 0; j < n; ++j) {
        const double stiff = nu * b.grad_x[j].dot(b.grad_x[i]);
        blocks.yy(i, j) += w * varrho *
                           (b.dt[j] * v + lambda * b.dt[j] * dtv + stiff - lambda * nu * b.lap_x[j] * dtv);
        blocks.yp(i, j) += w * b.value[j] * (v + lambda * dtv);
        blocks.py(i, j) -= w * b.value[j] * (v - lambda * dtv);
        blocks.pp(i, j) += w * (-b.dt[j] * v + lambda * b.dt[j] * dtv + stiff + lambda * nu * b.lap_x[j] * dtv);
      }
    }
  }
  return blocks;
}

Eigen::VectorXd element_load(const ElementGeometry& geometry, const ReferenceElement& element,
                             const ScalarFunction& target, double lambda) {
  require(lambda >= 0.0, "stabilization parameter must be non-negative");
  const int n = element.num_basis();
  const int d = geometry.simplex_dim - 1;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
  for (std::size_t q = 0; q < element.quadrature().size(); ++q) {
    const double yd = target(geometry.map(element.quadrature().points[q]));
    if (yd == 0.0) continue;
    const double w = element.quadrature().weights[q] * geometry.det;
    for (int i = 0; i < n; ++i) {
      const double dt = geometry.physical_gradient(element.gradient(q, i))[d];
      load[i] -= w * yd * (element.value(q, i) - lambda * dt);
    }
  }
  return load;
}

FiniteElementSpaces make_spaces(const SpaceTimeMesh& mesh, int degree) {
  ReferenceElement matrix_element(mesh.simplex_dim(), degree, 2 * degree);
  ReferenceElement load_element(mesh.simplex_dim(), degree, std::max(2 * degree, 6));
  DofMap state(mesh, matrix_element, SpaceKind::StateY0h);
  DofMap adjoint(mesh, matrix_element, SpaceKind::AdjointPTh);
  return FiniteElementSpaces{degree, std::move(matrix_element), std::move(load_element), std::move(state),
                             std::move(adjoint)};
}

BlockSystem assemble_system(const SpaceTimeMesh& mesh, const FiniteElementSpaces& spaces,
                            const ProblemCoefficients& coefficients, const StabilizationConfig& stabilization,
                            const ScalarFunction& target) {
  if (!spaces.state.matches(mesh) || !spaces.adjoint.matches(mesh))
    throw MeshError("dof maps were built for a different mesh");
  if (spaces.state.degree() != spaces.degree || spaces.adjoint.degree() != spaces.degree)
    throw MeshError("dof maps and reference element disagree on the degree");
  coefficients.validate(mesh.num_cells());

  BlockSystem system;
  system.n_state = spaces.state.num_free();
  system.n_adjoint = spaces.adjoint.num_free();
  system.lambdas = stabilization.lambdas(mesh);
  const Index size = system.size();
  const int nloc = spaces.state.dofs_per_cell();

  // Local-to-system index maps; -1 marks eliminated Dirichlet dofs.
  auto local_indices = [&](Index c, std::vector<Index>& ys, std::vector<Index>& ps) {
    const auto dofs_y = spaces.state.cell_dofs(c);
    const auto dofs_p = spaces.adjoint.cell_dofs(c);
    for (int j = 0; j < nloc; ++j) {
      const Index fy = spaces.state.free_index(dofs_y[j]);
      const Index fp = spaces.adjoint.free_index(dofs_p[j]);
      ys[j] = fy;
      ps[j] = fp < 0 ? -1 : system.n_state + fp;
    }
  };

  std::vector<std::vector<Index>> pattern(size);
  std::vector<Index> ys(nloc), ps(nloc), all;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    local_indices(c, ys, ps);
    all.clear();
    for (int j = 0; j < nloc; ++j) {
      if (ys[j] >= 0) all.push_back(ys[j]);
      if (ps[j] >= 0) all.push_back(ps[j]);
    }
    for (Index r : all) pattern[r].insert(pattern[r].end(), all.begin(), all.end());
  }
  std::vector<Index> offsets{0}, cols;
  for (auto& row : pattern) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    cols.insert(cols.end(), row.begin(), row.end());
    offsets.push_back(static_cast<Index>(cols.size()));
    row = {};
  }
  const std::size_t nnz = cols.size();
  system.matrix = SparseMatrix(size, size, std::move(offsets), std::move(cols), std::vector<double>(nnz, 0.0));
  system.rhs.assign(size, 0.0);

  auto values = system.matrix.values();
  auto add = [&](Index r, Index c, double v) { values[system.matrix.find(r, c)] += v; };
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    local_indices(c, ys, ps);
    const ElementGeometry g = element_geometry(mesh, c);
    const double lambda = system.lambdas[c];
    const ElementBlocks k = element_matrix(g, spaces.matrix_element, coefficients.varrho,
                                           coefficients.nu_on(c), lambda);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j) {
        if (ys[i] >= 0 && ys[j] >= 0) add(ys[i], ys[j], k.yy(i, j));
        if (ys[i] >= 0 && ps[j] >= 0) add(ys[i], ps[j], k.yp(i, j));
        if (ps[i] >= 0 && ys[j] >= 0) add(ps[i], ys[j], k.py(i, j));
        if (ps[i] >= 0 && ps[j] >= 0) add(ps[i], ps[j], k.pp(i, j));
      }
    const Eigen::VectorXd f = element_load(g, spaces.load_element, target, lambda);
    for (int i = 0; i < nloc; ++i)
      if (ps[i] >= 0) system.rhs[ps[i]] += f[i];
  }
  return system;
}

double bilinear_form(const BlockSystem& system, std::span<const double> y, std::span<const double> p,
                     std::span<const double> v, std::span<const double> q) {
  require(static_cast<Index>(y.size()) == system.n_state && static_cast<Index>(v.size()) == system.n_state &&
              static_cast<Index>(p.size()) == system.n_adjoint && static_cast<Index>(q.size()) == system.n_adjoint,
          "coefficient vectors do not match the block sizes");
  std::vector<double> trial(y.begin(), y.end());
  trial.insert(trial.end(), p.begin(), p.end());
  std::vector<double> test(v.begin(), v.end());
  test.insert(test.end(), q.begin(), q.end());
  return dot(test, system.matrix.multiply(trial));
}

}  // namespace stfem

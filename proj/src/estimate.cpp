#include "stfem/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "stfem/geometry.hpp"
#include "stfem/quadrature.hpp"

namespace stfem {

namespace {

struct FaceFrame {
  std::array<Point, 3> vertices;
  double jacobian = 0.0;     // physical measure / reference measure
  Eigen::Vector3d normal;    // unit space-time normal
};

FaceFrame face_frame(const SpaceTimeMesh& mesh, const Face& face) {
  const int dim = mesh.simplex_dim();
  FaceFrame f;
  for (int i = 0; i < dim; ++i) f.vertices[i] = mesh.vertex(face.vertices[i]);
  auto edge = [&](int i) {
    return Eigen::Vector3d(f.vertices[i][0] - f.vertices[0][0], f.vertices[i][1] - f.vertices[0][1],
                           f.vertices[i][2] - f.vertices[0][2]);
  };
  if (dim == 2) {
    const Eigen::Vector3d e = edge(1);
    f.jacobian = e.norm();
    f.normal = Eigen::Vector3d(e[1], -e[0], 0.0) / f.jacobian;
  } else {
    const Eigen::Vector3d c = edge(1).cross(edge(2));
    f.jacobian = c.norm();
    f.normal = c / f.jacobian;
  }
  return f;
}

Point face_point(const FaceFrame& f, int dim, const Point& s) {
  Point x = f.vertices[0];
  for (int i = 1; i < dim; ++i)
    for (int r = 0; r < 3; ++r) x[r] += s[i - 1] * (f.vertices[i][r] - f.vertices[0][r]);
  return x;
}

// Integrates integrand(cell, geometry, ref, x, weight) over all cells.
template <class F>
void for_each_cell_point(const SpaceTimeMesh& mesh, const QuadratureRule& rule, F&& integrand) {
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const ElementGeometry g = element_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& xi = rule.points[q];
      integrand(c, xi, g.map(xi), rule.weights[q] * g.det);
    }
  }
}

double trace_norm_squared(const SpaceTimeMesh& mesh, const Field& f, FaceTag tag, int quad_degree) {
  const int dim = mesh.simplex_dim();
  const QuadratureRule rule = simplex_quadrature(dim - 1, quad_degree);
  double sum = 0.0;
  for (const Face& face : mesh.faces()) {
    if (face.tag != tag) continue;
    const FaceFrame frame = face_frame(mesh, face);
    const ElementGeometry g = element_geometry(mesh, face.cells[0]);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = face_point(frame, dim, rule.points[q]);
      const double v = f(face.cells[0], g.to_reference(x), x).value;
      sum += rule.weights[q] * frame.jacobian * v * v;
    }
  }
  return sum;
}

Eigen::Vector3d spatial_part(Eigen::Vector3d g, int spatial_dim) {
  for (int r = spatial_dim; r < 3; ++r) g[r] = 0.0;
  return g;
}

}  // namespace

namespace {

// Basis data at one reference point. Quadrature points repeat across cells,
// so discrete fields memoize these by exact coordinates.
struct Tabulation {
  std::vector<double> values;
  std::vector<Eigen::Vector3d> gradients;
  std::vector<Eigen::Matrix3d> hessians;
};

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::size_t h = 0;
    for (double v : p) h = h * 1000003u ^ std::hash<double>{}(v);
    return h;
  }
};

constexpr std::size_t max_cached_points = 8192;

}  // namespace

Field discrete_field(const SpaceTimeMesh& mesh, const DofMap& dofs, const ReferenceElement& element,
                     std::vector<double> nodal_values) {
  require(static_cast<Index>(nodal_values.size()) == dofs.num_dofs(), "nodal vector has wrong length");
  require(dofs.matches(mesh), "dof map does not belong to this mesh");
  struct State {
    std::vector<ElementGeometry> geometry;
    std::vector<double> values;
    std::unordered_map<Point, Tabulation, PointHash> cache;
  };
  auto state = std::make_shared<State>(State{element_geometries(mesh), std::move(nodal_values), {}});
  const int d = mesh.spatial_dim();
  return [state, &dofs, &element, d](Index cell, const Point& xi, const Point&) {
    const int n = element.num_basis();
    const bool curved = element.degree() >= 2;
    Tabulation local;
    const Tabulation* tab = nullptr;
    if (auto it = state->cache.find(xi); it != state->cache.end()) {
      tab = &it->second;
    } else {
      local.values.resize(n);
      local.gradients.resize(n);
      element.values(xi, local.values);
      element.gradients(xi, local.gradients);
      if (curved) {
        local.hessians.resize(n);
        element.hessians(xi, local.hessians);
      }
      if (state->cache.size() < max_cached_points) {
        tab = &state->cache.emplace(xi, std::move(local)).first->second;
      } else {
        tab = &local;
      }
    }
    const auto ids = dofs.cell_dofs(cell);
    FieldSample s;
    Eigen::Vector3d ref_grad = Eigen::Vector3d::Zero();
    Eigen::Matrix3d ref_hess = Eigen::Matrix3d::Zero();
    for (int j = 0; j < n; ++j) {
      const double c = state->values[ids[j]];
      s.value += c * tab->values[j];
      ref_grad += c * tab->gradients[j];
      if (curved) ref_hess += c * tab->hessians[j];
    }
    const ElementGeometry& g = state->geometry[cell];
    s.gradient = g.physical_gradient(ref_grad);
    if (curved) s.laplacian_x = spatial_laplacian(g.physical_hessian(ref_hess), d);
    return s;
  };
}

Field analytic_field(std::function<double(const Point&)> value,
                     std::function<Eigen::Vector3d(const Point&)> gradient,
                     std::function<double(const Point&)> laplacian_x) {
  return [value = std::move(value), gradient = std::move(gradient), laplacian_x = std::move(laplacian_x)](
             Index, const Point&, const Point& x) {
    FieldSample s;
    s.value = value(x);
    if (gradient) s.gradient = gradient(x);
    if (laplacian_x) s.laplacian_x = laplacian_x(x);
    return s;
  };
}

Field difference(Field a, Field b) {
  return [a = std::move(a), b = std::move(b)](Index c, const Point& xi, const Point& x) {
    const FieldSample sa = a(c, xi, x), sb = b(c, xi, x);
    return FieldSample{sa.value - sb.value, sa.gradient - sb.gradient, sa.laplacian_x - sb.laplacian_x};
  };
}

Field scaled(Field a, double factor) {
  return [a = std::move(a), factor](Index c, const Point& xi, const Point& x) {
    const FieldSample s = a(c, xi, x);
    return FieldSample{factor * s.value, factor * s.gradient, factor * s.laplacian_x};
  };
}

Field zero_field() {
  return [](Index, const Point&, const Point&) { return FieldSample{}; };
}

double NormHTerms::value() const { return std::sqrt(squared()); }

NormHTerms norm_h_terms(const SpaceTimeMesh& mesh, const Field& v, const Field& q, double varrho,
                        std::span<const double> lambdas, int quad_degree) {
  require(static_cast<Index>(lambdas.size()) == mesh.num_cells(), "one lambda per cell expected");
  const int d = mesh.spatial_dim();
  NormHTerms terms;
  const QuadratureRule rule = simplex_quadrature(mesh.simplex_dim(), quad_degree);
  for_each_cell_point(mesh, rule, [&](Index c, const Point& xi, const Point& x, double w) {
    const FieldSample sv = v(c, xi, x);
    const FieldSample sq = q(c, xi, x);
    terms.state_grad += w * spatial_part(sv.gradient, d).squaredNorm();
    terms.state_dt += w * lambdas[c] * sv.gradient[d] * sv.gradient[d];
    terms.adjoint_grad += w * spatial_part(sq.gradient, d).squaredNorm();
    terms.adjoint_dt += w * lambdas[c] * sq.gradient[d] * sq.gradient[d];
  });
  terms.state_trace = trace_norm_squared(mesh, v, FaceTag::SigmaT, quad_degree);
  terms.adjoint_trace = trace_norm_squared(mesh, q, FaceTag::SigmaZero, quad_degree);
  terms.state_trace *= varrho;
  terms.state_grad *= varrho;
  terms.state_dt *= varrho;
  return terms;
}

double norm_h(const SpaceTimeMesh& mesh, const Field& v, const Field& q, double varrho,
              std::span<const double> lambdas, int quad_degree) {
  return norm_h_terms(mesh, v, q, varrho, lambdas, quad_degree).value();
}

double norm_h_star(const SpaceTimeMesh& mesh, const Field& y, const Field& p, double varrho,
                   std::span<const double> lambdas, int quad_degree) {
  for (double l : lambdas) require(l > 0.0, "the star norm needs lambda > 0 on every cell");
  double extra = 0.0;
  const QuadratureRule rule = simplex_quadrature(mesh.simplex_dim(), quad_degree);
  for_each_cell_point(mesh, rule, [&](Index c, const Point& xi, const Point& x, double w) {
    const FieldSample sy = y(c, xi, x);
    const FieldSample sp = p(c, xi, x);
    const double l = lambdas[c];
    extra += w * (varrho * l * sy.laplacian_x * sy.laplacian_x +
                  ((varrho + 1.0) / l + l) * sy.value * sy.value + l * sp.laplacian_x * sp.laplacian_x +
                  (2.0 / l + l) * sp.value * sp.value);
  });
  return std::sqrt(norm_h_terms(mesh, y, p, varrho, lambdas, quad_degree).squared() + extra);
}

double l2_norm(const SpaceTimeMesh& mesh, const Field& f, int quad_degree) {
  double sum = 0.0;
  const QuadratureRule rule = simplex_quadrature(mesh.simplex_dim(), quad_degree);
  for_each_cell_point(mesh, rule, [&](Index c, const Point& xi, const Point& x, double w) {
    const double v = f(c, xi, x).value;
    sum += w * v * v;
  });
  return std::sqrt(sum);
}

CostValue cost_functional(const SpaceTimeMesh& mesh, const Field& y, const Field& u, const ScalarFunction& target,
                          double varrho, int quad_degree) {
  CostValue cost;
  const QuadratureRule rule = simplex_quadrature(mesh.simplex_dim(), quad_degree);
  for_each_cell_point(mesh, rule, [&](Index c, const Point& xi, const Point& x, double w) {
    const double misfit = y(c, xi, x).value - target(x);
    const double control = u(c, xi, x).value;
    cost.tracking += w * misfit * misfit;
    cost.control += w * control * control;
  });
  cost.tracking *= 0.5;
  cost.control *= 0.5 * varrho;
  return cost;
}

double ResidualIndicator::sum() const {
  // descending order, matching doerfler_mark
  std::vector<double> sorted(total);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0);
}

ResidualIndicator residual_indicator(const SpaceTimeMesh& mesh, const FiniteElementSpaces& spaces,
                                     std::span<const double> state_values, std::span<const double> adjoint_values,
                                     const ScalarFunction& target, const ProblemCoefficients& coefficients) {
  require(static_cast<Index>(state_values.size()) == spaces.state.num_dofs() &&
              static_cast<Index>(adjoint_values.size()) == spaces.adjoint.num_dofs(),
          "nodal vectors do not match the dof maps");
  require(spaces.state.matches(mesh), "dof maps do not belong to this mesh");
  coefficients.validate(mesh.num_cells());
  const int d = mesh.spatial_dim();
  const Index ncells = mesh.num_cells();
  const double varrho = coefficients.varrho;
  const ReferenceElement& element = spaces.load_element;
  const int n = element.num_basis();

  ResidualIndicator eta;
  eta.state.assign(ncells, 0.0);
  eta.adjoint.assign(ncells, 0.0);
  const std::vector<double> h = mesh.cell_diameters();
  const std::vector<ElementGeometry> geometry = element_geometries(mesh);

  for (Index c = 0; c < ncells; ++c) {
    const ElementGeometry& g = geometry[c];
    const auto ids_y = spaces.state.cell_dofs(c);
    const auto ids_p = spaces.adjoint.cell_dofs(c);
    const double nu = coefficients.nu_on(c);
    double rs = 0.0, ra = 0.0;
    for (std::size_t q = 0; q < element.quadrature().size(); ++q) {
      double y = 0.0, p = 0.0, dty = 0.0, dtp = 0.0, lapy = 0.0, lapp = 0.0;
      for (int j = 0; j < n; ++j) {
        const double dt = g.physical_gradient(element.gradient(q, j))[d];
        const double lap =
            element.degree() >= 2 ? spatial_laplacian(g.physical_hessian(element.hessian(q, j)), d) : 0.0;
        const double cy = state_values[ids_y[j]], cp = adjoint_values[ids_p[j]];
        y += cy * element.value(q, j);
        p += cp * element.value(q, j);
        dty += cy * dt;
        dtp += cp * dt;
        lapy += cy * lap;
        lapp += cp * lap;
      }
      const double w = element.quadrature().weights[q] * g.det;
      const double r_state = varrho * (dty - nu * lapy) + p;
      const double r_adjoint = -dtp - nu * lapp - y + target(g.map(element.quadrature().points[q]));
      rs += w * r_state * r_state;
      ra += w * r_adjoint * r_adjoint;
    }
    eta.state[c] = h[c] * h[c] * rs;
    eta.adjoint[c] = h[c] * h[c] * ra;
  }

  // spatial flux jumps
  const QuadratureRule face_rule = simplex_quadrature(d, 2 * spaces.degree);
  std::array<Eigen::Vector3d, 20> grad;
  auto spatial_gradients = [&](Index cell, const Point& x, double& nu, Eigen::Vector3d& gy, Eigen::Vector3d& gp) {
    const ElementGeometry& g = geometry[cell];
    element.gradients(g.to_reference(x), std::span<Eigen::Vector3d>(grad.data(), n));
    Eigen::Vector3d ry = Eigen::Vector3d::Zero(), rp = Eigen::Vector3d::Zero();
    const auto ids_y = spaces.state.cell_dofs(cell);
    const auto ids_p = spaces.adjoint.cell_dofs(cell);
    for (int j = 0; j < n; ++j) {
      ry += state_values[ids_y[j]] * grad[j];
      rp += adjoint_values[ids_p[j]] * grad[j];
    }
    nu = coefficients.nu_on(cell);
    gy = spatial_part(g.physical_gradient(ry), d);
    gp = spatial_part(g.physical_gradient(rp), d);
  };
  for (const Face& face : mesh.faces()) {
    if (face.tag != FaceTag::Interior) continue;
    const FaceFrame frame = face_frame(mesh, face);
    const Eigen::Vector3d normal_x = spatial_part(frame.normal, d);
    if (normal_x.squaredNorm() < 1e-24) continue;  // face lies in a time slab plane
    double js = 0.0, ja = 0.0;
    for (std::size_t q = 0; q < face_rule.size(); ++q) {
      const Point x = face_point(frame, mesh.simplex_dim(), face_rule.points[q]);
      double nu0 = 0.0, nu1 = 0.0;
      Eigen::Vector3d gy0, gp0, gy1, gp1;
      spatial_gradients(face.cells[0], x, nu0, gy0, gp0);
      spatial_gradients(face.cells[1], x, nu1, gy1, gp1);
      const double jump_y = (nu0 * gy0 - nu1 * gy1).dot(normal_x);
      const double jump_p = (nu0 * gp0 - nu1 * gp1).dot(normal_x);
      const double w = face_rule.weights[q] * frame.jacobian;
      js += w * jump_y * jump_y;
      ja += w * jump_p * jump_p;
    }
    for (Index cell : face.cells) {
      eta.state[cell] += h[cell] * js;
      eta.adjoint[cell] += h[cell] * ja;
    }
  }
  eta.total.resize(ncells);
  for (Index c = 0; c < ncells; ++c) eta.total[c] = eta.state[c] + eta.adjoint[c];
  return eta;
}

double estimate_friedrichs_constant(const SpaceTimeMesh& mesh, const FiniteElementSpaces& spaces) {
  const ReferenceElement& element = spaces.matrix_element;
  const int n = element.num_basis();
  const int d = mesh.spatial_dim();
  double worst = 0.0;
  for (const DofMap* dofs : {&spaces.state, &spaces.adjoint}) {
    const Index nf = dofs->num_free();
    if (nf == 0) continue;
    Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(nf, nf);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nf, nf);
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      const ElementGeometry g = element_geometry(mesh, c);
      const auto ids = dofs->cell_dofs(c);
      for (std::size_t q = 0; q < element.quadrature().size(); ++q) {
        const double w = element.quadrature().weights[q] * g.det;
        for (int i = 0; i < n; ++i) {
          const Index fi = dofs->free_index(ids[i]);
          if (fi < 0) continue;
          const Eigen::Vector3d gi = spatial_part(g.physical_gradient(element.gradient(q, i)), d);
          for (int j = 0; j < n; ++j) {
            const Index fj = dofs->free_index(ids[j]);
            if (fj < 0) continue;
            const Eigen::Vector3d gj = spatial_part(g.physical_gradient(element.gradient(q, j)), d);
            stiffness(fi, fj) += w * gi.dot(gj);
            mass(fi, fj) += w * element.value(q, i) * element.value(q, j);
          }
        }
      }
    }
    // largest ||w||^2 / ||grad_x w||^2 = largest eigenvalue of (mass, stiffness)
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass, stiffness);
    if (eig.info() != Eigen::Success) throw LinearAlgebraError("Friedrichs eigenproblem failed");
    worst = std::max(worst, eig.eigenvalues().maxCoeff());
  }
  return std::sqrt(worst);
}

std::vector<Index> doerfler_mark(std::span<const double> eta2, double theta) {
  require(theta > 0.0 && theta <= 1.0, "marking parameter must lie in (0,1]");
  std::vector<Index> order(eta2.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return eta2[a] > eta2[b]; });
  // Summing in the same order makes theta = 1 stop exactly at the last positive entry.
  double total = 0.0;
  for (Index i : order) total += eta2[i];
  std::vector<Index> marked;
  double sum = 0.0;
  for (Index i : order) {
    if (sum >= theta * total) break;
    marked.push_back(i);
    sum += eta2[i];
  }
  return marked;
}

}  // namespace stfem

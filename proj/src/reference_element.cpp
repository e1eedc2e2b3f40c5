#include "stfem/reference_element.hpp"

#include <algorithm>

namespace stfem {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// d^order/dx^order of x^e.
double dpow(double x, int e, int order) {
  if (order > e) return 0.0;
  double c = 1.0;
  for (int i = 0; i < order; ++i) c *= e - i;
  return c * ipow(x, e - order);
}

double monomial(const std::array<int, 3>& e, const Point& xi, const std::array<int, 3>& order) {
  return dpow(xi[0], e[0], order[0]) * dpow(xi[1], e[1], order[1]) * dpow(xi[2], e[2], order[2]);
}

}  // namespace

ReferenceElement::ReferenceElement(int dim, int degree, int quad_degree)
    : dim_(dim), degree_(degree), quadrature_() {
  require(dim == 2 || dim == 3, "reference element dimension must be 2 or 3");
  require(degree >= 1 && degree <= 3, "polynomial degree must be 1, 2 or 3");
  require(quad_degree >= 2 * degree, "quadrature degree must be at least 2k");

  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b) {
      if (dim == 2) {
        exponents_.push_back({a, b, 0});
        continue;
      }
      for (int c = 0; a + b + c <= degree; ++c) exponents_.push_back({a, b, c});
    }

  std::vector<std::array<int, 4>> lattice;
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b) {
      if (dim == 2) {
        lattice.push_back({degree - a - b, a, b, 0});
        continue;
      }
      for (int c = 0; a + b + c <= degree; ++c) lattice.push_back({degree - a - b - c, a, b, c});
    }
  auto support = [](const std::array<int, 4>& alpha) {
    return std::count_if(alpha.begin(), alpha.end(), [](int v) { return v > 0; });
  };
  // vertices, then edges, faces and interior; vertex nodes in vertex order
  std::stable_sort(lattice.begin(), lattice.end(), [&](const auto& l, const auto& r) {
    const auto sl = support(l), sr = support(r);
    if (sl != sr) return sl < sr;
    return l > r;
  });
  node_indices_ = lattice;
  for (const auto& alpha : lattice)
    nodes_.push_back(Point{double(alpha[1]) / degree, double(alpha[2]) / degree,
                           double(alpha[3]) / degree});

  const int n = num_basis();
  Eigen::MatrixXd vandermonde(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vandermonde(i, j) = monomial(exponents_[j], nodes_[i], {0, 0, 0});
  coefficients_ = vandermonde.fullPivLu().inverse();

  quadrature_ = simplex_quadrature(dim, quad_degree);
  const std::size_t nq = quadrature_.size();
  values_.resize(nq * n);
  gradients_.resize(nq * n);
  hessians_.resize(nq * n);
  for (std::size_t q = 0; q < nq; ++q) {
    const Point& xi = quadrature_.points[q];
    this->values(xi, std::span<double>(values_.data() + q * n, n));
    this->gradients(xi, std::span<Eigen::Vector3d>(gradients_.data() + q * n, n));
    this->hessians(xi, std::span<Eigen::Matrix3d>(hessians_.data() + q * n, n));
  }
}

void ReferenceElement::values(const Point& xi, std::span<double> out) const {
  const int n = num_basis();
  Eigen::VectorXd m(n);
  for (int i = 0; i < n; ++i) m[i] = monomial(exponents_[i], xi, {0, 0, 0});
  const Eigen::VectorXd v = coefficients_.transpose() * m;
  for (int j = 0; j < n; ++j) out[j] = v[j];
}

void ReferenceElement::gradients(const Point& xi, std::span<Eigen::Vector3d> out) const {
  const int n = num_basis();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, 3);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < dim_; ++r) {
      std::array<int, 3> order{0, 0, 0};
      order[r] = 1;
      m(i, r) = monomial(exponents_[i], xi, order);
    }
  const Eigen::MatrixXd g = coefficients_.transpose() * m;
  for (int j = 0; j < n; ++j) out[j] = g.row(j).transpose();
}

void ReferenceElement::hessians(const Point& xi, std::span<Eigen::Matrix3d> out) const {
  const int n = num_basis();
  for (int j = 0; j < n; ++j) out[j].setZero();
  if (degree_ < 2) return;
  for (int r = 0; r < dim_; ++r)
    for (int s = r; s < dim_; ++s) {
      std::array<int, 3> order{0, 0, 0};
      ++order[r];
      ++order[s];
      Eigen::VectorXd m(n);
      for (int i = 0; i < n; ++i) m[i] = monomial(exponents_[i], xi, order);
      const Eigen::VectorXd h = coefficients_.transpose() * m;
      for (int j = 0; j < n; ++j) out[j](r, s) = out[j](s, r) = h[j];
    }
}

}  // namespace stfem

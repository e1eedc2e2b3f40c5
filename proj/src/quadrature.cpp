#include "stfem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace stfem {

double reference_volume(int dim) {
  switch (dim) {
    case 1: return 1.0;
    case 2: return 0.5;
    case 3: return 1.0 / 6.0;
  }
  throw std::invalid_argument("reference simplex dimension must be 1, 2 or 3");
}

namespace {

// Returns (P_n(x), P_n'(x)) via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(int npoints) {
  require(npoints >= 1, "Gauss-Legendre rule needs at least one point");
  const int n = npoints;
  QuadratureRule rule;
  rule.dim = 1;
  rule.degree = 2 * n - 1;
  rule.points.resize(n, Point{0.0, 0.0, 0.0});
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // [-1,1] -> [0,1]
    rule.points[i][0] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i][0] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule simplex_quadrature(int dim, int degree) {
  require(dim >= 1 && dim <= 3, "reference simplex dimension must be 1, 2 or 3");
  require(degree >= 0, "quadrature degree must be non-negative");
  auto points_for = [](int exactness) { return std::max(1, (exactness + 2) / 2); };
  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = degree;
  if (dim == 1) {
    rule = gauss_legendre(points_for(degree));
    rule.degree = degree;
    return rule;
  }
  // The Jacobian of the collapse adds (dim - 1 - axis) to the degree seen by each axis.
  const QuadratureRule gu = gauss_legendre(points_for(degree + dim - 1));
  const QuadratureRule gv = gauss_legendre(points_for(degree + dim - 2));
  if (dim == 2) {
    for (std::size_t i = 0; i < gu.size(); ++i)
      for (std::size_t j = 0; j < gv.size(); ++j) {
        const double u = gu.points[i][0], v = gv.points[j][0];
        rule.points.push_back(Point{u, v * (1.0 - u), 0.0});
        rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - u));
      }
    return rule;
  }
  const QuadratureRule gw = gauss_legendre(points_for(degree));
  for (std::size_t i = 0; i < gu.size(); ++i)
    for (std::size_t j = 0; j < gv.size(); ++j)
      for (std::size_t k = 0; k < gw.size(); ++k) {
        const double u = gu.points[i][0], v = gv.points[j][0], w = gw.points[k][0];
        rule.points.push_back(Point{u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)});
        rule.weights.push_back(gu.weights[i] * gv.weights[j] * gw.weights[k] * (1.0 - u) * (1.0 - u) *
                               (1.0 - v));
      }
  return rule;
}

}  // namespace stfem

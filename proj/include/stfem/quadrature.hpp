#pragma once

#include <vector>

#include "stfem/common.hpp"

namespace stfem {

/// Quadrature on the reference simplex {xi >= 0, sum xi <= 1} of dimension 1, 2 or 3.
struct QuadratureRule {
  int dim = 0;
  int degree = 0;  // polynomial exactness
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre rule with `npoints` nodes mapped to [0,1].
QuadratureRule gauss_legendre(int npoints);

/// Collapsed (Duffy) tensor Gauss rule exact for total degree `degree`.
/// All weights are positive and sum to the reference simplex volume 1/dim!.
QuadratureRule simplex_quadrature(int dim, int degree);

double reference_volume(int dim);

}  // namespace stfem

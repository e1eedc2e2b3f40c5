#pragma once

// Independent transcription of the manufactured optimality pair, evaluated
// with jets so that derivatives come from automatic differentiation.

#include <numbers>

#include "jet.hpp"
#include "stfem/common.hpp"

namespace testing_support {

struct ManufacturedOracle {
  int d;
  double varrho;

  double c() const { return d * std::numbers::pi * std::numbers::pi; }
  // a is fixed by p(., 1) = 0: c a + (c + 2a) + 1 = 0
  double a() const { return -(c() + 1.0) / (c() + 2.0); }

  std::array<Jet, 3> variables(const stfem::Point& x) const {
    return {Jet::variable(x[0], 0), Jet::variable(x[1], 1), Jet::variable(x[2], 2)};
  }
  Jet shape(const std::array<Jet, 3>& v) const {
    const double pi = std::numbers::pi;
    Jet s = sin(pi * v[0]);
    if (d == 2) s = s * sin(pi * v[1]);
    return s;
  }
  Jet y(const stfem::Point& x) const {
    const auto v = variables(x);
    const Jet& t = v[d];
    return shape(v) * (a() * (t * t) + t);
  }
  Jet p(const stfem::Point& x) const {
    const auto v = variables(x);
    const Jet& t = v[d];
    return (-varrho) * (shape(v) * ((c() * a()) * (t * t) + (c() + 2.0 * a()) * t + 1.0));
  }
  double dt(const Jet& f) const { return f.g[d]; }
  double lap(const Jet& f) const {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += f.h[i][i];
    return s;
  }
};

}  // namespace testing_support

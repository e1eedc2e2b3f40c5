#include <doctest.h>

#include <cmath>
#include <numbers>

#include "halton.hpp"
#include "manufactured_oracle.hpp"
#include "stfem/problems.hpp"

using namespace stfem;
using testing_support::halton;
using testing_support::ManufacturedOracle;

namespace {

Point sample(unsigned i, int d) {
  Point x = halton(i);
  if (d == 1) x = {x[0], x[1], 0.0};
  return x;
}

}  // namespace

TEST_CASE("state vanishes at t = 0 and adjoint at t = T") {
  for (int d : {1, 2}) {
    const ManufacturedSolution m(d, 0.01);
    for (unsigned i = 0; i < 200; ++i) {
      Point x = sample(i, d);
      x[d] = 0.0;
      CHECK(std::abs(m.y(x)) < 1e-15);
      x[d] = 1.0;
      CHECK(std::abs(m.p(x)) < 1e-12);
    }
  }
}

TEST_CASE("midpoint value of the d = 2 state") {
  const auto m = smooth_example(0.01);
  const double a = -(2 * std::numbers::pi * std::numbers::pi + 1) / (2 * std::numbers::pi * std::numbers::pi + 2);
  CHECK(m.a() == doctest::Approx(a).epsilon(1e-15));
  CHECK(m.b() == 1.0);
  CHECK(m.y({0.5, 0.5, 0.5}) == doctest::Approx(a / 4 + 0.5).epsilon(1e-14));
  CHECK(m.y({0.5, 0.5, 0.5}) == doctest::Approx(0.2614999585).epsilon(1e-9));
}

TEST_CASE("closed forms match the autodiff oracle and solve the optimality system") {
  for (int d : {1, 2}) {
    for (double varrho : {0.01, 1.0}) {
      const ManufacturedSolution m(d, varrho);
      const ManufacturedOracle o{d, varrho};
      for (unsigned i = 0; i < 1000; ++i) {
        const Point x = sample(i, d);
        const auto y = o.y(x);
        const auto p = o.p(x);
        CHECK(m.y(x) == doctest::Approx(y.v).epsilon(1e-13).scale(1.0));
        CHECK(m.p(x) == doctest::Approx(p.v).epsilon(1e-13).scale(1.0));
        CHECK(m.dt_y(x) == doctest::Approx(o.dt(y)).epsilon(1e-13).scale(1.0));
        CHECK(m.dt_p(x) == doctest::Approx(o.dt(p)).epsilon(1e-13).scale(1.0));
        CHECK(m.lap_y(x) == doctest::Approx(o.lap(y)).epsilon(1e-12).scale(1.0));
        CHECK(m.lap_p(x) == doctest::Approx(o.lap(p)).epsilon(1e-12).scale(1.0));
        for (int r = 0; r <= d; ++r) {
          CHECK(m.grad_y(x)[r] == doctest::Approx(y.g[r]).epsilon(1e-13).scale(1.0));
          CHECK(m.grad_p(x)[r] == doctest::Approx(p.g[r]).epsilon(1e-13).scale(1.0));
        }
        const double state = varrho * (o.dt(y) - o.lap(y)) + p.v;
        const double adjoint = -o.dt(p) - o.lap(p) - y.v + m.target(x);
        CHECK(std::abs(state) < 1e-10);
        CHECK(std::abs(adjoint) < 1e-10);
        CHECK(m.control(x) == doctest::Approx(-p.v / varrho).epsilon(1e-13).scale(1.0));
      }
    }
  }
}

TEST_CASE("d = 1 example") {
  const auto m = d1_smooth_example(0.01);
  CHECK(m.spatial_dim() == 1);
  const double c = std::numbers::pi * std::numbers::pi;
  CHECK(m.a() * (c + 2) + m.b() * (c + 1) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("rejects nonpositive regularization") {
  CHECK_THROWS_AS(smooth_example(0.0), std::invalid_argument);
  CHECK_THROWS_AS(d1_smooth_example(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(recover_control(std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("ball target values") {
  CHECK(ball_target({0.5, 0.5, 0.5}) == 1.0);
  CHECK(ball_target({0.0, 0.0, 0.0}) == 0.0);
  CHECK(ball_target({0.75, 0.5, 0.5}) == 1.0);
  CHECK(ball_target({0.76, 0.5, 0.5}) == 0.0);
  CHECK(ball_target({0.5, 0.75, 0.0}, 1) == 1.0);
  CHECK(ball_target({0.5, 0.0, 0.5}, 1) == 0.0);
  CHECK(ball_target({0.5, 0.5, 0.9}, 1) == 1.0);
}

TEST_CASE("ball target symmetries") {
  for (unsigned i = 0; i < 2000; ++i) {
    const Point x = halton(i);
    CHECK(ball_target(x) == ball_target({x[0], x[1], 1.0 - x[2]}));
    CHECK(ball_target(x) == ball_target({x[1], x[0], x[2]}));
  }
}

TEST_CASE("target variant dispatch") {
  const TargetSpec ball = BallTarget{};
  const TargetSpec smooth = smooth_example(0.01);
  CHECK(target_value(ball, {0.5, 0.5, 0.5}, 2) == 1.0);
  const Point x{0.3, 0.6, 0.2};
  CHECK(target_value(smooth, x, 2) == smooth_example(0.01).target(x));
}

TEST_CASE("control recovery") {
  CHECK(recover_control(std::vector<double>{0.0, 0.0}, 0.01) == std::vector<double>{0.0, 0.0});
  const auto u = recover_control(std::vector<double>{0.01}, 0.01);
  CHECK(u[0] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("problem names") {
  CHECK(parse_problem("smooth2d") == ProblemKind::Smooth2d);
  CHECK(parse_problem("smooth1d") == ProblemKind::Smooth1d);
  CHECK(parse_problem("ball") == ProblemKind::Ball);
  CHECK(std::string(to_string(ProblemKind::Ball)) == "ball");
  CHECK_THROWS_AS(parse_problem("disc"), std::invalid_argument);
}

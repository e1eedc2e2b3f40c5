#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stfem/common.hpp"

namespace stfem {

/// Closed-form optimality pair on Q = (0,1)^d x (0,1) with nu = 1:
///
///   y = S(x) (a t^2 + b t),
///   p = -varrho S(x) (c a t^2 + (c b + 2a) t + b),   S = prod_i sin(pi x_i), c = d pi^2,
///
/// with a (c + 2) + b (c + 1) = 0 so that p(., 1) = 0. The target follows from
/// the adjoint equation, y_d = y + dt p + lap_x p, and the control from u = -p / varrho.
class ManufacturedSolution {
 public:
  ManufacturedSolution(int spatial_dim, double varrho);

  int spatial_dim() const { return spatial_dim_; }
  double varrho() const { return varrho_; }
  double a() const { return a_; }
  double b() const { return b_; }

  double y(const Point& x) const;
  double p(const Point& x) const;
  double dt_y(const Point& x) const;
  double dt_p(const Point& x) const;
  Eigen::Vector3d grad_y(const Point& x) const;  // space-time gradient, time at index d
  Eigen::Vector3d grad_p(const Point& x) const;
  double lap_y(const Point& x) const;  // spatial Laplacian
  double lap_p(const Point& x) const;
  double target(const Point& x) const;
  double control(const Point& x) const;

 private:
  double spatial(const Point& x) const;
  Eigen::Vector3d spatial_gradient(const Point& x) const;
  double time_y(double t) const { return a_ * t * t + b_ * t; }
  double time_p(double t) const;       // the bracket multiplying -varrho S
  double time_p_prime(double t) const;

  int spatial_dim_;
  double varrho_;
  double a_;
  double b_;
  double c_;
};

/// The d = 2 smooth benchmark.
ManufacturedSolution smooth_example(double varrho);
/// The d = 1 analogue.
ManufacturedSolution d1_smooth_example(double varrho);

/// Indicator of a closed ball in space-time.
struct BallTarget {
  Point center{0.5, 0.5, 0.5};
  double radius = 0.25;
  double value = 1.0;

  double operator()(const Point& x, int spatial_dim) const;
};

/// Indicator of the ball of radius 0.25 around (0.5, ..., 0.5) in space-time,
/// boundary included. For d = 1 the ball is a disc in the (x, t) plane.
double ball_target(const Point& x, int spatial_dim = 2);

using TargetSpec = std::variant<ManufacturedSolution, BallTarget>;

double target_value(const TargetSpec& spec, const Point& x, int spatial_dim);

/// u_h = -p_h / varrho, componentwise.
std::vector<double> recover_control(std::span<const double> adjoint, double varrho);

enum class ProblemKind { Smooth2d, Smooth1d, Ball };

ProblemKind parse_problem(const std::string& name);
const char* to_string(ProblemKind kind);

}  // namespace stfem

#include "stfem/problems.hpp"

#include <cmath>
#include <numbers>

namespace stfem {

namespace {
constexpr double pi = std::numbers::pi;
}

ManufacturedSolution::ManufacturedSolution(int spatial_dim, double varrho)
    : spatial_dim_(spatial_dim), varrho_(varrho) {
  require(spatial_dim == 1 || spatial_dim == 2, "spatial dimension must be 1 or 2");
  require(varrho > 0.0, "regularization parameter must be positive");
  c_ = spatial_dim * pi * pi;
  b_ = 1.0;
  a_ = -(c_ + 1.0) / (c_ + 2.0);
}

double ManufacturedSolution::spatial(const Point& x) const {
  double s = 1.0;
  for (int i = 0; i < spatial_dim_; ++i) s *= std::sin(pi * x[i]);
  return s;
}

Eigen::Vector3d ManufacturedSolution::spatial_gradient(const Point& x) const {
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (int i = 0; i < spatial_dim_; ++i) {
    double d = pi * std::cos(pi * x[i]);
    for (int j = 0; j < spatial_dim_; ++j)
      if (j != i) d *= std::sin(pi * x[j]);
    g[i] = d;
  }
  return g;
}

double ManufacturedSolution::time_p(double t) const {
  return c_ * a_ * t * t + (c_ * b_ + 2.0 * a_) * t + b_;
}

double ManufacturedSolution::time_p_prime(double t) const { return 2.0 * c_ * a_ * t + c_ * b_ + 2.0 * a_; }

double ManufacturedSolution::y(const Point& x) const { return spatial(x) * time_y(x[spatial_dim_]); }

double ManufacturedSolution::p(const Point& x) const {
  return -varrho_ * spatial(x) * time_p(x[spatial_dim_]);
}

double ManufacturedSolution::dt_y(const Point& x) const {
  return spatial(x) * (2.0 * a_ * x[spatial_dim_] + b_);
}

double ManufacturedSolution::dt_p(const Point& x) const {
  return -varrho_ * spatial(x) * time_p_prime(x[spatial_dim_]);
}

Eigen::Vector3d ManufacturedSolution::grad_y(const Point& x) const {
  Eigen::Vector3d g = spatial_gradient(x) * time_y(x[spatial_dim_]);
  g[spatial_dim_] = dt_y(x);
  return g;
}

Eigen::Vector3d ManufacturedSolution::grad_p(const Point& x) const {
  Eigen::Vector3d g = -varrho_ * spatial_gradient(x) * time_p(x[spatial_dim_]);
  g[spatial_dim_] = dt_p(x);
  return g;
}

// lap_x S = -c S
double ManufacturedSolution::lap_y(const Point& x) const { return -c_ * y(x); }
double ManufacturedSolution::lap_p(const Point& x) const { return -c_ * p(x); }

double ManufacturedSolution::target(const Point& x) const { return y(x) + dt_p(x) + lap_p(x); }

double ManufacturedSolution::control(const Point& x) const { return spatial(x) * time_p(x[spatial_dim_]); }

ManufacturedSolution smooth_example(double varrho) { return ManufacturedSolution(2, varrho); }

ManufacturedSolution d1_smooth_example(double varrho) { return ManufacturedSolution(1, varrho); }

double BallTarget::operator()(const Point& x, int spatial_dim) const {
  double r2 = 0.0;
  for (int i = 0; i <= spatial_dim; ++i) {
    const double c = i == spatial_dim ? center[2] : center[i];
    r2 += (x[i] - c) * (x[i] - c);
  }
  return std::sqrt(r2) <= radius ? value : 0.0;
}

double ball_target(const Point& x, int spatial_dim) { return BallTarget{}(x, spatial_dim); }

double target_value(const TargetSpec& spec, const Point& x, int spatial_dim) {
  if (const auto* m = std::get_if<ManufacturedSolution>(&spec)) return m->target(x);
  return std::get<BallTarget>(spec)(x, spatial_dim);
}

std::vector<double> recover_control(std::span<const double> adjoint, double varrho) {
  require(varrho > 0.0, "regularization parameter must be positive");
  std::vector<double> u(adjoint.size());
  for (std::size_t i = 0; i < adjoint.size(); ++i) u[i] = -adjoint[i] / varrho;
  return u;
}

ProblemKind parse_problem(const std::string& name) {
  if (name == "smooth2d") return ProblemKind::Smooth2d;
  if (name == "smooth1d") return ProblemKind::Smooth1d;
  if (name == "ball") return ProblemKind::Ball;
  throw std::invalid_argument("unknown problem '" + name + "' (smooth2d|smooth1d|ball)");
}

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Smooth2d: return "smooth2d";
    case ProblemKind::Smooth1d: return "smooth1d";
    case ProblemKind::Ball: return "ball";
  }
  return "?";
}

}  // namespace stfem

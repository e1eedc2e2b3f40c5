// Command-line front end: `stfem convergence ...` and `stfem adaptive ...`.
#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "stfem/driver.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> problem;
  std::optional<int> dim;
  std::optional<int> degree;
  std::optional<int> n0;
  std::optional<int> levels;
  std::optional<int> steps;
  std::optional<double> rho;
  std::optional<double> theta;
  std::optional<double> theta_mark;
  std::optional<double> rtol;
  std::optional<int> restart;
  std::optional<int> maxit;
  std::optional<std::string> preconditioner;
  std::optional<std::string> out;
  bool no_vtk = false;
  bool dump_matrices = false;
};

void add_options(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "flat key = value file; flags override it");
  app.add_option("--problem", o.problem, "smooth2d | smooth1d | ball");
  app.add_option("--dim", o.dim, "spatial dimension of the ball problem (1 or 2)");
  app.add_option("--degree,-k", o.degree, "polynomial degree 1..3");
  app.add_option("--n0", o.n0, "subdivisions of the coarsest mesh");
  app.add_option("--levels", o.levels, "number of uniform levels");
  app.add_option("--steps", o.steps, "adaptive refinement steps");
  app.add_option("--rho", o.rho, "regularization parameter");
  app.add_option("--theta", o.theta, "stabilization: lambda_K = theta h_K^2");
  app.add_option("--theta-mark", o.theta_mark, "Doerfler marking fraction");
  app.add_option("--rtol", o.rtol, "relative residual tolerance");
  app.add_option("--restart", o.restart, "GMRES restart length");
  app.add_option("--maxit", o.maxit, "maximum GMRES iterations");
  app.add_option("--preconditioner", o.preconditioner, "none | jacobi | sgs | ilu0 | lu");
  app.add_option("--out", o.out, "output directory");
  app.add_flag("--no-vtk", o.no_vtk, "skip VTK snapshots");
  app.add_flag("--dump-matrices", o.dump_matrices, "write K and rhs in Matrix Market format");
}

stfem::RunConfig build_config(const Overrides& o) {
  stfem::RunConfig c;
  if (!o.config_path.empty()) stfem::apply_config_file(o.config_path, c);
  if (o.problem) c.problem = *o.problem;
  if (o.dim) c.spatial_dim = *o.dim;
  if (o.degree) c.degree = *o.degree;
  if (o.n0) c.initial_n = *o.n0;
  if (o.levels) c.levels = *o.levels;
  if (o.steps) c.steps = *o.steps;
  if (o.rho) c.rho = *o.rho;
  if (o.theta) c.theta = *o.theta;
  if (o.theta_mark) c.theta_mark = *o.theta_mark;
  if (o.rtol) c.rtol = *o.rtol;
  if (o.restart) c.restart = *o.restart;
  if (o.maxit) c.maxit = *o.maxit;
  if (o.preconditioner) c.preconditioner = *o.preconditioner;
  if (o.out) c.output_dir = *o.out;
  if (o.no_vtk) c.write_vtk = false;
  if (o.dump_matrices) c.dump_matrices = true;
  return c;
}

void print_header() {
  std::cout << std::setw(5) << "idx" << std::setw(10) << "elements" << std::setw(10) << "dofs" << std::setw(12)
            << "h" << std::setw(14) << "err_h" << std::setw(8) << "rate" << std::setw(14) << "J" << std::setw(14)
            << "eta2" << std::setw(7) << "iters" << std::endl;
}

void print_row(const stfem::LevelRecord& r) {
  std::cout << std::setw(5) << r.index << std::setw(10) << r.elements << std::setw(10) << r.free_dofs
            << std::setw(12) << std::setprecision(4) << r.h << std::setw(14) << std::setprecision(6);
  if (r.report.error_h) std::cout << r.report.error_h->value(); else std::cout << "-";
  std::cout << std::setw(8) << std::setprecision(3);
  if (r.rate) std::cout << *r.rate; else std::cout << "-";
  std::cout << std::setw(14) << std::setprecision(6) << r.report.cost.total() << std::setw(14);
  if (r.report.eta2) std::cout << *r.report.eta2; else std::cout << "-";
  std::cout << std::setw(7) << r.iterations << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized space-time finite elements for parabolic optimal control"};
  app.require_subcommand(1);
  Overrides convergence_opts, adaptive_opts;
  CLI::App* convergence = app.add_subcommand("convergence", "uniform refinement study on a manufactured problem");
  CLI::App* adaptive = app.add_subcommand("adaptive", "solve, estimate, mark, refine loop");
  add_options(*convergence, convergence_opts);
  add_options(*adaptive, adaptive_opts);
  CLI11_PARSE(app, argc, argv);

  try {
    print_header();
    const stfem::RunResult result = convergence->parsed()
                                        ? stfem::run_convergence_study(build_config(convergence_opts), print_row)
                                        : stfem::run_adaptive(build_config(adaptive_opts), print_row);
    if (!result.ok) std::cerr << "error: " << result.message << '\n';
    return result.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

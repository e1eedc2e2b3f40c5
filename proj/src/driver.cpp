#include "stfem/driver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "stfem/matrix_market.hpp"

namespace stfem {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof())
    throw std::invalid_argument("config: bad value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: bad value '" + value + "' for " + key);
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

std::filesystem::path output_path(const RunConfig& config, const std::string& name) {
  return std::filesystem::path(config.output_dir) / name;
}

void write_step_outputs(const RunConfig& config, int index, const SpaceTimeMesh& mesh,
                        const DiscreteSolution& discrete) {
  if (config.output_dir.empty()) return;
  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream out(output_path(config, "solver_" + std::to_string(index) + ".csv"));
    write_solver_csv(out, discrete.solver);
    if (!out) throw std::runtime_error("cannot write solver history");
  }
  if (config.write_vtk) {
    auto at_vertices = [&](const DofMap& dofs, const std::vector<double>& values) {
      std::vector<double> v(mesh.num_vertices());
      for (Index i = 0; i < mesh.num_vertices(); ++i) v[i] = values[dofs.vertex_dofs()[i]];
      return v;
    };
    const std::vector<PointData> data{{"state", at_vertices(discrete.spaces.state, discrete.state)},
                                      {"adjoint", at_vertices(discrete.spaces.adjoint, discrete.adjoint)},
                                      {"control", at_vertices(discrete.spaces.adjoint, discrete.control)}};
    write_vtk(output_path(config, "step_" + std::to_string(index) + ".vtk").string(), mesh, data);
  }
  if (config.dump_matrices) {
    write_matrix_market(output_path(config, "K_" + std::to_string(index) + ".mtx").string(),
                        discrete.system.matrix);
    write_matrix_market(output_path(config, "rhs_" + std::to_string(index) + ".mtx").string(),
                        discrete.system.rhs);
  }
}

void write_report(const RunConfig& config, const std::vector<LevelRecord>& rows) {
  if (config.output_dir.empty()) return;
  std::filesystem::create_directories(config.output_dir);
  std::ofstream out(output_path(config, "report.csv"));
  write_report_csv(out, rows);
  if (!out) throw std::runtime_error("cannot write report.csv");
}

LevelRecord make_record(int index, int n, const SpaceTimeMesh& mesh, const DiscreteSolution& discrete,
                        ErrorReport report) {
  LevelRecord r;
  r.index = index;
  r.n = n;
  r.elements = mesh.num_cells();
  r.vertices = mesh.num_vertices();
  r.h = mesh_size(mesh);
  r.free_dofs = discrete.system.size();
  r.report = std::move(report);
  r.iterations = discrete.solver.iterations;
  r.relative_residual = discrete.solver.relative_residual;
  r.converged = discrete.solver.converged;
  return r;
}

}  // namespace

void RunConfig::validate() const {
  const ProblemKind kind = parse_problem(problem);
  if (spatial_dim) {
    require(*spatial_dim == 1 || *spatial_dim == 2, "spatial_dim must be 1 or 2");
    require(kind == ProblemKind::Ball || *spatial_dim == (kind == ProblemKind::Smooth2d ? 2 : 1),
            "spatial_dim contradicts the problem");
  }
  require(degree >= 1 && degree <= 3, "degree must be 1, 2 or 3");
  require(!initial_n || *initial_n >= 1, "initial_n must be positive");
  require(!levels || *levels >= 1, "levels must be positive");
  require(steps >= 0, "steps must be nonnegative");
  require(!rho || *rho > 0.0, "rho must be positive");
  require(!theta || *theta > 0.0, "theta must be positive");
  require(theta_mark > 0.0 && theta_mark <= 1.0, "theta_mark must lie in (0,1]");
  require(rtol > 0.0 && rtol < 1.0, "rtol must lie in (0,1)");
  require(restart >= 1, "restart must be positive");
  require(maxit >= 1, "maxit must be positive");
  parse_preconditioner_kind(preconditioner);
}

void apply_config_text(std::istream& in, RunConfig& config) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "problem") config.problem = value;
    else if (key == "spatial_dim") config.spatial_dim = parse_number<int>(key, value);
    else if (key == "degree") config.degree = parse_number<int>(key, value);
    else if (key == "initial_n") config.initial_n = parse_number<int>(key, value);
    else if (key == "levels") config.levels = parse_number<int>(key, value);
    else if (key == "steps") config.steps = parse_number<int>(key, value);
    else if (key == "rho") config.rho = parse_number<double>(key, value);
    else if (key == "theta") config.theta = parse_number<double>(key, value);
    else if (key == "theta_mark") config.theta_mark = parse_number<double>(key, value);
    else if (key == "rtol") config.rtol = parse_number<double>(key, value);
    else if (key == "restart") config.restart = parse_number<int>(key, value);
    else if (key == "maxit") config.maxit = parse_number<int>(key, value);
    else if (key == "preconditioner") config.preconditioner = value;
    else if (key == "output_dir") config.output_dir = value;
    else if (key == "write_vtk") config.write_vtk = parse_bool(key, value);
    else if (key == "dump_matrices") config.dump_matrices = parse_bool(key, value);
    else throw std::invalid_argument("config line " + std::to_string(number) + ": unknown key '" + key + "'");
  }
}

void apply_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  apply_config_text(in, config);
}

ResolvedConfig resolve(const RunConfig& config) {
  config.validate();
  ResolvedConfig r;
  r.kind = parse_problem(config.problem);
  switch (r.kind) {
    case ProblemKind::Smooth2d: r.spatial_dim = 2; break;
    case ProblemKind::Smooth1d: r.spatial_dim = 1; break;
    case ProblemKind::Ball: r.spatial_dim = config.spatial_dim.value_or(2); break;
  }
  r.degree = config.degree;
  const bool ball = r.kind == ProblemKind::Ball;
  r.initial_n = config.initial_n.value_or(ball ? (r.spatial_dim == 2 ? 4 : 8) : (r.spatial_dim == 2 ? 2 : 4));
  int default_levels = 0;
  if (r.spatial_dim == 2) default_levels = r.degree == 3 ? 3 : 4;
  else default_levels = 6 - (r.degree - 1);  // n = 4..128, 4..64, 4..32
  r.levels = config.levels.value_or(default_levels);
  r.steps = config.steps;
  r.rho = config.rho.value_or(ball ? 1e-6 : 0.01);
  r.theta = config.theta.value_or(default_theta(r.spatial_dim, r.degree));
  r.theta_mark = config.theta_mark;
  r.solver = SolverOptions{config.rtol, config.restart, config.maxit};
  r.preconditioner = parse_preconditioner_kind(config.preconditioner);
  return r;
}

Problem make_problem(ProblemKind kind, int spatial_dim, double rho) {
  Problem p{kind, spatial_dim, rho, {}, std::nullopt};
  if (kind == ProblemKind::Ball) {
    p.target = [spatial_dim](const Point& x) { return ball_target(x, spatial_dim); };
  } else {
    require(spatial_dim == (kind == ProblemKind::Smooth2d ? 2 : 1), "spatial_dim contradicts the problem");
    p.exact.emplace(spatial_dim, rho);
    const ManufacturedSolution exact = *p.exact;
    p.target = [exact](const Point& x) { return exact.target(x); };
  }
  return p;
}

DiscreteSolution solve_on_mesh(const SpaceTimeMesh& mesh, const Problem& problem, int degree, double theta,
                               const SolverOptions& options, PreconditionerKind preconditioner) {
  require(mesh.spatial_dim() == problem.spatial_dim, "mesh dimension does not match the problem");
  FiniteElementSpaces spaces = make_spaces(mesh, degree);
  ProblemCoefficients coefficients;
  coefficients.varrho = problem.rho;
  BlockSystem system =
      assemble_system(mesh, spaces, coefficients, StabilizationConfig::per_element(theta), problem.target);
  const auto m = build_block_preconditioner(system, preconditioner);
  SolveResult solved = fgmres(system.matrix, system.rhs, *m, options);
  DiscreteSolution out{std::move(spaces), std::move(system), std::move(solved.x), {}, {}, {}, solved.report};
  const auto x = std::span<const double>(out.solution);
  out.state = out.spaces.state.expand(out.system.state_part(x));
  out.adjoint = out.spaces.adjoint.expand(out.system.adjoint_part(x));
  out.control = recover_control(out.adjoint, problem.rho);
  return out;
}

int error_quadrature_degree(int degree) { return 2 * degree + 4; }

ErrorReport evaluate(const SpaceTimeMesh& mesh, const Problem& problem, const DiscreteSolution& discrete,
                     std::optional<double> eta2) {
  const int quad = error_quadrature_degree(discrete.spaces.degree);
  const ReferenceElement& element = discrete.spaces.matrix_element;
  const Field yh = discrete_field(mesh, discrete.spaces.state, element, discrete.state);
  const Field ph = discrete_field(mesh, discrete.spaces.adjoint, element, discrete.adjoint);
  const Field uh = scaled(ph, -1.0 / problem.rho);
  ErrorReport report;
  report.cost = cost_functional(mesh, yh, uh, problem.target, problem.rho, quad);
  report.eta2 = eta2;
  if (problem.exact) {
    const ManufacturedSolution e = *problem.exact;
    const Field y = analytic_field([e](const Point& x) { return e.y(x); },
                                   [e](const Point& x) { return e.grad_y(x); },
                                   [e](const Point& x) { return e.lap_y(x); });
    const Field p = analytic_field([e](const Point& x) { return e.p(x); },
                                   [e](const Point& x) { return e.grad_p(x); },
                                   [e](const Point& x) { return e.lap_p(x); });
    const Field u = analytic_field([e](const Point& x) { return e.control(x); }, {});
    const Field ey = difference(y, yh);
    const Field ep = difference(p, ph);
    report.error_h = norm_h_terms(mesh, ey, ep, problem.rho, discrete.system.lambdas, quad);
    report.l2_y = l2_norm(mesh, ey, quad);
    report.l2_p = l2_norm(mesh, ep, quad);
    report.l2_u = l2_norm(mesh, difference(u, uh), quad);
  }
  return report;
}

RunResult run_convergence_study(const RunConfig& config, const ProgressCallback& progress) {
  const ResolvedConfig rc = resolve(config);
  require(rc.kind != ProblemKind::Ball, "a convergence study needs a manufactured problem");
  const Problem problem = make_problem(rc.kind, rc.spatial_dim, rc.rho);
  RunResult result;
  for (int level = 0; level < rc.levels; ++level) {
    const int n = rc.initial_n << level;
    SpaceTimeMesh mesh = build_structured_mesh(rc.spatial_dim, n, 1.0);
    const DiscreteSolution discrete =
        solve_on_mesh(mesh, problem, rc.degree, rc.theta, rc.solver, rc.preconditioner);
    LevelRecord record = make_record(level, n, mesh, discrete, evaluate(mesh, problem, discrete));
    if (!result.rows.empty()) {
      const LevelRecord& prev = result.rows.back();
      record.rate = std::log(prev.report.error_h->value() / record.report.error_h->value()) /
                    std::log(prev.h / record.h);
    }
    if (progress) progress(record);
    result.rows.push_back(std::move(record));
    write_step_outputs(config, level, mesh, discrete);
    result.final_mesh = std::move(mesh);
    if (!discrete.solver.converged) {
      result.ok = false;
      result.message = "solver did not converge on level " + std::to_string(level);
      break;
    }
  }
  write_report(config, result.rows);
  return result;
}

RunResult run_adaptive(const RunConfig& config, const ProgressCallback& progress) {
  const ResolvedConfig rc = resolve(config);
  const Problem problem = make_problem(rc.kind, rc.spatial_dim, rc.rho);
  ProblemCoefficients coefficients;
  coefficients.varrho = rc.rho;
  RunResult result;
  SpaceTimeMesh mesh = build_structured_mesh(rc.spatial_dim, rc.initial_n, 1.0);
  for (int step = 0; step <= rc.steps; ++step) {
    const DiscreteSolution discrete =
        solve_on_mesh(mesh, problem, rc.degree, rc.theta, rc.solver, rc.preconditioner);
    const ResidualIndicator eta = residual_indicator(mesh, discrete.spaces, discrete.state, discrete.adjoint,
                                                     problem.target, coefficients);
    std::vector<Index> marked = doerfler_mark(eta.total, rc.theta_mark);
    LevelRecord record = make_record(step, 0, mesh, discrete, evaluate(mesh, problem, discrete, eta.sum()));
    record.marked = static_cast<Index>(marked.size());
    if (progress) progress(record);
    result.rows.push_back(std::move(record));
    write_step_outputs(config, step, mesh, discrete);
    if (!discrete.solver.converged) {
      result.ok = false;
      result.message = "solver did not converge at step " + std::to_string(step);
      break;
    }
    if (step == rc.steps) {
      result.last_marked = std::move(marked);
      break;
    }
    mesh = refine(mesh, marked);
  }
  result.final_mesh = std::move(mesh);
  write_report(config, result.rows);
  return result;
}

std::string report_csv_header() {
  return "index,n,elements,vertices,h,free_dofs,error_h,rate,error_h_state_trace,error_h_state_grad,"
         "error_h_state_dt,error_h_adjoint_trace,error_h_adjoint_grad,error_h_adjoint_dt,l2_y,l2_p,l2_u,"
         "J,J_tracking,J_control,eta2,marked,iterations,relres,converged";
}

void write_report_csv(std::ostream& out, const std::vector<LevelRecord>& rows) {
  out << report_csv_header() << '\n' << std::setprecision(16);
  for (const LevelRecord& r : rows) {
    out << r.index << ',' << r.n << ',' << r.elements << ',' << r.vertices << ',' << r.h << ',' << r.free_dofs
        << ',';
    const auto& e = r.report.error_h;
    write_optional(out, e ? std::optional<double>(e->value()) : std::nullopt);
    out << ',';
    write_optional(out, r.rate);
    for (double NormHTerms::*term : {&NormHTerms::state_trace, &NormHTerms::state_grad, &NormHTerms::state_dt,
                                      &NormHTerms::adjoint_trace, &NormHTerms::adjoint_grad,
                                      &NormHTerms::adjoint_dt}) {
      out << ',';
      if (e) out << (*e).*term;
    }
    out << ',';
    write_optional(out, r.report.l2_y);
    out << ',';
    write_optional(out, r.report.l2_p);
    out << ',';
    write_optional(out, r.report.l2_u);
    out << ',' << r.report.cost.total() << ',' << r.report.cost.tracking << ',' << r.report.cost.control << ',';
    write_optional(out, r.report.eta2);
    out << ',';
    if (r.marked) out << *r.marked;
    out << ',' << r.iterations << ',' << r.relative_residual << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

}  // namespace stfem

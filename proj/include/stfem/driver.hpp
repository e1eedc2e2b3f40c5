#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stfem/assembly.hpp"
#include "stfem/estimate.hpp"
#include "stfem/mesh.hpp"
#include "stfem/problems.hpp"
#include "stfem/solver.hpp"

namespace stfem {

/// Everything a run needs. Unset optionals take problem-dependent defaults.
struct RunConfig {
  std::string problem = "smooth2d";      // smooth2d | smooth1d | ball
  std::optional<int> spatial_dim;        // ball only; smooth problems fix d
  int degree = 1;
  std::optional<int> initial_n;          // subdivisions of the coarsest mesh
  std::optional<int> levels;             // convergence study: number of uniform levels
  int steps = 20;                        // adaptive: refinement steps
  std::optional<double> rho;             // 0.01 for smooth problems, 1e-6 for the ball
  std::optional<double> theta;           // stabilization lambda_K = theta h_K^2
  double theta_mark = 0.5;
  double rtol = 1e-8;
  int restart = 50;
  int maxit = 500;
  std::string preconditioner = "lu";
  std::string output_dir;                // empty: no files
  bool write_vtk = true;
  bool dump_matrices = false;            // Matrix Market K and rhs per level

  /// Throws std::invalid_argument for out-of-range values.
  void validate() const;
};

/// Applies `key = value` lines ('#' starts a comment) on top of `config`.
void apply_config_text(std::istream& in, RunConfig& config);
void apply_config_file(const std::string& path, RunConfig& config);

/// RunConfig with every default resolved.
struct ResolvedConfig {
  ProblemKind kind;
  int spatial_dim;
  int degree;
  int initial_n;
  int levels;
  int steps;
  double rho;
  double theta;
  double theta_mark;
  SolverOptions solver;
  PreconditionerKind preconditioner;
};

ResolvedConfig resolve(const RunConfig& config);

/// Target and, for manufactured problems, the exact solution.
struct Problem {
  ProblemKind kind;
  int spatial_dim;
  double rho;
  ScalarFunction target;
  std::optional<ManufacturedSolution> exact;
};

Problem make_problem(ProblemKind kind, int spatial_dim, double rho);

/// Assembled and solved discretization on one mesh.
struct DiscreteSolution {
  FiniteElementSpaces spaces;
  BlockSystem system;
  std::vector<double> solution;  // free values, state block first
  std::vector<double> state;     // nodal, all dofs
  std::vector<double> adjoint;
  std::vector<double> control;   // -adjoint / rho
  SolverReport solver;
};

DiscreteSolution solve_on_mesh(const SpaceTimeMesh& mesh, const Problem& problem, int degree, double theta,
                               const SolverOptions& options, PreconditionerKind preconditioner);

/// Errors against the exact solution (if any), J and optionally eta^2.
ErrorReport evaluate(const SpaceTimeMesh& mesh, const Problem& problem, const DiscreteSolution& discrete,
                     std::optional<double> eta2 = std::nullopt);

/// Quadrature degree used for error norms and J at polynomial degree k.
int error_quadrature_degree(int degree);

struct LevelRecord {
  int index = 0;              // level or adaptive step
  int n = 0;                  // subdivisions for uniform levels, 0 for adaptive meshes
  Index elements = 0;
  Index vertices = 0;
  double h = 0.0;
  Index free_dofs = 0;
  ErrorReport report;
  std::optional<double> rate;
  std::optional<Index> marked;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct RunResult {
  std::vector<LevelRecord> rows;
  bool ok = true;
  std::string message;
  std::optional<SpaceTimeMesh> final_mesh;
  std::vector<Index> last_marked;  // Doerfler set computed on the final mesh (adaptive runs)
};

/// Called after every level or step has been recorded.
using ProgressCallback = std::function<void(const LevelRecord&)>;

RunResult run_convergence_study(const RunConfig& config, const ProgressCallback& progress = {});
RunResult run_adaptive(const RunConfig& config, const ProgressCallback& progress = {});

/// Fixed column set; absent quantities are empty fields.
void write_report_csv(std::ostream& out, const std::vector<LevelRecord>& rows);
std::string report_csv_header();

}  // namespace stfem

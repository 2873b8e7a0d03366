#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "occuval/sdp/conic_problem.hpp"

namespace occuval::sdp {

enum class SolveStatus {
  kOptimal,
  kNearOptimal,
  kInfeasible,
  kUnbounded,
  kSolverFailure,
};
std::string to_string(SolveStatus s);

struct SolverOptions {
  /// "ipm" (built-in Schur-complement interior point) or "clarabel".
  std::string backend = "ipm";
  std::string preset = "default";
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  /// Looser level at which a stalled solve is still reported near-optimal.
  double tol_near = 1e-5;
  /// Residual allowed on the certificate side of a near-optimal solve; moment
  /// relaxations often have a non-attained dual, so this stalls first.
  double tol_near_primal = 1e-3;
  int max_iter = 150;
  double step_fraction = 0.95;
  /// Iterative refinement passes on each Newton solve.
  int refine_steps = 2;
  bool verbose = false;
  /// Local verification thresholds.
  double psd_tol = 1e-6;
  double eq_tol = 1e-6;

  /// "default", "precise" or "fast"; throws on anything else.
  static SolverOptions from_preset(std::string_view name);
  /// Preset named by OCCUVAL_SOLVER_PRESET, or the default.
  static SolverOptions from_env();
};

struct SolveResult {
  SolveStatus status = SolveStatus::kSolverFailure;
  /// Objective value at the returned moments (maximization form).
  double bound = 0.0;
  Eigen::VectorXd y;
  int iterations = 0;
  double solve_seconds = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  /// Filled by local verification.
  double min_eigenvalue = 0.0;
  double equality_residual = 0.0;
  bool verified = false;
  std::string backend;
  std::string message;

  bool has_bound() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kNearOptimal;
  }
};

class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual std::string name() const = 0;
  /// Backend solve without local verification.
  virtual SolveResult solve_raw(const ConicProblem& p,
                                const SolverOptions& opts) const = 0;
};

std::unique_ptr<ConicSolver> make_solver(std::string_view backend);
std::vector<std::string> available_backends();

/// Validates, solves with the configured backend and re-verifies the
/// returned moments: blocks must have min eigenvalue >= -psd_tol and rows a
/// relative residual <= eq_tol, otherwise an optimal status is downgraded.
SolveResult solve(const ConicProblem& p, const SolverOptions& opts = {});

}  // namespace occuval::sdp

#include "occuval/sdp/solver.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "schur_ipm.hpp"
#ifdef OCCUVAL_HAVE_CLARABEL
#include "clarabel_solver.hpp"
#endif

namespace occuval::sdp {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kNearOptimal: return "near-optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kSolverFailure: return "solver-failure";
  }
  return "?";
}

SolverOptions SolverOptions::from_preset(std::string_view name) {
  SolverOptions o;
  o.preset = std::string(name);
  if (name == "default") return o;
  if (name == "precise") {
    o.tol_gap = 1e-10;
    o.tol_feas = 1e-10;
    o.max_iter = 300;
    return o;
  }
  if (name == "fast") {
    o.tol_gap = 1e-6;
    o.tol_feas = 1e-6;
    o.tol_near = 1e-4;
    o.max_iter = 80;
    return o;
  }
  throw std::invalid_argument("unknown solver preset '" + std::string(name) +
                              "' (expected default, precise or fast)");
}

SolverOptions SolverOptions::from_env() {
  const char* env = std::getenv("OCCUVAL_SOLVER_PRESET");
  return from_preset(env && *env ? env : "default");
}

std::unique_ptr<ConicSolver> make_solver(std::string_view backend) {
  if (backend == "ipm") return std::make_unique<SchurIpmSolver>();
#ifdef OCCUVAL_HAVE_CLARABEL
  if (backend == "clarabel") return std::make_unique<ClarabelSolver>();
#endif
  throw std::invalid_argument("solver backend '" + std::string(backend) +
                              "' is not available");
}

std::vector<std::string> available_backends() {
  std::vector<std::string> out{"ipm"};
#ifdef OCCUVAL_HAVE_CLARABEL
  out.push_back("clarabel");
#endif
  return out;
}

SolveResult solve(const ConicProblem& p, const SolverOptions& opts) {
  p.validate();
  auto solver = make_solver(opts.backend);
  SolveResult r = solver->solve_raw(p, opts);
  r.backend = solver->name();
  if (!r.has_bound()) return r;
  if (static_cast<std::size_t>(r.y.size()) != p.num_vars || !r.y.allFinite()) {
    r.status = SolveStatus::kSolverFailure;
    r.message = "backend returned an unusable moment vector";
    return r;
  }
  r.bound = p.objective_value(r.y);
  r.min_eigenvalue = p.min_block_eigenvalue(r.y);
  r.equality_residual = p.max_equality_residual(r.y);
  r.verified = r.min_eigenvalue >= -opts.psd_tol && r.equality_residual <= opts.eq_tol;
  if (!r.verified && r.status == SolveStatus::kOptimal) {
    std::ostringstream os;
    os << "local verification failed (min eigenvalue " << r.min_eigenvalue
       << ", equality residual " << r.equality_residual << ")";
    r.status = SolveStatus::kNearOptimal;
    r.message = r.message.empty() ? os.str() : r.message + "; " + os.str();
  }
  return r;
}

}  // namespace occuval::sdp

#pragma once

#include "occuval/sdp/solver.hpp"

namespace occuval::sdp {

/// Infeasible-start primal-dual interior point method (HKM direction,
/// Mehrotra predictor-corrector) for
///
///   max b'y  s.t.  Z_k = C_k + sum_v y_v F_{k,v} >= 0,  E y = f.
///
/// The Schur complement is formed entrywise from the sparse F_{k,v} and
/// factored per connected group of variables (blocks that share moment
/// variables); equality rows are handled through E S^-1 E'.
class SchurIpmSolver final : public ConicSolver {
 public:
  std::string name() const override { return "ipm"; }
  SolveResult solve_raw(const ConicProblem& p,
                        const SolverOptions& opts) const override;
};

}  // namespace occuval::sdp

#pragma once

#include "occuval/sdp/solver.hpp"

namespace occuval::sdp {

/// Clarabel (external interior point solver) through its C shim. Moment
/// blocks become PSD triangle cones, equality rows a zero cone.
class ClarabelSolver final : public ConicSolver {
 public:
  std::string name() const override { return "clarabel"; }
  SolveResult solve_raw(const ConicProblem& p,
                        const SolverOptions& opts) const override;
};

}  // namespace occuval::sdp

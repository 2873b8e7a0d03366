#include "clarabel_solver.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseCore>

#include "occuval_clarabel.h"

namespace occuval::sdp {

SolveResult ClarabelSolver::solve_raw(const ConicProblem& p,
                                      const SolverOptions& opts) const {
  using Eigen::Index;
  const auto n = static_cast<Index>(p.num_vars);
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> b;
  Index row = 0;
  for (const auto& r : p.rows) {
    for (const auto& t : r.terms) trips.emplace_back(row, static_cast<Index>(t.var), t.coeff);
    b.push_back(r.rhs);
    ++row;
  }
  const std::size_t nzero = p.rows.size();
  std::vector<std::size_t> sides;
  const double r2 = std::sqrt(2.0);
  for (const auto& blk : p.blocks) {
    const std::size_t dim = blk.side * (blk.side + 1) / 2;
    std::vector<double> cst(dim, 0.0);
    for (const auto& e : blk.entries) {
      const std::size_t k = e.col * (e.col + 1) / 2 + e.row;
      const double scale = e.row == e.col ? 1.0 : r2;
      cst[k] += scale * e.constant;
      for (const auto& t : e.terms) {
        trips.emplace_back(row + static_cast<Index>(k), static_cast<Index>(t.var), -scale * t.coeff);
      }
    }
    b.insert(b.end(), cst.begin(), cst.end());
    row += static_cast<Index>(dim);
    sides.push_back(blk.side);
  }
  Eigen::SparseMatrix<double, Eigen::ColMajor, std::ptrdiff_t> A(row, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  std::vector<std::size_t> colptr(A.outerIndexPtr(), A.outerIndexPtr() + n + 1);
  std::vector<std::size_t> rowval(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros());
  std::vector<double> q(static_cast<std::size_t>(n), 0.0);
  for (const auto& t : p.objective) q[t.var] -= t.coeff;

  SolveResult res;
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  double info[7] = {0};
  const int rc = occuval_clarabel_solve(
      static_cast<std::size_t>(n), static_cast<std::size_t>(row), colptr.data(),
      rowval.data(), A.valuePtr(), b.data(), q.data(), nzero, sides.size(),
      sides.data(), opts.tol_gap, opts.tol_feas,
      static_cast<std::uint32_t>(opts.max_iter), opts.verbose ? 1 : 0, x.data(), info);
  if (rc != 0) {
    res.status = SolveStatus::kSolverFailure;
    res.message = "clarabel rejected the problem (code " + std::to_string(rc) + ")";
    return res;
  }
  res.y = Eigen::Map<Eigen::VectorXd>(x.data(), n);
  res.primal_objective = -info[1] + p.objective_constant;
  res.dual_objective = -info[2] + p.objective_constant;
  res.gap = std::abs(info[1] - info[2]);
  res.iterations = static_cast<int>(info[3]);
  res.solve_seconds = info[4];
  res.primal_infeasibility = info[5];
  res.dual_infeasibility = info[6];
  res.bound = res.primal_objective;
  switch (static_cast<int>(info[0])) {
    case 0: res.status = SolveStatus::kOptimal; break;
    case 1: res.status = SolveStatus::kNearOptimal; res.message = "reduced accuracy"; break;
    case 2: res.status = SolveStatus::kInfeasible; break;
    case 3: res.status = SolveStatus::kUnbounded; break;
    case 4: res.status = SolveStatus::kSolverFailure; res.message = "iteration or time limit"; break;
    default: res.status = SolveStatus::kSolverFailure; res.message = "numerical error"; break;
  }
  return res;
}

}  // namespace occuval::sdp

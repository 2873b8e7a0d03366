#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "occuval/liouville/relaxation.hpp"
#include "occuval/sdp/conic_problem.hpp"
#include "occuval/sdp/hierarchy.hpp"
#include "occuval/sdp/solver.hpp"
#include "test_support.hpp"

using namespace occuval;
using namespace occuval::sdp;
using poly::Polynomial;
using poly::Var;

namespace {

/// Moments of a measure on [-1, 1]: y0 = 1, [y0 y1; y1 y2] >= 0, y0 - y2 >= 0.
/// Maximizing y2 gives 1 (mass at the endpoints).
ConicProblem dirac_moment_problem(bool pin_first) {
  ConicProblem p;
  p.num_vars = 3;
  p.rows.push_back({{{0, 1.0}}, 1.0, RowKind::kMass, "mass"});
  if (pin_first) p.rows.push_back({{{1, 1.0}}, 0.0, RowKind::kPin, "pin"});
  PsdBlock m{"moment", 2, {}};
  m.entries.push_back({0, 0, {{0, 1.0}}, 0.0});
  m.entries.push_back({0, 1, {{1, 1.0}}, 0.0});
  m.entries.push_back({1, 1, {{2, 1.0}}, 0.0});
  p.blocks.push_back(m);
  PsdBlock l{"localizing", 1, {}};
  l.entries.push_back({0, 0, {{0, 1.0}, {2, -1.0}}, 0.0});
  p.blocks.push_back(l);
  p.objective = {{2, 1.0}};
  return p;
}

/// max t s.t. [y0 t; t 1] >= 0, [[2 t 0][t 3 t][0 t y0]] >= 0, y0 = 1.
ConicProblem small_lmi() {
  ConicProblem p;
  p.num_vars = 2;
  p.rows.push_back({{{0, 1.0}}, 1.0, RowKind::kMass, "mass"});
  PsdBlock a{"a", 2, {}};
  a.entries.push_back({0, 0, {{0, 1.0}}, 0.0});
  a.entries.push_back({0, 1, {{1, 1.0}}, 0.0});
  a.entries.push_back({1, 1, {}, 1.0});
  PsdBlock b{"b", 3, {}};
  b.entries.push_back({0, 0, {}, 2.0});
  b.entries.push_back({0, 1, {{1, 1.0}}, 0.0});
  b.entries.push_back({1, 1, {}, 3.0});
  b.entries.push_back({1, 2, {{1, 1.0}}, 0.0});
  b.entries.push_back({2, 2, {{0, 1.0}}, 0.0});
  p.blocks = {a, b};
  p.objective = {{1, 1.0}};
  return p;
}

liouville::ValidationProblem decay() { return testkit::decay_problem(); }

}  // namespace

TEST(Solve, TrivialEquality) {
  ConicProblem p;
  p.num_vars = 1;
  p.rows.push_back({{{0, 1.0}}, 1.0, RowKind::kMass, "mass"});
  PsdBlock b{"b", 1, {{0, 0, {{0, 1.0}}, 0.0}}};
  p.blocks.push_back(b);
  p.objective = {{0, 1.0}};
  const auto r = solve(p);
  ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.message;
  EXPECT_NEAR(r.bound, 1.0, 1e-7);
  EXPECT_TRUE(r.verified);
}

TEST(Solve, DiracMomentProblem) {
  const auto r = solve(dirac_moment_problem(true));
  ASSERT_TRUE(r.has_bound()) << r.message;
  EXPECT_NEAR(r.bound, 1.0, 1e-6);
  EXPECT_NEAR(r.y(1), 0.0, 1e-6);
}

TEST(Solve, SmallLmiClosedForm) {
  // block a gives |t| <= 1, and b stays positive definite at t = 1
  const auto r = solve(small_lmi());
  ASSERT_TRUE(r.has_bound()) << r.message;
  Eigen::Matrix3d B;
  B << 2, 1, 0, 1, 3, 1, 0, 1, 1;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(B);
  ASSERT_GT(es.eigenvalues().minCoeff(), 0.0);
  EXPECT_NEAR(r.bound, 1.0, 1e-6);
}

TEST(Solve, InfeasiblePair) {
  ConicProblem p;
  p.num_vars = 1;
  p.rows.push_back({{{0, 1.0}}, 1.0, RowKind::kMass, "a"});
  p.rows.push_back({{{0, 1.0}}, 2.0, RowKind::kPin, "b"});
  p.blocks.push_back(PsdBlock{"b", 1, {{0, 0, {{0, 1.0}}, 0.0}}});
  p.objective = {{0, 1.0}};
  const auto r = solve(p);
  EXPECT_EQ(r.status, SolveStatus::kInfeasible) << to_string(r.status) << " " << r.message;
  EXPECT_FALSE(r.has_bound());
}

TEST(Solve, DeterministicResolve) {
  const auto relax = liouville::assemble_relaxation(decay(), 2, false);
  const auto a = solve(relax.problem);
  const auto b = solve(relax.problem);
  ASSERT_TRUE(a.has_bound());
  EXPECT_NEAR(a.bound, b.bound, 1e-7);
  EXPECT_EQ(relax.problem.hash(), liouville::assemble_relaxation(decay(), 2, false).problem.hash());
}

TEST(Solve, BackendsAgree) {
  const auto backends = available_backends();
  if (std::find(backends.begin(), backends.end(), "clarabel") == backends.end()) {
    GTEST_SKIP() << "clarabel backend not built";
  }
  SolverOptions o;
  o.backend = "clarabel";
  for (const auto& p : {dirac_moment_problem(true), small_lmi(),
                        liouville::assemble_relaxation(decay(), 2, false).problem}) {
    const auto a = solve(p);
    const auto b = solve(p, o);
    ASSERT_TRUE(a.has_bound());
    ASSERT_TRUE(b.has_bound()) << b.message;
    EXPECT_NEAR(a.bound, b.bound, 1e-6);
  }
}

TEST(Solve, UnknownBackendAndPreset) {
  EXPECT_THROW((void)make_solver("mosek"), std::invalid_argument);
  EXPECT_THROW((void)SolverOptions::from_preset("turbo"), std::invalid_argument);
  EXPECT_LT(SolverOptions::from_preset("precise").tol_gap, SolverOptions{}.tol_gap);
  setenv("OCCUVAL_SOLVER_PRESET", "fast", 1);
  EXPECT_EQ(SolverOptions::from_env().preset, "fast");
  unsetenv("OCCUVAL_SOLVER_PRESET");
  EXPECT_EQ(SolverOptions::from_env().preset, "default");
}

TEST(ConicProblem, ValidationErrors) {
  auto p = dirac_moment_problem(false);
  EXPECT_NO_THROW(p.validate());
  auto lower = p;
  lower.blocks[0].entries[1].row = 1;
  lower.blocks[0].entries[1].col = 0;
  EXPECT_THROW(lower.validate(), ProblemError);
  auto undeclared = p;
  undeclared.objective = {{7, 1.0}};
  EXPECT_THROW(undeclared.validate(), ProblemError);
  auto nomass = p;
  nomass.rows.clear();
  EXPECT_THROW(nomass.validate(), ProblemError);
}

TEST(ConicProblem, HashTracksContent) {
  auto p = dirac_moment_problem(false);
  const auto h = p.hash();
  EXPECT_EQ(h, dirac_moment_problem(false).hash());
  p.objective[0].coeff = 1.0000001;
  EXPECT_NE(h, p.hash());
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Verdict, Examples) {
  EXPECT_EQ(verdict(2.8e-5, 1.9e-10, 0.003), Verdict::kCertified);
  EXPECT_EQ(verdict(0.459, 0.4458, 0.003), Verdict::kNotCertified);
  EXPECT_EQ(verdict(0.01, 1e-6, 0.003), Verdict::kInconclusive);
  EXPECT_THROW((void)verdict(0.1, 0.2, 0.003), SandwichError);
  EXPECT_EQ(verdict(0.2 - 5e-7, 0.2, 0.003), Verdict::kNotCertified);
}

TEST(Hierarchy, DecayIsMonotoneAndCertified) {
  HierarchyOptions o;
  o.orders = {1, 2, 3};
  o.threshold = 0.2;
  MonteCarloSummary mc;
  mc.worst_cost = std::exp(-2.0);
  mc.argmax_initial = Eigen::VectorXd::Constant(1, 1.0);
  mc.state_names = {"lx"};
  mc.trajectories = 1;
  std::vector<int> seen;
  o.on_solved = [&](const OrderResult& r) { seen.push_back(r.order); };
  const auto rep = run_hierarchy(decay(), o, mc);
  EXPECT_EQ(seen, o.orders);
  ASSERT_EQ(rep.orders.size(), 3u);
  EXPECT_TRUE(rep.monotone);
  for (std::size_t k = 1; k < rep.orders.size(); ++k) {
    EXPECT_LE(rep.orders[k].solve.bound, rep.orders[k - 1].solve.bound + kMonotoneTolerance);
  }
  EXPECT_EQ(rep.verdict, Verdict::kCertified);
  EXPECT_FALSE(rep.violating_initial.has_value());

  o.threshold = 0.1;
  const auto fail = run_hierarchy(decay(), o, mc);
  EXPECT_EQ(fail.verdict, Verdict::kNotCertified);
  ASSERT_TRUE(fail.violating_initial.has_value());
  EXPECT_EQ((*fail.violating_initial)(0), 1.0);
}

TEST(Hierarchy, SandwichViolationIsAnError) {
  HierarchyOptions o;
  o.orders = {3};
  MonteCarloSummary mc;
  mc.worst_cost = 0.5;  // above the true value e^-2
  mc.argmax_initial = Eigen::VectorXd::Constant(1, 1.0);
  EXPECT_THROW((void)run_hierarchy(decay(), o, mc), SandwichError);
  o.orders = {2, 1};
  EXPECT_THROW((void)run_hierarchy(decay(), o, std::nullopt), std::invalid_argument);
}

TEST(Hierarchy, ReportJsonIsDeterministicOutsideMetadata) {
  HierarchyOptions o;
  o.orders = {1, 2};
  const auto a = run_hierarchy(decay(), o, std::nullopt);
  const auto b = run_hierarchy(decay(), o, std::nullopt);
  auto ja = nlohmann::json::parse(report_json(a, {"2026-01-01T00:00:00Z", "x", "ipm", "default"}));
  auto jb = nlohmann::json::parse(report_json(b, {"2026-02-02T00:00:00Z", "x", "ipm", "default"}));
  EXPECT_EQ(ja["schema"], kReportSchema);
  EXPECT_EQ(ja["verdict"], "inconclusive");
  EXPECT_DOUBLE_EQ(ja["orders"][1]["concave_value"].get<double>(),
                   -ja["orders"][1]["bound"].get<double>());
  ja.erase("metadata");
  jb.erase("metadata");
  EXPECT_EQ(ja.dump(), jb.dump());
  const auto table = report_table(a);
  EXPECT_NE(table.find("upper bound"), std::string::npos);
}

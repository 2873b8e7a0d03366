#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "occuval/f16/pipeline.hpp"
#include "occuval/liouville/relaxation.hpp"
#include "occuval/poly/monomial_basis.hpp"
#include "occuval/poly/polynomial.hpp"
#include "occuval/sdp/solver.hpp"
#include "occuval/sim/compiled_field.hpp"
#include "occuval/sim/integrate.hpp"

using namespace occuval;

namespace {

poly::Polynomial dense_polynomial(const std::vector<poly::Var>& vars, int degree,
                                  std::mt19937_64& rng) {
  const poly::MonomialBasis basis(vars, degree);
  const auto u = poly::make_universe(vars);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  poly::Polynomial p = poly::Polynomial(0.0).with_universe(u);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    p += poly::Polynomial::monomial(basis.monomial(k), c(rng), u);
  }
  return p;
}

}  // namespace

static void BM_PolynomialMultiply(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const std::vector<poly::Var> vars{poly::Var("b0"), poly::Var("b1"), poly::Var("b2"),
                                    poly::Var("b3"), poly::Var("b4")};
  std::mt19937_64 rng(1);
  const auto p = dense_polynomial(vars, degree, rng);
  const auto q = dense_polynomial(vars, degree, rng);
  for (auto _ : state) benchmark::DoNotOptimize(p * q);
  state.SetLabel(std::to_string(p.terms().size()) + " terms each");
}
BENCHMARK(BM_PolynomialMultiply)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

static void BM_FieldEvaluation(benchmark::State& state) {
  const auto pf = f16::default_problem();
  const auto mode = state.range(0) == 0 ? f16::LoopMode::kLqr : f16::LoopMode::kMrac;
  sim::CompiledSystem sys(f16::physical_system(pf, {mode, 0.314159}));
  std::vector<double> x(sys.dimension(), 0.05), out(sys.dimension());
  for (auto _ : state) {
    const auto cell = sys.active_cell(0.5, x);
    sys.field(cell, 0.5, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(f16::to_string(mode));
}
BENCHMARK(BM_FieldEvaluation)->Arg(0)->Arg(1);

static void BM_Trajectory(benchmark::State& state) {
  const auto pf = f16::default_problem();
  const auto mode = state.range(0) == 0 ? f16::LoopMode::kLqr : f16::LoopMode::kMrac;
  sim::CompiledSystem sys(f16::physical_system(pf, {mode, 0.314159}));
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.dimension()));
  x0(1) = 0.1;
  sim::IntegrationOptions o;
  o.dt = pf.dt;
  o.record_every = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(sim::integrate(sys, x0, pf.horizon, o));
  state.SetLabel(f16::to_string(mode) + ", 10 s at dt 0.001");
}
BENCHMARK(BM_Trajectory)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_AssembleLqr(benchmark::State& state) {
  const auto pf = f16::default_problem();
  const auto prob = f16::validation_problem(pf, {f16::LoopMode::kLqr, 0.314159});
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(liouville::assemble_relaxation(prob, d, false));
}
BENCHMARK(BM_AssembleLqr)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_AssembleMracSparse(benchmark::State& state) {
  const auto pf = f16::default_problem();
  const auto prob = f16::validation_problem(pf, {f16::LoopMode::kMrac, 0.314159});
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(liouville::assemble_relaxation(prob, d, true));
}
BENCHMARK(BM_AssembleMracSparse)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_SolveLqr(benchmark::State& state) {
  const auto pf = f16::default_problem();
  const auto prob = f16::validation_problem(pf, {f16::LoopMode::kLqr, 1.0});
  const auto relax = liouville::assemble_relaxation(prob, static_cast<int>(state.range(0)), false);
  for (auto _ : state) benchmark::DoNotOptimize(sdp::solve(relax.problem));
}
BENCHMARK(BM_SolveLqr)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

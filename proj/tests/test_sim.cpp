#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "occuval/f16/pipeline.hpp"
#include "occuval/sim/compiled_field.hpp"
#include "occuval/sim/integrate.hpp"
#include "occuval/sim/plot_data.hpp"
#include "occuval/sim/sweep.hpp"

using namespace occuval;
using poly::Polynomial;
using poly::Var;

namespace {

const double kDeg = M_PI / 180.0;

/// dx/dt = rate * x (+ bias), one cell.
model::PiecewiseSystem scalar(double rate, double bias = 0.0, int power = 1) {
  const Var x("sx"), t("st");
  model::PiecewiseSystem sys;
  sys.time = t;
  sys.states = {x};
  model::Cell c;
  c.name = "all";
  c.field = {rate * Polynomial::variable(x, poly::make_universe({x})).pow(power) + bias};
  sys.cells.push_back(c);
  return sys;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(f, line);) out.push_back(line);
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("occuval_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Integrate, ExponentialDecay) {
  const auto sys = scalar(-1.0);
  sim::IntegrationOptions o;
  o.dt = 0.001;
  const auto tr = sim::integrate(sys, Eigen::VectorXd::Constant(1, 1.0), 1.0, o);
  EXPECT_NEAR(tr.terminal()(0), std::exp(-1.0), 1e-9);
  EXPECT_EQ(tr.steps, 1000u);
  EXPECT_DOUBLE_EQ(tr.final_time(), 1.0);
}

TEST(Integrate, ZeroFieldIsConstant) {
  const auto sys = scalar(0.0);
  const auto tr = sim::integrate(sys, Eigen::VectorXd::Constant(1, 0.3), 1.0);
  for (const auto& s : tr.states) EXPECT_EQ(s(0), 0.3);
}

TEST(Integrate, Rk4IsFourthOrder) {
  const auto sys = scalar(-1.0);
  auto err = [&](double dt) {
    sim::IntegrationOptions o;
    o.dt = dt;
    return std::abs(sim::integrate(sys, Eigen::VectorXd::Constant(1, 1.0), 1.0, o).terminal()(0) -
                    std::exp(-1.0));
  };
  const double ratio = err(0.01) / err(0.005);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Integrate, EulerIsFirstOrder) {
  const auto sys = scalar(-1.0);
  auto err = [&](double dt) {
    sim::IntegrationOptions o;
    o.dt = dt;
    o.method = sim::Method::kEuler;
    return std::abs(sim::integrate(sys, Eigen::VectorXd::Constant(1, 1.0), 1.0, o).terminal()(0) -
                    std::exp(-1.0));
  };
  EXPECT_NEAR(err(0.01) / err(0.005), 2.0, 0.1);
}

TEST(Integrate, StepMustDivideHorizon) {
  EXPECT_EQ(sim::step_count(10.0, 0.001), 10000u);
  EXPECT_THROW((void)sim::step_count(1.0, 0.3), std::invalid_argument);
}

TEST(Integrate, ContainmentAndDivergence) {
  const auto grow = scalar(1.0);
  sim::IntegrationOptions o;
  o.containment = sim::StateBox{{-2.0}, {2.0}};
  const auto tr = sim::integrate(grow, Eigen::VectorXd::Constant(1, 1.0), 1.0, o);
  ASSERT_TRUE(tr.first_exit.has_value());
  EXPECT_NEAR(tr.first_exit->time, std::log(2.0), 2e-3);
  EXPECT_EQ(tr.first_exit->component, 0u);

  const auto blowup = scalar(1.0, 0.0, 2);  // x' = x^2 blows up at t = 1
  EXPECT_THROW((void)sim::integrate(blowup, Eigen::VectorXd::Constant(1, 1.0), 2.0),
               sim::DivergenceError);
}

TEST(Integrate, LqrTracksCommandFromRest) {
  const auto pf = f16::default_problem();
  const auto sys = f16::physical_system(pf, {f16::LoopMode::kLqr, 1.0});
  const auto tr = sim::integrate(sys, Eigen::VectorXd::Zero(4), 10.0);
  const double J = sim::trajectory_cost(tr, pf.command);
  EXPECT_LT(J, 1e-6);
  EXPECT_NEAR(tr.terminal()(1), 10 * kDeg, 1e-3);
}

TEST(Integrate, RecordedCellMatchesGuard) {
  const auto pf = f16::default_problem();
  const double phi_max = 0.314159;
  const auto sys = f16::physical_system(pf, {f16::LoopMode::kLqr, phi_max});
  Eigen::VectorXd x0(4);
  // starts beyond phi_max and settles below it
  x0 << 0.0, 25 * kDeg, 0.0, 0.0;
  const auto tr = sim::integrate(sys, x0, 10.0);
  bool saw_nominal = false;
  bool saw_degraded = false;
  for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
    const double phi = std::abs(tr.states[k](1));
    if (phi > phi_max) {
      EXPECT_EQ(tr.cells[k], 1u);
      saw_degraded = true;
    } else {
      EXPECT_EQ(tr.cells[k], 0u);
      saw_nominal = true;
    }
  }
  EXPECT_TRUE(saw_degraded);
  EXPECT_TRUE(saw_nominal);
}

TEST(Cost, Examples) {
  sim::Trajectory tr;
  tr.times = {0.0};
  const Eigen::Vector2d c(0.0, 0.17453);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  tr.states = {x};
  EXPECT_NEAR(sim::trajectory_cost(tr, c), 0.17453 * 0.17453, 1e-15);
  EXPECT_NEAR(sim::trajectory_cost(tr, c), 0.030461, 1e-6);
  x(1) = 0.17453;
  tr.states = {x};
  EXPECT_EQ(sim::trajectory_cost(tr, c), 0.0);
  x(0) = -0.1;
  x(1) = 0.17453 - 0.2;
  tr.states = {x};
  EXPECT_NEAR(sim::trajectory_cost(tr, c), 0.05, 1e-15);
}

TEST(CompiledField, MatchesPolynomialEvaluation) {
  const auto pf = f16::default_problem();
  const auto sys = f16::physical_system(pf, {f16::LoopMode::kMrac, 0.314159});
  sim::CompiledSystem cs(sys);
  std::vector<double> x{0.1, -0.2, 0.05, 0.3, 0.002, 0.01, 0.02, -0.03, 0.001};
  std::vector<double> out(9);
  for (std::size_t cell = 0; cell < 2; ++cell) {
    cs.field(cell, 0.5, x, out);
    poly::Assignment a{{sys.time, 0.5}};
    for (std::size_t i = 0; i < 9; ++i) a[sys.states[i]] = x[i];
    for (std::size_t i = 0; i < 9; ++i) {
      EXPECT_NEAR(out[i], sys.cells[cell].field[i].evaluate(a), 1e-12);
    }
  }
  EXPECT_EQ(cs.active_cell(0.0, x), 0u);
  x[1] = 0.5;
  EXPECT_EQ(cs.active_cell(0.0, x), 1u);
}

TEST(Sweep, SinglePointEqualsTrajectory) {
  auto pf = f16::default_problem();
  pf.grid = {1, 1, 1, 1};
  const f16::Case c{f16::LoopMode::kLqr, 1.0};
  const auto spec = f16::sweep_spec(pf, c.mode);
  EXPECT_EQ(spec.trajectory_count(), 1u);
  const auto r = f16::run_monte_carlo(pf, c, spec, 1);
  ASSERT_EQ(r.costs.size(), 1u);
  const auto tr = sim::integrate(f16::physical_system(pf, c), Eigen::VectorXd::Zero(4), 10.0);
  EXPECT_DOUBLE_EQ(r.worst_cost, sim::trajectory_cost(tr, pf.command));
}

TEST(Sweep, GridLayoutAndDeterminism) {
  sim::SweepSpec spec;
  spec.grid_counts = {3, 2};
  sim::StateBox box{{-1.0, 0.0}, {1.0, 2.0}};
  const auto pts = sim::grid_points(spec, box);
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts.front(), Eigen::Vector2d(-1.0, 0.0));
  EXPECT_EQ(pts[1], Eigen::Vector2d(-1.0, 2.0));
  EXPECT_EQ(pts.back(), Eigen::Vector2d(1.0, 2.0));

  auto pf = f16::default_problem();
  pf.grid = {3, 3, 2, 2};
  const f16::Case c{f16::LoopMode::kLqr, 0.314159};
  const auto s = f16::sweep_spec(pf, c.mode);
  const auto a = f16::run_monte_carlo(pf, c, s, 1);
  const auto b = f16::run_monte_carlo(pf, c, s, 4);
  EXPECT_EQ(a.costs, b.costs);
  EXPECT_EQ(a.argmax_index, b.argmax_index);
  EXPECT_EQ(a.worst_cost, *std::max_element(a.costs.begin(), a.costs.end()));
}

TEST(Sweep, DivergedTrajectoriesAreRecorded) {
  const auto sys = scalar(1.0, 0.0, 2);
  sim::SweepSpec spec;
  spec.grid_counts = {3};
  spec.horizon = 2.0;
  spec.dt = 0.001;
  const sim::StateBox x0{{-1.0}, {1.0}};
  const sim::StateBox xs{{-1e9}, {1e9}};
  const auto r = sim::monte_carlo_sweep(sys, spec, x0, xs,
                                        [](const Eigen::VectorXd& x) { return x(0) * x(0); }, 1);
  ASSERT_EQ(r.costs.size(), 3u);
  EXPECT_TRUE(std::isnan(r.costs[2]));  // x0 = 1 blows up
  EXPECT_FALSE(std::isnan(r.costs[0]));
  bool divergence = false;
  for (const auto& v : r.violations) divergence |= v.kind == sim::Violation::Kind::kDivergence;
  EXPECT_TRUE(divergence);
  EXPECT_FALSE(std::isnan(r.worst_cost));
}

TEST(PlotData, ConstantAndEmpty) {
  const auto dir = temp_dir("plot");
  const auto sys = scalar(0.0);
  sim::IntegrationOptions o;
  o.dt = 0.01;
  o.record_every = 25;
  const auto tr = sim::integrate(sys, Eigen::VectorXd::Constant(1, 2.5), 1.0, o);
  const auto files = sim::emit_plot_data({tr}, std::nullopt, {"x"}, dir);
  ASSERT_EQ(files.size(), 1u);
  const auto lines = read_lines(files[0]);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "t,traj_0");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    EXPECT_EQ(lines[k].substr(lines[k].find(',')), ",2.5");
  }
  const auto empty = sim::emit_plot_data({}, std::nullopt, {"x"}, dir / "empty");
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_EQ(read_lines(empty[0]), std::vector<std::string>{"t"});
}

TEST(PlotData, ReferenceChannelPlateau) {
  // The reference model's roll plateau, in magnitude: the tabulated gains
  // reach 10 deg within their DC-gain error.
  const auto pf = f16::default_problem();
  const auto sys = f16::physical_system(pf, {f16::LoopMode::kMrac, 1.0});
  sim::IntegrationOptions o;
  o.record_every = 100;
  const auto tr = sim::integrate(sys, Eigen::VectorXd::Zero(9), 10.0, o);
  const double phi_r = tr.terminal()(6);
  EXPECT_NEAR(std::abs(phi_r), 0.174532, 0.011 * 0.174532);
  const auto dir = temp_dir("ref");
  const auto files = sim::emit_plot_data({tr}, tr, {"beta", "phi", "p", "r", "W", "beta_r",
                                                    "phi_r", "p_r", "r_r"}, dir);
  const auto lines = read_lines(dir / "phi_r.csv");
  EXPECT_EQ(lines[0], "t,ref,traj_0");
  EXPECT_EQ(lines.size(), tr.states.size() + 1);
}

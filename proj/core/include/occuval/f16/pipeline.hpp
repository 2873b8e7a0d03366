#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occuval/f16/problem_file.hpp"
#include "occuval/liouville/problem.hpp"
#include "occuval/model/normalize.hpp"
#include "occuval/sim/sweep.hpp"

namespace occuval::f16 {

std::string to_string(LoopMode m);
LoopMode parse_mode(const std::string& s);

/// One (mode, phi_max) instance of a problem file.
struct Case {
  LoopMode mode = LoopMode::kLqr;
  double phi_max = 1.0;
};

LoopConfig loop_config(const ProblemFile& pf, const Case& c);
DutchRollModel make_model(const ProblemFile& pf);

/// State variables of the closed loop in simulation order.
std::vector<poly::Var> case_states(LoopMode mode);
/// Indices into the 9-entry per-state vectors of the problem file.
std::vector<std::size_t> state_indices(LoopMode mode);

/// Closed loop in physical units and time.
model::PiecewiseSystem physical_system(const ProblemFile& pf, const Case& c);

sim::StateBox initial_box(const ProblemFile& pf, LoopMode mode);
sim::StateBox state_box(const ProblemFile& pf, LoopMode mode);

/// The problem file's grid on x_q; extra MRAC states get one (centered) point.
sim::SweepSpec sweep_spec(const ProblemFile& pf, LoopMode mode);

/// ||c - C x_q(T)||^2 on a full closed-loop state.
sim::TerminalCost terminal_cost(const ProblemFile& pf);

sim::SweepReport run_monte_carlo(const ProblemFile& pf, const Case& c,
                                 const sim::SweepSpec& spec,
                                 unsigned workers = 0);

model::Normalization normalization(const ProblemFile& pf, LoopMode mode);

/// Normalized validation problem. LQR is a single system; MRAC is split
/// into the plant (x_q, W) and the autonomous reference x_r.
liouville::ValidationProblem validation_problem(const ProblemFile& pf,
                                                const Case& c);

/// Content hash of everything that determines a run.
std::uint64_t config_hash(const ProblemFile& pf, const Case& c,
                          const std::string& extra);

}  // namespace occuval::f16

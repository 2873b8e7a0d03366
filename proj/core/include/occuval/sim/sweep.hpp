#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "occuval/model/system.hpp"
#include "occuval/sim/integrate.hpp"

namespace occuval::sim {

struct SweepSpec {
  /// Points per state dimension; 1 places the single point at the box center.
  std::vector<std::size_t> grid_counts;
  double dt = 0.001;
  double horizon = 10.0;
  Method method = Method::kRk4;

  void validate(std::size_t dimension) const;
  std::size_t trajectory_count() const;
};

struct Violation {
  enum class Kind { kExit, kDivergence };
  std::size_t trajectory = 0;
  Kind kind = Kind::kExit;
  std::size_t step = 0;
  double time = 0.0;
  std::string detail;
};

struct SweepReport {
  double worst_cost = 0.0;
  std::size_t argmax_index = 0;
  Eigen::VectorXd argmax_initial;
  /// One entry per grid point; NaN for diverged trajectories.
  std::vector<double> costs;
  std::vector<Violation> violations;
  double wall_seconds = 0.0;
  unsigned workers = 1;
};

using TerminalCost = std::function<double(const Eigen::VectorXd& terminal)>;

/// Cartesian product of evenly spaced 1-D grids (endpoints included), in
/// row-major order over the state dimensions.
std::vector<Eigen::VectorXd> grid_points(const SweepSpec& spec,
                                         const StateBox& initial_box);

/// Integrates every grid point and reduces deterministically: max cost, ties
/// broken by the lexicographically smallest initial state. `workers` = 0
/// uses the hardware concurrency.
SweepReport monte_carlo_sweep(const model::PiecewiseSystem& sys,
                              const SweepSpec& spec,
                              const StateBox& initial_box,
                              const StateBox& state_box,
                              const TerminalCost& cost, unsigned workers = 0);

}  // namespace occuval::sim

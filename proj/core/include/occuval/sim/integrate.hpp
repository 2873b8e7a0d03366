#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "occuval/model/system.hpp"
#include "occuval/sim/compiled_field.hpp"

namespace occuval::sim {

enum class Method { kEuler, kRk4 };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Axis-aligned box lo <= x <= hi over the system states.
struct StateBox {
  std::vector<double> lo;
  std::vector<double> hi;

  bool contains(std::span<const double> x) const;
  /// Index of the first violated coordinate, if any.
  std::optional<std::size_t> first_violation(std::span<const double> x) const;
};

struct ExitRecord {
  std::size_t step = 0;
  double time = 0.0;
  std::size_t component = 0;
  Eigen::VectorXd state;
};

/// State magnitude exceeded the divergence limit.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, double time, const std::string& what)
      : std::runtime_error(what), step_(step), time_(time) {}
  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

struct IntegrationOptions {
  double dt = 0.001;
  Method method = Method::kRk4;
  /// Keep every k-th grid point; the terminal point is always kept.
  std::size_t record_every = 1;
  std::optional<StateBox> containment;
  double divergence_limit = 1e6;
};

/// Samples of a fixed-step solution. cells[k] is the regime active on the
/// step starting at times[k].
struct Trajectory {
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<std::size_t> cells;
  std::optional<ExitRecord> first_exit;
  /// Largest |x_i| over the whole grid, per component.
  Eigen::VectorXd peak_abs;

  const Eigen::VectorXd& initial() const { return states.front(); }
  const Eigen::VectorXd& terminal() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Number of uniform steps covering [0, horizon]; throws unless dt divides
/// the horizon within 1e-12.
std::size_t step_count(double horizon, double dt);

Trajectory integrate(const model::PiecewiseSystem& sys,
                     const Eigen::VectorXd& x0, double horizon,
                     const IntegrationOptions& opts = {});
Trajectory integrate(CompiledSystem& sys, const Eigen::VectorXd& x0,
                     double horizon, const IntegrationOptions& opts = {});

/// sum_k (c_k - x_{outputs[k]}(T))^2, the nonnegative tracking cost.
double trajectory_cost(const Trajectory& traj, const Eigen::VectorXd& c,
                       const std::vector<std::size_t>& outputs = {0, 1});

}  // namespace occuval::sim

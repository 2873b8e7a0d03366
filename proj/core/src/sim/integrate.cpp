#include "occuval/sim/integrate.hpp"

#include <cmath>

namespace occuval::sim {

std::string to_string(Method m) {
  return m == Method::kEuler ? "euler" : "rk4";
}

Method parse_method(const std::string& s) {
  if (s == "euler") return Method::kEuler;
  if (s == "rk4") return Method::kRk4;
  throw std::invalid_argument("unknown integration method '" + s +
                              "' (expected euler or rk4)");
}

std::optional<std::size_t> StateBox::first_violation(
    std::span<const double> x) const {
  for (std::size_t i = 0; i < lo.size() && i < x.size(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return i;
  }
  return std::nullopt;
}

bool StateBox::contains(std::span<const double> x) const {
  return !first_violation(x).has_value();
}

std::size_t step_count(double horizon, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (horizon < 0.0) throw std::invalid_argument("horizon must be >= 0");
  const double n = std::round(horizon / dt);
  if (std::abs(n * dt - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw std::invalid_argument("dt does not divide the horizon");
  }
  return static_cast<std::size_t>(n);
}

Trajectory integrate(const model::PiecewiseSystem& sys,
                     const Eigen::VectorXd& x0, double horizon,
                     const IntegrationOptions& opts) {
  CompiledSystem compiled(sys);
  return integrate(compiled, x0, horizon, opts);
}

Trajectory integrate(CompiledSystem& sys, const Eigen::VectorXd& x0,
                     double horizon, const IntegrationOptions& opts) {
  const std::size_t n = sys.dimension();
  if (static_cast<std::size_t>(x0.size()) != n) {
    throw std::invalid_argument("initial state has wrong dimension");
  }
  if (!x0.allFinite()) throw std::invalid_argument("initial state not finite");
  if (opts.dt > 0.01) throw std::invalid_argument("dt must be <= 0.01");
  if (opts.record_every == 0) throw std::invalid_argument("record_every = 0");
  const std::size_t steps = step_count(horizon, opts.dt);
  const double dt = opts.dt;

  Trajectory traj;
  traj.dt = dt;
  traj.steps = steps;
  const std::size_t reserve = steps / opts.record_every + 2;
  traj.times.reserve(reserve);
  traj.states.reserve(reserve);
  traj.cells.reserve(reserve);
  traj.peak_abs = x0.cwiseAbs();

  Eigen::VectorXd x = x0;
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto f = [&](std::size_t cell, double t, const Eigen::VectorXd& y,
               Eigen::VectorXd& out) {
    sys.field(cell, t, {y.data(), n}, {out.data(), n});
  };
  auto check = [&](std::size_t k, double t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(x[i]) || std::abs(x[i]) > opts.divergence_limit) {
        throw DivergenceError(k, t,
                              "state component " + std::to_string(i) +
                                  " exceeded the divergence limit at step " +
                                  std::to_string(k));
      }
    }
    traj.peak_abs = traj.peak_abs.cwiseMax(x.cwiseAbs());
    if (opts.containment && !traj.first_exit) {
      if (auto c = opts.containment->first_violation({x.data(), n})) {
        traj.first_exit = ExitRecord{k, t, *c, x};
      }
    }
  };

  check(0, 0.0);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const std::size_t cell = sys.active_cell(t, {x.data(), n});
    if (k % opts.record_every == 0 || k == steps) {
      traj.times.push_back(t);
      traj.states.push_back(x);
      traj.cells.push_back(cell);
    }
    if (k == steps) break;
    if (opts.method == Method::kEuler) {
      f(cell, t, x, k1);
      x += dt * k1;
    } else {
      f(cell, t, x, k1);
      tmp = x + 0.5 * dt * k1;
      f(cell, t + 0.5 * dt, tmp, k2);
      tmp = x + 0.5 * dt * k2;
      f(cell, t + 0.5 * dt, tmp, k3);
      tmp = x + dt * k3;
      f(cell, t + dt, tmp, k4);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    check(k + 1, static_cast<double>(k + 1) * dt);
  }
  return traj;
}

double trajectory_cost(const Trajectory& traj, const Eigen::VectorXd& c,
                       const std::vector<std::size_t>& outputs) {
  if (static_cast<std::size_t>(c.size()) != outputs.size()) {
    throw std::invalid_argument("command and output lists differ in size");
  }
  const auto& x = traj.terminal();
  double j = 0.0;
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const double e = c(static_cast<Eigen::Index>(k)) - x(static_cast<Eigen::Index>(outputs[k]));
    j += e * e;
  }
  return j;
}

}  // namespace occuval::sim

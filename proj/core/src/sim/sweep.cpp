#include "occuval/sim/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace occuval::sim {

void SweepSpec::validate(std::size_t dimension) const {
  if (grid_counts.size() != dimension) {
    throw std::invalid_argument("sweep grid has " +
                                std::to_string(grid_counts.size()) +
                                " dimensions for a " +
                                std::to_string(dimension) + "-state system");
  }
  for (auto c : grid_counts) {
    if (c < 1) throw std::invalid_argument("grid counts must be >= 1");
  }
  step_count(horizon, dt);
}

std::size_t SweepSpec::trajectory_count() const {
  std::size_t n = 1;
  for (auto c : grid_counts) n *= c;
  return n;
}

std::vector<Eigen::VectorXd> grid_points(const SweepSpec& spec,
                                         const StateBox& box) {
  const std::size_t dim = spec.grid_counts.size();
  if (box.lo.size() != dim || box.hi.size() != dim) {
    throw std::invalid_argument("initial box does not match the sweep grid");
  }
  std::vector<std::vector<double>> axes(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t c = spec.grid_counts[i];
    if (c == 1) {
      axes[i].push_back(0.5 * (box.lo[i] + box.hi[i]));
      continue;
    }
    for (std::size_t k = 0; k < c; ++k) {
      const double a = static_cast<double>(k) / static_cast<double>(c - 1);
      axes[i].push_back(box.lo[i] + a * (box.hi[i] - box.lo[i]));
    }
  }
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(spec.trajectory_count());
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t n = 0; n < spec.trajectory_count(); ++n) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) x(static_cast<Eigen::Index>(i)) = axes[i][idx[i]];
    pts.push_back(std::move(x));
    for (std::size_t i = dim; i-- > 0;) {
      if (++idx[i] < spec.grid_counts[i]) break;
      idx[i] = 0;
    }
  }
  return pts;
}

namespace {

struct Outcome {
  double cost = std::numeric_limits<double>::quiet_NaN();
  std::optional<Violation> violation;
};

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

SweepReport monte_carlo_sweep(const model::PiecewiseSystem& sys,
                              const SweepSpec& spec,
                              const StateBox& initial_box,
                              const StateBox& state_box,
                              const TerminalCost& cost, unsigned workers) {
  spec.validate(sys.dimension());
  const auto start = std::chrono::steady_clock::now();
  const auto points = grid_points(spec, initial_box);
  std::vector<Outcome> outcomes(points.size());

  IntegrationOptions opts;
  opts.dt = spec.dt;
  opts.method = spec.method;
  opts.record_every = std::numeric_limits<std::size_t>::max();
  opts.containment = state_box;

  const CompiledSystem prototype(sys);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    CompiledSystem local = prototype;
    for (std::size_t i = begin; i < end; ++i) {
      Outcome& out = outcomes[i];
      try {
        Trajectory t = integrate(local, points[i], spec.horizon, opts);
        out.cost = cost(t.terminal());
        if (t.first_exit) {
          out.violation = Violation{i, Violation::Kind::kExit,
                                    t.first_exit->step, t.first_exit->time,
                                    "state " + std::to_string(t.first_exit->component) +
                                        " left the state box"};
        }
      } catch (const DivergenceError& e) {
        out.violation = Violation{i, Violation::Kind::kDivergence, e.step(),
                                  e.time(), e.what()};
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(1, points.size())));
  if (workers <= 1) {
    run_range(0, points.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (points.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(points.size(), w * chunk);
      const std::size_t e = std::min(points.size(), b + chunk);
      pool.emplace_back(run_range, b, e);
    }
    for (auto& t : pool) t.join();
  }

  SweepReport report;
  report.workers = workers;
  report.worst_cost = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const double c = outcomes[i].cost;
    report.costs.push_back(c);
    if (outcomes[i].violation) report.violations.push_back(*outcomes[i].violation);
    if (std::isnan(c)) continue;
    if (!any || c > report.worst_cost ||
        (c == report.worst_cost && lex_less(points[i], report.argmax_initial))) {
      report.worst_cost = c;
      report.argmax_index = i;
      report.argmax_initial = points[i];
      any = true;
    }
  }
  if (!any) {
    report.worst_cost = std::numeric_limits<double>::quiet_NaN();
    if (!points.empty()) report.argmax_initial = points.front();
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

}  // namespace occuval::sim

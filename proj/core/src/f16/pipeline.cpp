#include "occuval/f16/pipeline.hpp"

#include <stdexcept>
#include <unordered_map>

#include "occuval/sdp/conic_problem.hpp"

namespace occuval::f16 {

std::string to_string(LoopMode m) {
  return m == LoopMode::kLqr ? "lqr" : "mrac";
}

LoopMode parse_mode(const std::string& s) {
  if (s == "lqr") return LoopMode::kLqr;
  if (s == "mrac") return LoopMode::kMrac;
  throw std::invalid_argument("mode must be 'lqr' or 'mrac', got '" + s + "'");
}

LoopConfig loop_config(const ProblemFile& pf, const Case& c) {
  LoopConfig cfg;
  cfg.mode = c.mode;
  cfg.phi_max = c.phi_max;
  cfg.lambda = pf.lambda;
  cfg.command = pf.command;
  cfg.horizon = pf.horizon;
  cfg.sigmoid_degree = pf.sigmoid_degree;
  cfg.error_model = pf.mrac_error_model;
  cfg.validate();
  return cfg;
}

DutchRollModel make_model(const ProblemFile& pf) {
  return DutchRollModel(pf.plant, pf.gains, pf.uncertainty);
}

std::vector<poly::Var> case_states(LoopMode mode) {
  return StateVars{}.full_state(mode);
}

std::vector<std::size_t> state_indices(LoopMode mode) {
  if (mode == LoopMode::kLqr) return {0, 1, 2, 3};
  return {0, 1, 2, 3, 4, 5, 6, 7, 8};
}

model::PiecewiseSystem physical_system(const ProblemFile& pf, const Case& c) {
  return closed_loop_field(make_model(pf), loop_config(pf, c));
}

namespace {

sim::StateBox symmetric_box(const std::vector<double>& half,
                            const std::vector<std::size_t>& idx) {
  sim::StateBox b;
  for (std::size_t i : idx) {
    b.lo.push_back(-half[i]);
    b.hi.push_back(half[i]);
  }
  return b;
}

}  // namespace

sim::StateBox initial_box(const ProblemFile& pf, LoopMode mode) {
  return symmetric_box(pf.initial_half_width, state_indices(mode));
}

sim::StateBox state_box(const ProblemFile& pf, LoopMode mode) {
  return symmetric_box(pf.state_half_width, state_indices(mode));
}

sim::SweepSpec sweep_spec(const ProblemFile& pf, LoopMode mode) {
  sim::SweepSpec s;
  s.grid_counts = pf.grid;
  s.grid_counts.resize(state_indices(mode).size(), 1);
  s.dt = pf.dt;
  s.horizon = pf.horizon;
  s.method = pf.method;
  return s;
}

sim::TerminalCost terminal_cost(const ProblemFile& pf) {
  const Eigen::Vector2d c = pf.command;
  return [c](const Eigen::VectorXd& x) {
    return tracking_cost(x.head<4>(), c);
  };
}

sim::SweepReport run_monte_carlo(const ProblemFile& pf, const Case& c,
                                 const sim::SweepSpec& spec, unsigned workers) {
  return sim::monte_carlo_sweep(physical_system(pf, c), spec,
                                initial_box(pf, c.mode), state_box(pf, c.mode),
                                terminal_cost(pf), workers);
}

model::Normalization normalization(const ProblemFile& pf, LoopMode mode) {
  std::unordered_map<poly::Var, double> a;
  const auto vars = case_states(mode);
  const auto idx = state_indices(mode);
  for (std::size_t k = 0; k < vars.size(); ++k) a[vars[k]] = pf.normalization[idx[k]];
  return model::Normalization(std::move(a), pf.horizon);
}

namespace {

model::SemialgebraicSet scaled_initial_set(const ProblemFile& pf,
                                           const model::Normalization& n,
                                           const std::vector<poly::Var>& vars) {
  const auto all = case_states(LoopMode::kMrac);
  std::vector<double> lo, hi;
  for (const auto& v : vars) {
    std::size_t i = 0;
    while (i < all.size() && !(all[i] == v)) ++i;
    if (i == all.size()) throw std::logic_error("unknown state " + v.name());
    const double h = pf.initial_half_width[i] / n.half_width(v);
    lo.push_back(-h);
    hi.push_back(h);
  }
  return model::SemialgebraicSet::box(vars, lo, hi);
}

}  // namespace

liouville::ValidationProblem validation_problem(const ProblemFile& pf,
                                                const Case& c) {
  const auto phys = physical_system(pf, c);
  const auto norm = normalization(pf, c.mode);
  const auto sys = model::normalize_system(phys, norm);
  const StateVars vars;

  liouville::ValidationProblem prob;
  prob.label = to_string(c.mode);
  prob.terminal_cost = norm.scale(tracking_cost_polynomial(pf.command, vars), vars.time);

  if (c.mode == LoopMode::kLqr) {
    prob.plant.name = "plant";
    prob.plant.system = sys;
    prob.plant.initial_set = scaled_initial_set(pf, norm, sys.states);
    prob.validate();
    return prob;
  }

  const std::vector<poly::Var> ref(vars.reference.begin(), vars.reference.end());
  auto split = liouville::split_autonomous(sys, ref);
  prob.plant.name = "plant";
  prob.plant.system = split.plant;
  prob.plant.initial_set = scaled_initial_set(pf, norm, split.plant.states);
  liouville::SparseSplit sp;
  sp.reference.name = "reference";
  sp.reference.system = split.reference;
  sp.reference.initial_set = scaled_initial_set(pf, norm, split.reference.states);
  sp.coupled = split.coupled;
  sp.output_map = split.output_map;
  prob.split = std::move(sp);
  prob.validate();
  return prob;
}

std::uint64_t config_hash(const ProblemFile& pf, const Case& c,
                          const std::string& extra) {
  sdp::Fnv1a h;
  h.str(problem_to_json(pf));
  h.str(to_string(c.mode));
  h.f64(c.phi_max);
  h.str(extra);
  return h.value();
}

}  // namespace occuval::f16

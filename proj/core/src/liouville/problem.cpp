#include "occuval/liouville/problem.hpp"

#include <algorithm>
#include <unordered_map>

namespace occuval::liouville {

using poly::Polynomial;
using poly::Var;

namespace {

bool contains(const std::vector<Var>& vs, Var v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

void check_set_vars(const model::SemialgebraicSet& s,
                    const std::vector<Var>& allowed, const std::string& what) {
  for (const auto& g : s.inequalities) {
    for (Var v : g.used_variables()) {
      if (!contains(allowed, v)) {
        throw AssemblyError(what + " uses variable '" + v.name() +
                            "' outside its subsystem");
      }
    }
  }
}

void validate_subsystem(const Subsystem& sub) {
  sub.system.validate();
  check_set_vars(sub.initial_set, sub.system.states, sub.name + " initial set");
  check_set_vars(sub.terminal_set, sub.system.states, sub.name + " terminal set");
  std::vector<Var> all = sub.system.states;
  all.insert(all.end(), sub.system.inputs.begin(), sub.system.inputs.end());
  all.push_back(sub.system.time);
  check_set_vars(sub.state_set, all, sub.name + " state set");
}

}  // namespace

void ValidationProblem::validate() const {
  validate_subsystem(plant);
  for (Var v : terminal_cost.used_variables()) {
    if (!contains(plant.system.states, v)) {
      throw AssemblyError("terminal cost uses '" + v.name() +
                          "', which is not a plant state");
    }
  }
  if (!split) {
    if (!plant.system.inputs.empty()) {
      throw AssemblyError("plant has inputs but no reference subsystem");
    }
    return;
  }
  validate_subsystem(split->reference);
  if (!split->reference.system.inputs.empty()) {
    throw AssemblyError("reference subsystem must be autonomous");
  }
  if (split->coupled.size() != split->output_map.size()) {
    throw AssemblyError("coupled inputs and output map differ in length");
  }
  for (Var w : split->coupled) {
    if (!contains(plant.system.inputs, w)) {
      throw AssemblyError("coupled variable '" + w.name() +
                          "' is not a plant input");
    }
  }
  for (Var w : plant.system.inputs) {
    if (!contains(split->coupled, w)) {
      throw AssemblyError("plant input '" + w.name() + "' is not coupled");
    }
  }
  for (const auto& e : split->output_map) {
    for (Var v : e.used_variables()) {
      if (!contains(split->reference.system.states, v)) {
        throw AssemblyError("output map uses '" + v.name() +
                            "', which is not a reference state");
      }
    }
  }
}

ValidationProblem merge_split(const ValidationProblem& prob) {
  prob.validate();
  if (!prob.split) return prob;
  const auto& ref = prob.split->reference;
  const auto& ps = prob.plant.system;
  const auto& rs = ref.system;

  std::unordered_map<Var, Polynomial> sub;
  for (std::size_t k = 0; k < prob.split->coupled.size(); ++k) {
    sub.emplace(prob.split->coupled[k], prob.split->output_map[k]);
  }
  std::unordered_map<Var, Polynomial> retime;
  if (rs.time != ps.time) retime.emplace(rs.time, Polynomial::variable(ps.time));

  ValidationProblem out;
  out.label = prob.label;
  out.terminal_cost = prob.terminal_cost;
  out.running_cost = prob.running_cost;
  auto& joint = out.plant.system;
  joint.time = ps.time;
  joint.states = ps.states;
  joint.states.insert(joint.states.end(), rs.states.begin(), rs.states.end());
  const poly::Universe u = joint.universe();

  auto subst = [&](const Polynomial& p) {
    Polynomial q = sub.empty() ? p : p.substitute(sub);
    if (!retime.empty()) q = q.substitute(retime);
    return q.with_universe(poly::universe_union(u, q.universe()));
  };
  for (const auto& pc : ps.cells) {
    for (const auto& rc : rs.cells) {
      model::Cell cell;
      cell.name = rs.cells.size() == 1 ? pc.name : pc.name + "/" + rc.name;
      cell.lambda = pc.lambda;
      for (const auto& g : pc.guard.inequalities) cell.guard.inequalities.push_back(subst(g));
      for (const auto& g : rc.guard.inequalities) cell.guard.inequalities.push_back(subst(g));
      for (const auto& f : pc.field) cell.field.push_back(subst(f));
      for (const auto& f : rc.field) cell.field.push_back(subst(f));
      joint.cells.push_back(std::move(cell));
    }
  }
  auto merge_sets = [&](const model::SemialgebraicSet& a,
                        const model::SemialgebraicSet& b) {
    model::SemialgebraicSet s;
    for (const auto& g : a.inequalities) s.inequalities.push_back(subst(g));
    for (const auto& g : b.inequalities) s.inequalities.push_back(subst(g));
    return s;
  };
  out.plant.name = prob.plant.name + "+" + ref.name;
  out.plant.initial_set = merge_sets(prob.plant.initial_set, ref.initial_set);
  out.plant.state_set = merge_sets(prob.plant.state_set, ref.state_set);
  out.plant.state_set =
      merge_sets(out.plant.state_set, model::SemialgebraicSet{
                                          [&] {
                                            std::vector<Polynomial> v;
                                            for (const auto& g : prob.input_set.inequalities) {
                                              v.push_back(subst(g));
                                            }
                                            return v;
                                          }()});
  out.plant.terminal_set = merge_sets(prob.plant.terminal_set, ref.terminal_set);
  joint.validate();
  return out;
}

SplitResult split_autonomous(const model::PiecewiseSystem& sys,
                             const std::vector<Var>& reference_states) {
  sys.validate();
  if (!sys.inputs.empty()) {
    throw AssemblyError("cannot split a system that already has inputs");
  }
  std::vector<std::size_t> ref_idx, plant_idx;
  for (std::size_t i = 0; i < sys.states.size(); ++i) {
    (contains(reference_states, sys.states[i]) ? ref_idx : plant_idx).push_back(i);
  }
  if (ref_idx.size() != reference_states.size()) {
    throw AssemblyError("reference states must all be system states");
  }
  SplitResult out;
  out.reference.time = sys.time;
  for (auto i : ref_idx) out.reference.states.push_back(sys.states[i]);
  out.plant.time = sys.time;
  for (auto i : plant_idx) out.plant.states.push_back(sys.states[i]);

  std::vector<Var> allowed_ref = out.reference.states;
  allowed_ref.push_back(sys.time);
  model::Cell ref_cell;
  ref_cell.name = "reference";
  for (std::size_t j = 0; j < sys.cells.size(); ++j) {
    const auto& cell = sys.cells[j];
    for (std::size_t k = 0; k < ref_idx.size(); ++k) {
      const Polynomial& f = cell.field[ref_idx[k]];
      for (Var v : f.used_variables()) {
        if (!contains(allowed_ref, v)) {
          throw AssemblyError("reference field reads '" + v.name() +
                              "'; the subsystem is not autonomous");
        }
      }
      if (j == 0) {
        ref_cell.field.push_back(f);
      } else if (!f.approx_equal(ref_cell.field[k], 0.0)) {
        throw AssemblyError("reference field differs between cells");
      }
    }
    for (const auto& g : cell.guard.inequalities) {
      for (Var v : g.used_variables()) {
        if (contains(reference_states, v)) {
          throw AssemblyError("cell guard reads reference state '" + v.name() + "'");
        }
      }
    }
  }
  const poly::Universe ru = out.reference.universe();
  for (auto& f : ref_cell.field) f = f.with_universe(poly::universe_union(ru, f.universe()));
  out.reference.cells.push_back(std::move(ref_cell));

  for (const auto& cell : sys.cells) {
    for (auto i : plant_idx) {
      for (Var v : cell.field[i].used_variables()) {
        if (contains(reference_states, v) && !contains(out.coupled, v)) {
          out.coupled.push_back(v);
        }
      }
    }
  }
  // Keep the coupled inputs in reference-state order.
  std::vector<Var> ordered;
  for (Var v : out.reference.states) {
    if (contains(out.coupled, v)) ordered.push_back(v);
  }
  out.coupled = ordered;
  out.plant.inputs = out.coupled;
  for (Var v : out.coupled) out.output_map.push_back(Polynomial::variable(v));

  const poly::Universe pu = out.plant.universe();
  for (const auto& cell : sys.cells) {
    model::Cell c;
    c.name = cell.name;
    c.lambda = cell.lambda;
    c.guard = cell.guard;
    for (auto i : plant_idx) {
      c.field.push_back(cell.field[i].with_universe(
          poly::universe_union(pu, cell.field[i].universe())));
    }
    out.plant.cells.push_back(std::move(c));
  }
  out.plant.validate();
  out.reference.validate();
  return out;
}

}  // namespace occuval::liouville

#include "occuval/model/system.hpp"

#include <algorithm>
#include <stdexcept>

namespace occuval::model {

using poly::Polynomial;
using poly::Var;

bool SemialgebraicSet::contains(const poly::Assignment& point,
                                double tol) const {
  return std::all_of(inequalities.begin(), inequalities.end(),
                     [&](const Polynomial& g) { return g.evaluate(point) >= -tol; });
}

int SemialgebraicSet::max_degree() const {
  int d = 0;
  for (const auto& g : inequalities) d = std::max(d, g.degree());
  return d;
}

SemialgebraicSet SemialgebraicSet::intersect(
    const SemialgebraicSet& other) const {
  SemialgebraicSet out = *this;
  out.inequalities.insert(out.inequalities.end(), other.inequalities.begin(),
                          other.inequalities.end());
  return out;
}

SemialgebraicSet SemialgebraicSet::box(const std::vector<Var>& vars,
                                       const std::vector<double>& lo,
                                       const std::vector<double>& hi) {
  if (vars.size() != lo.size() || vars.size() != hi.size()) {
    throw std::invalid_argument("box: bounds do not match variable count");
  }
  SemialgebraicSet s;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (hi[i] < lo[i]) {
      throw std::invalid_argument("box: empty interval for " + vars[i].name());
    }
    const Polynomial x = Polynomial::variable(vars[i]);
    s.inequalities.push_back((hi[i] - x) * (x - lo[i]));
  }
  return s;
}

SemialgebraicSet SemialgebraicSet::unit_box(const std::vector<Var>& vars) {
  return box(vars, std::vector<double>(vars.size(), -1.0),
             std::vector<double>(vars.size(), 1.0));
}

int PiecewiseSystem::degree() const {
  int d = 0;
  for (const auto& c : cells) {
    for (const auto& f : c.field) d = std::max(d, f.degree());
  }
  return d;
}

poly::Universe PiecewiseSystem::universe() const {
  std::vector<Var> vs = states;
  vs.insert(vs.end(), inputs.begin(), inputs.end());
  if (time.valid()) vs.push_back(time);
  return poly::make_universe(std::move(vs));
}

std::optional<std::size_t> PiecewiseSystem::active_cell(
    const poly::Assignment& point) const {
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (cells[j].guard.contains(point)) return j;
  }
  return std::nullopt;
}

void PiecewiseSystem::validate() const {
  if (cells.empty()) throw std::invalid_argument("system has no cells");
  const auto u = universe();
  for (const auto& c : cells) {
    if (c.field.size() != states.size()) {
      throw std::invalid_argument("cell '" + c.name + "' has " +
                                  std::to_string(c.field.size()) +
                                  " field components for " +
                                  std::to_string(states.size()) + " states");
    }
    for (const auto& f : c.field) {
      for (Var v : f.used_variables()) {
        if (!poly::universe_contains(u, v)) {
          throw std::invalid_argument("cell '" + c.name +
                                      "' field uses unknown variable '" +
                                      v.name() + "'");
        }
      }
    }
  }
}

}  // namespace occuval::model

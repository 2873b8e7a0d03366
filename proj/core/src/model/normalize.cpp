#include "occuval/model/normalize.hpp"

#include <cmath>
#include <stdexcept>

namespace occuval::model {

using poly::Polynomial;
using poly::Var;

Normalization::Normalization(std::unordered_map<Var, double> half_widths,
                             double horizon)
    : half_widths_(std::move(half_widths)), horizon_(horizon) {
  for (const auto& [v, a] : half_widths_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("normalization: half-width of '" +
                                  v.name() + "' must be positive");
    }
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("normalization: horizon must be positive");
  }
}

double Normalization::half_width(Var v) const {
  auto it = half_widths_.find(v);
  return it == half_widths_.end() ? 1.0 : it->second;
}

Polynomial Normalization::scale(const Polynomial& p, Var time) const {
  std::unordered_map<Var, Polynomial> map;
  for (Var v : p.used_variables()) {
    const double a = (v == time) ? horizon_ : half_width(v);
    if (a != 1.0) map.emplace(v, Polynomial::variable(v).scaled(a));
  }
  return map.empty() ? p : p.substitute(map);
}

Polynomial Normalization::unscale(const Polynomial& p, Var time) const {
  std::unordered_map<Var, Polynomial> map;
  for (Var v : p.used_variables()) {
    const double a = (v == time) ? horizon_ : half_width(v);
    if (a != 1.0) map.emplace(v, Polynomial::variable(v).scaled(1.0 / a));
  }
  return map.empty() ? p : p.substitute(map);
}

SemialgebraicSet Normalization::scale(const SemialgebraicSet& s,
                                      Var time) const {
  SemialgebraicSet out;
  for (const auto& g : s.inequalities) out.inequalities.push_back(scale(g, time));
  return out;
}

PiecewiseSystem normalize_system(const PiecewiseSystem& sys,
                                 const Normalization& n) {
  sys.validate();
  PiecewiseSystem out = sys;
  for (auto& cell : out.cells) {
    cell.guard = n.scale(cell.guard, sys.time);
    for (std::size_t i = 0; i < cell.field.size(); ++i) {
      const double factor = n.horizon() / n.half_width(sys.states[i]);
      cell.field[i] = n.scale(cell.field[i], sys.time).scaled(factor);
    }
  }
  return out;
}

}  // namespace occuval::model

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "occuval/poly/polynomial.hpp"

namespace occuval::model {

/// {x : g_k(x) >= 0 for all k}.
struct SemialgebraicSet {
  std::vector<poly::Polynomial> inequalities;

  bool contains(const poly::Assignment& point, double tol = 0.0) const;
  int max_degree() const;
  SemialgebraicSet intersect(const SemialgebraicSet& other) const;

  /// lo_i <= x_i <= hi_i written as (hi - x)(x - lo) >= 0 per coordinate.
  static SemialgebraicSet box(const std::vector<poly::Var>& vars,
                              const std::vector<double>& lo,
                              const std::vector<double>& hi);
  /// |x_i| <= 1 for every variable.
  static SemialgebraicSet unit_box(const std::vector<poly::Var>& vars);
};

/// One regime of a piecewise polynomial vector field.
struct Cell {
  std::string name;
  SemialgebraicSet guard;
  /// One component per state, over (time, states, inputs).
  poly::PolyVector field;
  /// Control effectiveness of this regime (reporting only).
  double lambda = 1.0;
};

/// dx/dt = f_j(t, x, w) on cell j. Inputs w are exogenous variables that the
/// relaxation couples to another subsystem; simulation requires none.
struct PiecewiseSystem {
  poly::Var time;
  std::vector<poly::Var> states;
  std::vector<poly::Var> inputs;
  std::vector<Cell> cells;

  std::size_t dimension() const { return states.size(); }
  /// Largest total degree over all cell fields.
  int degree() const;
  poly::Universe universe() const;
  /// First cell whose guard holds (closed guards; ties go to the lower index).
  std::optional<std::size_t> active_cell(const poly::Assignment& point) const;
  void validate() const;
};

}  // namespace occuval::model

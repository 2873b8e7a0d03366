#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "occuval/model/system.hpp"

namespace occuval::liouville {

class AssemblyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A piecewise system on the normalized horizon s in [0, 1] with its initial,
/// admissible and terminal sets. The unit box on every state is implied and
/// need not be listed.
struct Subsystem {
  std::string name;
  model::PiecewiseSystem system;
  model::SemialgebraicSet initial_set;
  model::SemialgebraicSet state_set;
  model::SemialgebraicSet terminal_set;
};

/// Sparse split: the plant sees the autonomous reference only
/// through coupled inputs w = output_map(x_ref).
struct SparseSplit {
  Subsystem reference;
  /// Plant input variables, in the order of output_map.
  std::vector<poly::Var> coupled;
  /// Images of the reference states, one per coupled input.
  poly::PolyVector output_map;
};

struct ValidationProblem {
  std::string label;
  Subsystem plant;
  /// Extra constraints on the plant inputs (unit box is implied).
  model::SemialgebraicSet input_set;
  /// Maximized at the terminal time, over plant states.
  poly::Polynomial terminal_cost;
  /// Integrated along the horizon; zero for the tracking problems here.
  poly::Polynomial running_cost;
  std::optional<SparseSplit> split;

  void validate() const;
};

/// Replaces coupled inputs by their images and stacks both subsystems into
/// one joint system (the dense formulation). Identity if there is no split.
ValidationProblem merge_split(const ValidationProblem& prob);

/// Splits `sys` into a plant on the remaining states and an autonomous
/// subsystem on `reference_states`. Reference variables read by the plant
/// become plant inputs with identity output map. Throws if the reference
/// block reads plant states or differs between cells.
struct SplitResult {
  model::PiecewiseSystem plant;
  model::PiecewiseSystem reference;
  std::vector<poly::Var> coupled;
  poly::PolyVector output_map;
};
SplitResult split_autonomous(const model::PiecewiseSystem& sys,
                             const std::vector<poly::Var>& reference_states);

}  // namespace occuval::liouville

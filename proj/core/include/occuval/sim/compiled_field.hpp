#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "occuval/model/system.hpp"

namespace occuval::sim {

/// Flattened polynomial over a fixed variable ordering. Evaluation reads a
/// power table laid out as table[var * (max_power + 1) + e].
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  CompiledPolynomial(const poly::Polynomial& p,
                     const std::vector<poly::Var>& order);

  double evaluate(std::span<const double> powers, int stride) const;
  int max_power() const { return max_power_; }

 private:
  struct Term {
    double coeff;
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::vector<Term> terms_;
  std::vector<std::uint32_t> offsets_;  // var * stride + exponent
  std::vector<std::uint16_t> vars_;
  std::vector<std::uint8_t> exps_;
  int max_power_ = 0;
};

/// All cell fields and guards of a PiecewiseSystem compiled against the
/// ordering (time, states...). Not thread-safe per instance; copy per worker.
class CompiledSystem {
 public:
  explicit CompiledSystem(const model::PiecewiseSystem& sys);

  std::size_t dimension() const { return dim_; }
  std::size_t cell_count() const { return cells_.size(); }

  /// Closed guards; the lowest satisfying index wins. Throws if none holds.
  std::size_t active_cell(double t, std::span<const double> x);
  void field(std::size_t cell, double t, std::span<const double> x,
             std::span<double> out);

 private:
  void fill_powers(double t, std::span<const double> x);

  struct Cell {
    std::vector<CompiledPolynomial> guard;
    std::vector<CompiledPolynomial> field;
  };
  std::size_t dim_;
  int stride_;
  std::vector<Cell> cells_;
  std::vector<double> powers_;
};

}  // namespace occuval::sim

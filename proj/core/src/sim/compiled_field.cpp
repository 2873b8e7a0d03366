#include "occuval/sim/compiled_field.hpp"

#include <algorithm>
#include <stdexcept>

namespace occuval::sim {

using poly::Var;

CompiledPolynomial::CompiledPolynomial(const poly::Polynomial& p,
                                       const std::vector<Var>& order) {
  for (const auto& [m, c] : p.terms()) {
    Term t{c, static_cast<std::uint32_t>(vars_.size()), 0};
    for (const auto& [v, e] : m.factors()) {
      auto it = std::find(order.begin(), order.end(), v);
      if (it == order.end()) {
        throw std::invalid_argument("compile: variable '" + v.name() +
                                    "' is not a state of the system");
      }
      vars_.push_back(static_cast<std::uint16_t>(it - order.begin()));
      exps_.push_back(static_cast<std::uint8_t>(e));
      max_power_ = std::max(max_power_, e);
    }
    t.end = static_cast<std::uint32_t>(vars_.size());
    terms_.push_back(t);
  }
}

double CompiledPolynomial::evaluate(std::span<const double> powers,
                                    int stride) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (std::uint32_t k = t.begin; k < t.end; ++k) {
      v *= powers[static_cast<std::size_t>(vars_[k]) * stride + exps_[k]];
    }
    sum += v;
  }
  return sum;
}

CompiledSystem::CompiledSystem(const model::PiecewiseSystem& sys)
    : dim_(sys.states.size()) {
  sys.validate();
  if (!sys.inputs.empty()) {
    throw std::invalid_argument(
        "cannot simulate a system with exogenous inputs");
  }
  std::vector<Var> order;
  order.push_back(sys.time.valid() ? sys.time : Var("__unused_time"));
  order.insert(order.end(), sys.states.begin(), sys.states.end());
  int max_power = 1;
  for (const auto& c : sys.cells) {
    Cell cell;
    for (const auto& g : c.guard.inequalities) {
      cell.guard.emplace_back(g, order);
      max_power = std::max(max_power, cell.guard.back().max_power());
    }
    for (const auto& f : c.field) {
      cell.field.emplace_back(f, order);
      max_power = std::max(max_power, cell.field.back().max_power());
    }
    cells_.push_back(std::move(cell));
  }
  stride_ = max_power + 1;
  powers_.assign(order.size() * static_cast<std::size_t>(stride_), 1.0);
}

void CompiledSystem::fill_powers(double t, std::span<const double> x) {
  auto fill = [&](std::size_t var, double value) {
    double* row = powers_.data() + var * static_cast<std::size_t>(stride_);
    row[0] = 1.0;
    for (int e = 1; e < stride_; ++e) row[e] = row[e - 1] * value;
  };
  fill(0, t);
  for (std::size_t i = 0; i < dim_; ++i) fill(i + 1, x[i]);
}

std::size_t CompiledSystem::active_cell(double t, std::span<const double> x) {
  fill_powers(t, x);
  for (std::size_t j = 0; j < cells_.size(); ++j) {
    bool inside = true;
    for (const auto& g : cells_[j].guard) {
      if (g.evaluate(powers_, stride_) < 0.0) {
        inside = false;
        break;
      }
    }
    if (inside) return j;
  }
  throw std::runtime_error("state lies in no cell of the piecewise system");
}

void CompiledSystem::field(std::size_t cell, double t,
                           std::span<const double> x, std::span<double> out) {
  fill_powers(t, x);
  const auto& f = cells_.at(cell).field;
  for (std::size_t i = 0; i < dim_; ++i) out[i] = f[i].evaluate(powers_, stride_);
}

}  // namespace occuval::sim

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "occuval/poly/variable.hpp"

namespace occuval::poly {

/// Sparse power product. Factors are kept sorted by variable id and never
/// carry a zero exponent.
class Monomial {
 public:
  using Factor = std::pair<Var, int>;

  Monomial() = default;
  explicit Monomial(Var v, int power = 1);
  /// Zero exponents are dropped; repeated variables are merged.
  explicit Monomial(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  int degree() const { return degree_; }
  int exponent(Var v) const;
  bool is_constant() const { return factors_.empty(); }

  Monomial operator*(const Monomial& other) const;

  /// Exponent of `v` lowered by one; `v` must appear.
  Monomial lowered(Var v) const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.factors_ == b.factors_;
  }

 private:
  std::vector<Factor> factors_;
  int degree_ = 0;
};

/// Graded order: lower total degree first; within a degree the
/// lexicographically larger exponent vector (in variable-id order) first.
struct GradedLexOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Same ordering on dense exponent vectors of equal length.
bool graded_lex_before(const std::vector<std::uint8_t>& a,
                       const std::vector<std::uint8_t>& b);

}  // namespace occuval::poly

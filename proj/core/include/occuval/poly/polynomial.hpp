#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "occuval/poly/monomial.hpp"
#include "occuval/poly/variable.hpp"

namespace occuval::poly {

/// Raised on variable-universe mismatches and missing assignments.
class PolynomialError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Terms whose magnitude falls below this after cancellation are dropped.
inline constexpr double kCancellationThreshold = 1e-15;

using Assignment = std::unordered_map<Var, double>;

/// Sparse real polynomial with an explicit variable universe. Values are
/// immutable once built; every operation returns a new polynomial.
///
/// Arithmetic between two polynomials requires one universe to contain the
/// other; the result lives in the larger universe. Constants have an empty
/// universe and combine with anything.
class Polynomial {
 public:
  using Terms = std::map<Monomial, double, GradedLexOrder>;

  Polynomial() = default;
  Polynomial(double constant);  // NOLINT(google-explicit-constructor)
  Polynomial(Terms terms, Universe universe);

  /// The polynomial `v` over `universe` (which must contain `v`).
  static Polynomial variable(Var v, const Universe& universe);
  static Polynomial variable(Var v) { return variable(v, {v}); }
  static Polynomial monomial(const Monomial& m, double coeff,
                             const Universe& universe);

  const Terms& terms() const { return terms_; }
  const Universe& universe() const { return universe_; }

  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  int degree_in(Var v) const;
  double coefficient(const Monomial& m) const;
  /// Variables with a nonzero exponent in some term.
  Universe used_variables() const;

  /// Same terms over a larger universe.
  Polynomial with_universe(const Universe& universe) const;

  Polynomial operator+(const Polynomial& q) const;
  Polynomial operator-(const Polynomial& q) const;
  Polynomial operator*(const Polynomial& q) const;
  Polynomial operator-() const { return scaled(-1.0); }
  Polynomial scaled(double factor) const;
  Polynomial& operator+=(const Polynomial& q) { return *this = *this + q; }
  Polynomial& operator-=(const Polynomial& q) { return *this = *this - q; }
  Polynomial& operator*=(const Polynomial& q) { return *this = *this * q; }
  Polynomial pow(int exponent) const;

  Polynomial differentiate(Var v) const;

  double evaluate(const Assignment& point) const;

  /// Composition: every variable in `map` is replaced by its image. Unmapped
  /// variables are kept.
  Polynomial substitute(const std::unordered_map<Var, Polynomial>& map) const;

  /// Termwise comparison.
  bool approx_equal(const Polynomial& q, double tol) const;

  std::string to_string() const;

 private:
  static Polynomial from_accumulator(std::map<Monomial, double, GradedLexOrder>
                                         acc,
                                     Universe universe);

  Terms terms_;
  Universe universe_;
};

inline Polynomial operator+(double c, const Polynomial& p) {
  return Polynomial(c) + p;
}
inline Polynomial operator-(double c, const Polynomial& p) {
  return Polynomial(c) - p;
}
inline Polynomial operator*(double c, const Polynomial& p) {
  return p.scaled(c);
}

/// Checked universe merge for binary operations; throws naming the offending
/// variable when neither universe contains the other.
Universe compatible_universe(const Universe& a, const Universe& b);

/// Polynomial vectors (vector fields).
using PolyVector = std::vector<Polynomial>;

/// Maclaurin truncation of the logistic-type basis (1 + e^x)^-1 in `x`.
/// Supported degrees: 1, 3, 5.
Polynomial sigmoid_taylor(int degree, Var x);

}  // namespace occuval::poly

#include "occuval/poly/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace occuval::poly {

Universe compatible_universe(const Universe& a, const Universe& b) {
  if (universe_subset(a, b)) return b;
  if (universe_subset(b, a)) return a;
  for (Var v : a) {
    if (!universe_contains(b, v)) {
      throw PolynomialError("variable-universe mismatch: '" + v.name() +
                            "' is not in the other operand's universe");
    }
  }
  throw PolynomialError("variable-universe mismatch");
}

Polynomial::Polynomial(double constant) {
  if (std::abs(constant) >= kCancellationThreshold) {
    terms_.emplace(Monomial{}, constant);
  }
}

Polynomial::Polynomial(Terms terms, Universe universe)
    : universe_(make_universe(std::move(universe))) {
  for (auto& [m, c] : terms) {
    for (const auto& [v, e] : m.factors()) {
      if (!universe_contains(universe_, v)) {
        throw PolynomialError("term uses variable '" + v.name() +
                              "' outside the declared universe");
      }
    }
    if (std::abs(c) >= kCancellationThreshold) terms_.emplace(m, c);
  }
}

Polynomial Polynomial::variable(Var v, const Universe& universe) {
  Universe u = make_universe(universe);
  if (!universe_contains(u, v)) {
    throw PolynomialError("variable '" + v.name() + "' not in universe");
  }
  Polynomial p;
  p.universe_ = std::move(u);
  p.terms_.emplace(Monomial(v), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const Monomial& m, double coeff,
                                const Universe& universe) {
  Terms t;
  t.emplace(m, coeff);
  return Polynomial(std::move(t), universe);
}

Polynomial Polynomial::from_accumulator(
    std::map<Monomial, double, GradedLexOrder> acc, Universe universe) {
  Polynomial p;
  p.universe_ = std::move(universe);
  for (auto it = acc.begin(); it != acc.end();) {
    if (std::abs(it->second) < kCancellationThreshold) {
      it = acc.erase(it);
    } else {
      ++it;
    }
  }
  p.terms_ = std::move(acc);
  return p;
}

int Polynomial::degree() const {
  // Terms are graded, so the last one has the largest degree.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

int Polynomial::degree_in(Var v) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(v));
  return d;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

Universe Polynomial::used_variables() const {
  std::vector<Var> vs;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m.factors()) vs.push_back(v);
  }
  return make_universe(std::move(vs));
}

Polynomial Polynomial::with_universe(const Universe& universe) const {
  Universe u = make_universe(universe);
  if (!universe_subset(universe_, u)) {
    compatible_universe(universe_, u);  // throws with a diagnostic
  }
  Polynomial p = *this;
  p.universe_ = std::move(u);
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
  Universe u = compatible_universe(universe_, q.universe_);
  auto acc = terms_;
  for (const auto& [m, c] : q.terms_) acc[m] += c;
  return from_accumulator(std::move(acc), std::move(u));
}

Polynomial Polynomial::operator-(const Polynomial& q) const {
  Universe u = compatible_universe(universe_, q.universe_);
  auto acc = terms_;
  for (const auto& [m, c] : q.terms_) acc[m] -= c;
  return from_accumulator(std::move(acc), std::move(u));
}

Polynomial Polynomial::operator*(const Polynomial& q) const {
  Universe u = compatible_universe(universe_, q.universe_);
  std::map<Monomial, double, GradedLexOrder> acc;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : q.terms_) acc[ma * mb] += ca * cb;
  }
  return from_accumulator(std::move(acc), std::move(u));
}

Polynomial Polynomial::scaled(double factor) const {
  auto acc = terms_;
  for (auto& [m, c] : acc) c *= factor;
  return from_accumulator(std::move(acc), universe_);
}

Polynomial Polynomial::pow(int exponent) const {
  if (exponent < 0) throw PolynomialError("negative power");
  Polynomial out(1.0);
  out.universe_ = universe_;
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1) out = out * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return out;
}

Polynomial Polynomial::differentiate(Var v) const {
  std::map<Monomial, double, GradedLexOrder> acc;
  for (const auto& [m, c] : terms_) {
    const int e = m.exponent(v);
    if (e == 0) continue;
    acc[m.lowered(v)] += c * e;
  }
  return from_accumulator(std::move(acc), universe_);
}

double Polynomial::evaluate(const Assignment& point) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c;
    for (const auto& [v, e] : m.factors()) {
      auto it = point.find(v);
      if (it == point.end()) {
        throw PolynomialError("evaluate: no value assigned to variable '" +
                              v.name() + "'");
      }
      double x = it->second;
      double pw = 1.0;
      for (int k = 0; k < e; ++k) pw *= x;
      term *= pw;
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::substitute(
    const std::unordered_map<Var, Polynomial>& map) const {
  std::vector<Var> kept;
  for (Var v : universe_) {
    if (!map.count(v)) kept.push_back(v);
  }
  Universe u = make_universe(kept);
  for (const auto& [v, img] : map) {
    if (universe_contains(universe_, v)) u = universe_union(u, img.universe());
  }
  // Cache powers of each image; substitution is applied termwise.
  std::unordered_map<Var, std::vector<Polynomial>> powers;
  auto power_of = [&](Var v, int e) -> const Polynomial& {
    auto& table = powers[v];
    if (table.empty()) {
      Polynomial one(1.0);
      table.push_back(one.with_universe(u));
    }
    while (static_cast<int>(table.size()) <= e) {
      table.push_back(table.back() * map.at(v).with_universe(u));
    }
    return table[e];
  };
  std::map<Monomial, double, GradedLexOrder> acc;
  for (const auto& [m, c] : terms_) {
    std::vector<Monomial::Factor> keep;
    std::vector<std::pair<Var, int>> replace;
    for (const auto& f : m.factors()) {
      if (map.count(f.first)) {
        replace.push_back(f);
      } else {
        keep.push_back(f);
      }
    }
    if (replace.empty()) {
      acc[m] += c;
      continue;
    }
    Polynomial prod = Polynomial::monomial(Monomial(keep), c, u);
    for (const auto& [v, e] : replace) prod = prod * power_of(v, e);
    for (const auto& [pm, pc] : prod.terms()) acc[pm] += pc;
  }
  return from_accumulator(std::move(acc), std::move(u));
}

bool Polynomial::approx_equal(const Polynomial& q, double tol) const {
  auto a = terms_.begin();
  auto b = q.terms_.begin();
  GradedLexOrder less;
  while (a != terms_.end() || b != q.terms_.end()) {
    if (b == q.terms_.end() || (a != terms_.end() && less(a->first, b->first))) {
      if (std::abs(a->second) > tol) return false;
      ++a;
    } else if (a == terms_.end() || less(b->first, a->first)) {
      if (std::abs(b->second) > tol) return false;
      ++b;
    } else {
      if (std::abs(a->second - b->second) > tol) return false;
      ++a;
      ++b;
    }
  }
  return true;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const double mag = std::abs(c);
    if (m.is_constant() || mag != 1.0) os << mag;
    bool need_star = !m.is_constant() && mag != 1.0;
    for (const auto& [v, e] : m.factors()) {
      if (need_star) os << "*";
      os << v.name();
      if (e > 1) os << "^" << e;
      need_star = true;
    }
  }
  return os.str();
}

Polynomial sigmoid_taylor(int degree, Var x) {
  // (1 + e^x)^-1 = 1/2 - x/4 + x^3/48 - x^5/480 + ...
  static constexpr double kCoeffs[] = {0.5, -0.25, 0.0, 1.0 / 48.0, 0.0,
                                       -1.0 / 480.0};
  if (degree != 1 && degree != 3 && degree != 5) {
    throw PolynomialError("sigmoid_taylor: unsupported degree " +
                          std::to_string(degree) + " (expected 1, 3 or 5)");
  }
  Polynomial::Terms t;
  for (int k = 0; k <= degree; ++k) {
    if (kCoeffs[k] != 0.0) t.emplace(Monomial(x, k), kCoeffs[k]);
  }
  return Polynomial(std::move(t), {x});
}

}  // namespace occuval::poly

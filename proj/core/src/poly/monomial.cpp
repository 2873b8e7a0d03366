#include "occuval/poly/monomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace occuval::poly {

Monomial::Monomial(Var v, int power) {
  if (power < 0) throw std::invalid_argument("negative exponent");
  if (power > 0) {
    factors_.emplace_back(v, power);
    degree_ = power;
  }
}

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  for (const auto& [v, e] : factors) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    if (e == 0) continue;
    if (!factors_.empty() && factors_.back().first == v) {
      factors_.back().second += e;
    } else {
      factors_.emplace_back(v, e);
    }
    degree_ += e;
  }
}

int Monomial::exponent(Var v) const {
  auto it = std::lower_bound(
      factors_.begin(), factors_.end(), v,
      [](const Factor& f, Var x) { return f.first < x; });
  return (it != factors_.end() && it->first == v) ? it->second : 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() ||
        (a != factors_.end() && a->first < b->first)) {
      out.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  out.degree_ = degree_ + other.degree_;
  return out;
}

Monomial Monomial::lowered(Var v) const {
  Monomial out = *this;
  for (auto it = out.factors_.begin(); it != out.factors_.end(); ++it) {
    if (it->first == v) {
      if (--it->second == 0) out.factors_.erase(it);
      --out.degree_;
      return out;
    }
  }
  throw std::invalid_argument("lowered: variable " + v.name() +
                              " does not appear");
}

bool GradedLexOrder::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < fa.size() || j < fb.size()) {
    if (j == fb.size() || (i < fa.size() && fa[i].first < fb[j].first)) {
      return true;  // a has a positive exponent where b has zero
    }
    if (i == fa.size() || fb[j].first < fa[i].first) return false;
    if (fa[i].second != fb[j].second) return fa[i].second > fb[j].second;
    ++i;
    ++j;
  }
  return false;
}

bool graded_lex_before(const std::vector<std::uint8_t>& a,
                       const std::vector<std::uint8_t>& b) {
  int da = 0;
  int db = 0;
  for (auto e : a) da += e;
  for (auto e : b) db += e;
  if (da != db) return da < db;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return a[k] > b[k];
  }
  return false;
}

}  // namespace occuval::poly

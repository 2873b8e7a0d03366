#include "occuval/poly/monomial_basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace occuval::poly {
namespace {

// Appends every exponent vector of total degree `deg` over positions
// [pos, n) in descending lexicographic order.
void enumerate(Exponents& cur, std::size_t pos, int deg,
               std::vector<Exponents>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = static_cast<std::uint8_t>(deg);
    out.push_back(cur);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[pos] = static_cast<std::uint8_t>(e);
    enumerate(cur, pos + 1, deg - e, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

MonomialBasis::MonomialBasis(std::vector<Var> variables, int max_degree)
    : variables_(std::move(variables)), max_degree_(max_degree) {
  if (max_degree < 0) throw std::invalid_argument("negative basis degree");
  if (max_degree > 255) throw std::invalid_argument("basis degree too large");
  const std::size_t n = variables_.size();
  exponents_.reserve(binomial(n + max_degree, max_degree));
  if (n == 0) {
    exponents_.emplace_back();
  } else {
    Exponents cur(n, 0);
    for (int deg = 0; deg <= max_degree; ++deg) enumerate(cur, 0, deg, exponents_);
  }
  index_.reserve(exponents_.size());
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    index_.emplace(key(exponents_[i]), i);
  }
}

std::string MonomialBasis::key(const Exponents& e) {
  return std::string(e.begin(), e.end());
}

int MonomialBasis::degree(std::size_t index) const {
  int d = 0;
  for (auto e : exponents_.at(index)) d += e;
  return d;
}

std::optional<std::size_t> MonomialBasis::index_of(const Exponents& e) const {
  if (e.size() != variables_.size()) return std::nullopt;
  auto it = index_.find(key(e));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> MonomialBasis::index_of(const Monomial& m) const {
  if (m.degree() > max_degree_) return std::nullopt;
  Exponents e(variables_.size(), 0);
  for (const auto& [v, p] : m.factors()) {
    auto it = std::find(variables_.begin(), variables_.end(), v);
    if (it == variables_.end()) return std::nullopt;
    e[static_cast<std::size_t>(it - variables_.begin())] =
        static_cast<std::uint8_t>(p);
  }
  return index_of(e);
}

Monomial MonomialBasis::monomial(std::size_t index) const {
  const auto& e = exponents_.at(index);
  std::vector<Monomial::Factor> f;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k]) f.emplace_back(variables_[k], e[k]);
  }
  return Monomial(std::move(f));
}

std::size_t MonomialBasis::prefix_size(int d) const {
  if (d < 0) return 0;
  d = std::min(d, max_degree_);
  return binomial(variables_.size() + static_cast<std::size_t>(d),
                  static_cast<std::size_t>(d));
}

}  // namespace occuval::poly

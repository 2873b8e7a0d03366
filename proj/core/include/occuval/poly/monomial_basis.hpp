#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "occuval/poly/monomial.hpp"
#include "occuval/poly/variable.hpp"

namespace occuval::poly {

using Exponents = std::vector<std::uint8_t>;

/// All monomials of total degree <= max_degree in an ordered variable list,
/// indexed in graded-lexicographic order. Position 0 is the constant
/// monomial and size() == binomial(n + d, d).
class MonomialBasis {
 public:
  MonomialBasis(std::vector<Var> variables, int max_degree);

  const std::vector<Var>& variables() const { return variables_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return exponents_.size(); }

  const Exponents& exponents(std::size_t index) const {
    return exponents_.at(index);
  }
  int degree(std::size_t index) const;
  std::optional<std::size_t> index_of(const Exponents& e) const;
  /// Index of a sparse monomial; nullopt if it uses a variable outside the
  /// basis or exceeds the degree.
  std::optional<std::size_t> index_of(const Monomial& m) const;

  Monomial monomial(std::size_t index) const;
  /// Number of basis elements with degree <= d (a prefix of the ordering).
  std::size_t prefix_size(int d) const;

 private:
  static std::string key(const Exponents& e);

  std::vector<Var> variables_;
  int max_degree_;
  std::vector<Exponents> exponents_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace occuval::poly

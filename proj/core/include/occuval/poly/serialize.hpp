#pragma once

#include <nlohmann/json.hpp>

#include "occuval/poly/polynomial.hpp"

namespace occuval::poly {

/// {"universe": [names], "terms": [{"exponents": [[name, pow], ...],
/// "coeff": c}, ...]} with terms in graded-lex order.
nlohmann::json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);

}  // namespace occuval::poly

#include "occuval/poly/serialize.hpp"

namespace occuval::poly {

nlohmann::json to_json(const Polynomial& p) {
  nlohmann::json universe = nlohmann::json::array();
  for (Var v : p.universe()) universe.push_back(v.name());
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : p.terms()) {
    nlohmann::json exps = nlohmann::json::array();
    for (const auto& [v, e] : m.factors()) exps.push_back({v.name(), e});
    terms.push_back({{"exponents", std::move(exps)}, {"coeff", c}});
  }
  return {{"universe", std::move(universe)}, {"terms", std::move(terms)}};
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
  std::vector<Var> universe;
  for (const auto& name : j.at("universe")) {
    universe.emplace_back(name.get<std::string>());
  }
  Polynomial::Terms terms;
  for (const auto& t : j.at("terms")) {
    std::vector<Monomial::Factor> f;
    for (const auto& e : t.at("exponents")) {
      f.emplace_back(Var(e.at(0).get<std::string>()), e.at(1).get<int>());
    }
    terms[Monomial(std::move(f))] += t.at("coeff").get<double>();
  }
  return Polynomial(std::move(terms), std::move(universe));
}

}  // namespace occuval::poly

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "occuval/poly/monomial_basis.hpp"
#include "occuval/poly/polynomial.hpp"
#include "occuval/poly/serialize.hpp"
#include "test_support.hpp"

using namespace occuval::poly;
using occuval::testkit::random_polynomial;

namespace {

const Var x("x"), y("y"), t("t");

Polynomial X() { return Polynomial::variable(x); }

}  // namespace

TEST(Var, InterningGivesSameIdentity) {
  EXPECT_EQ(Var("alpha"), Var("alpha"));
  EXPECT_NE(Var("alpha"), Var("beta"));
  EXPECT_EQ(Var("alpha").name(), "alpha");
  EXPECT_FALSE(Var().valid());
}

TEST(Universe, UnionAndSubset) {
  const auto u = make_universe({y, x, x});
  EXPECT_EQ(u.size(), 2u);
  EXPECT_TRUE(universe_subset({x}, u));
  EXPECT_FALSE(universe_subset({t}, u));
  EXPECT_EQ(universe_union({x}, {t}).size(), 2u);
}

TEST(Monomial, CanonicalForm) {
  const Monomial m({{x, 2}, {y, 0}, {x, 1}});
  EXPECT_EQ(m.degree(), 3);
  EXPECT_EQ(m.exponent(x), 3);
  EXPECT_EQ(m.exponent(y), 0);
  for (const auto& f : m.factors()) EXPECT_NE(f.second, 0);
  EXPECT_EQ(Monomial(x) * Monomial(y, 2), Monomial({{y, 2}, {x, 1}}));
}

TEST(Polynomial, DifferenceOfSquares) {
  const Polynomial p = (X() + 1.0) * (X() - 1.0);
  EXPECT_TRUE(p.approx_equal(X() * X() - 1.0, 0.0));
  EXPECT_EQ(p.terms().size(), 2u);
}

TEST(Polynomial, AdditiveIdentity) {
  const Polynomial p = 3.0 * X() * X() + 2.0;
  EXPECT_TRUE((p + Polynomial(0.0)).approx_equal(p, 0.0));
}

TEST(Polynomial, DegreeAdditivityOfProducts) {
  const Var beta("beta"), da("delta_a");
  const auto u = make_universe({beta, da});
  const Polynomial b = Polynomial::variable(beta, u);
  const Polynomial p = (b * b) * Polynomial::variable(da, u);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_EQ(Polynomial(0.0).degree(), -1);
}

TEST(Polynomial, NoZeroCoefficientsAfterCancellation) {
  const Polynomial p = X() + 1.0;
  const Polynomial q = p - X();
  for (const auto& [m, c] : q.terms()) EXPECT_NE(c, 0.0);
  EXPECT_EQ(q.terms().size(), 1u);
  EXPECT_TRUE((p - p).is_zero());
}

TEST(Polynomial, UniverseMismatchThrows) {
  const Polynomial a = Polynomial::variable(x, {x});
  const Polynomial b = Polynomial::variable(y, {y});
  EXPECT_THROW((void)(a + b), PolynomialError);
  EXPECT_NO_THROW((void)(a + 1.0));
}

TEST(Polynomial, Derivatives) {
  EXPECT_TRUE(X().pow(3).differentiate(x).approx_equal(3.0 * X() * X(), 0.0));
  const auto u = make_universe({t, x});
  const Polynomial tx = Polynomial::variable(t, u) * Polynomial::variable(x, u);
  EXPECT_TRUE(tx.differentiate(t).approx_equal(Polynomial::variable(x, u), 0.0));
}

TEST(Polynomial, Evaluation) {
  EXPECT_DOUBLE_EQ((X() * X() + 1.0).evaluate({{x, 2.0}}), 5.0);
  EXPECT_DOUBLE_EQ(Polynomial(7.0).evaluate({}), 7.0);
  EXPECT_THROW((void)X().evaluate({{y, 1.0}}), PolynomialError);
}

TEST(Polynomial, Substitution) {
  const auto u = make_universe({x, y});
  const Polynomial xx = Polynomial::variable(x, u);
  const Polynomial yy = Polynomial::variable(y, u);
  const Polynomial r = (xx * xx).substitute({{x, 2.0 * yy}});
  EXPECT_NEAR(r.coefficient(Monomial(y, 2)), 4.0, 1e-15);
  EXPECT_EQ(r.coefficient(Monomial(x, 2)), 0.0);
  const Polynomial p = 3.0 * xx * yy + yy;
  EXPECT_TRUE(p.substitute({{x, xx}}).approx_equal(p, 0.0));

  // box-to-unit scaling of a 30 degree half-width
  const Var beta("beta");
  const double a = 30.0 * M_PI / 180.0;
  const Polynomial b = Polynomial::variable(beta);
  EXPECT_NEAR(b.substitute({{beta, a * b}}).coefficient(Monomial(beta)), 0.5236, 5e-5);
}

TEST(Sigmoid, MaclaurinCoefficients) {
  const Polynomial s1 = sigmoid_taylor(1, x);
  EXPECT_TRUE(s1.approx_equal(0.5 - 0.25 * X(), 1e-15));
  for (int d : {1, 3, 5}) {
    EXPECT_DOUBLE_EQ(sigmoid_taylor(d, x).evaluate({{x, 0.0}}), 0.5);
  }
  const double s3 = sigmoid_taylor(3, x).evaluate({{x, 0.5}});
  EXPECT_NEAR(s3, 0.37760, 5e-6);
  const double exact = 1.0 / (1.0 + std::exp(0.5));
  EXPECT_NEAR(exact, 0.37754, 5e-6);
  EXPECT_LT(std::abs(s3 - exact), 1e-3);
  EXPECT_THROW((void)sigmoid_taylor(2, x), std::invalid_argument);
}

TEST(MonomialBasis, SizeOrderAndBijection) {
  for (int n = 1; n <= 10; ++n) {
    std::vector<Var> vars;
    for (int i = 0; i < n; ++i) vars.emplace_back("b" + std::to_string(i));
    for (int d = 0; d <= 6; ++d) {
      if (binomial(static_cast<std::size_t>(n + d), static_cast<std::size_t>(d)) > 20000) continue;
      const MonomialBasis basis(vars, d);
      ASSERT_EQ(basis.size(), binomial(static_cast<std::size_t>(n + d), static_cast<std::size_t>(d)));
      EXPECT_EQ(basis.degree(0), 0);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        ASSERT_EQ(basis.index_of(basis.exponents(k)), k);
        ASSERT_EQ(basis.index_of(basis.monomial(k)), k);
        if (k > 0) {
          ASSERT_LE(basis.degree(k - 1), basis.degree(k));
          ASSERT_TRUE(graded_lex_before(basis.exponents(k - 1), basis.exponents(k)));
        }
      }
      EXPECT_EQ(basis.prefix_size(d), basis.size());
    }
  }
}

TEST(MonomialBasis, LargeBasesStillBijective) {
  // the skipped (n, d) pairs above, checked on the index map only
  std::vector<Var> vars;
  for (int i = 0; i < 10; ++i) vars.emplace_back("c" + std::to_string(i));
  const MonomialBasis basis(vars, 6);
  ASSERT_EQ(basis.size(), 8008u);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    ASSERT_EQ(basis.index_of(basis.exponents(k)), k);
  }
}

TEST(PolynomialProperties, RingAxioms) {
  std::mt19937_64 rng(7);
  std::vector<Var> vars;
  for (int i = 0; i < 6; ++i) vars.emplace_back("r" + std::to_string(i));
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_polynomial(rng, vars, 3, 8);
    const auto q = random_polynomial(rng, vars, 3, 8);
    const auto r = random_polynomial(rng, vars, 3, 8);
    EXPECT_TRUE(((p + q) * r).approx_equal(p * r + q * r, 1e-12));
    EXPECT_TRUE((p * q).approx_equal(q * p, 1e-12));
    EXPECT_TRUE(((p + q) + r).approx_equal(p + (q + r), 1e-12));
    if (!p.is_zero() && !q.is_zero()) EXPECT_EQ((p * q).degree(), p.degree() + q.degree());
  }
}

TEST(PolynomialProperties, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Var> vars;
  for (int i = 0; i < 4; ++i) vars.emplace_back("f" + std::to_string(i));
  const auto p = random_polynomial(rng, vars, 5, 20);
  for (int k = 0; k < 100; ++k) {
    Assignment pt;
    for (Var v : vars) pt[v] = unit(rng);
    const Var v = vars[static_cast<std::size_t>(k) % vars.size()];
    const double h = 1e-6;
    Assignment lo = pt, hi = pt;
    lo[v] -= h;
    hi[v] += h;
    const double fd = (p.evaluate(hi) - p.evaluate(lo)) / (2 * h);
    const double exact = p.differentiate(v).evaluate(pt);
    EXPECT_NEAR(fd, exact, 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST(PolynomialProperties, AffineSubstitutionRoundTrip) {
  std::mt19937_64 rng(5);
  std::vector<Var> vars;
  for (int i = 0; i < 3; ++i) vars.emplace_back("s" + std::to_string(i));
  const auto u = make_universe(vars);
  const auto p = random_polynomial(rng, vars, 4, 12);
  std::unordered_map<Var, Polynomial> fwd, back;
  const double scale[] = {0.5, 2.0, -3.0};
  const double shift[] = {0.1, -0.7, 0.25};
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto v = Polynomial::variable(vars[i], u);
    fwd.emplace(vars[i], scale[i] * v + shift[i]);
    back.emplace(vars[i], (1.0 / scale[i]) * (v - shift[i]));
  }
  EXPECT_TRUE(p.substitute(fwd).substitute(back).approx_equal(p, 1e-10));
}

TEST(Serialize, JsonRoundTrip) {
  std::mt19937_64 rng(3);
  const auto p = random_polynomial(rng, {x, y, t}, 4, 10);
  const auto j = to_json(p);
  const auto q = polynomial_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_TRUE(p.approx_equal(q, 0.0));
  EXPECT_EQ(p.universe(), q.universe());
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "scenv/polynomial.hpp"
#include "support/oracles.hpp"

using namespace scenv;

namespace {

Polynomial var(VarId v) { return Polynomial::variable(v); }

Polynomial random_poly(std::mt19937& rng, int max_deg, int num_vars) {
    std::uniform_int_distribution<int> n_terms(0, 5);
    std::uniform_int_distribution<long> coeff(-20, 20);
    std::uniform_int_distribution<long> den(1, 12);
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> pick(0, num_vars - 1);
    std::vector<Term> terms;
    int k = n_terms(rng);
    for (int i = 0; i < k; ++i) {
        Term t;
        t.coeff = rational(coeff(rng), den(rng));
        int d = deg(rng);
        for (int j = 0; j < d; ++j)
            t.mono.factors.push_back({static_cast<VarId>(pick(rng)), 1});
        terms.push_back(std::move(t));
    }
    return Polynomial::from_terms(std::move(terms));
}

} // namespace

TEST_CASE("evaluation matches the documented examples") {
    std::vector<double> v03{0.3};
    CHECK(var(0).evaluate(v03) == Catch::Approx(0.3).margin(1e-15));

    Polynomial half_vsq = Polynomial::constant(1, 2) * var(0) * var(0);
    std::vector<double> v1{1.0};
    CHECK(half_vsq.evaluate(v1) == Catch::Approx(0.5).margin(1e-15));

    Polynomial p = Polynomial::constant(1) - half_vsq;
    std::vector<double> vhalf{0.5};
    CHECK(p.evaluate(vhalf) == Catch::Approx(0.875).margin(1e-15));
}

TEST_CASE("missing parameters are reported") {
    std::vector<double> nothing;
    CHECK_THROWS_AS(var(0).evaluate(nothing), MissingParameterError);
    std::vector<double> unset{std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(var(0).evaluate(unset), MissingParameterError);
}

TEST_CASE("is_constant") {
    CHECK(*Polynomial::constant(1, 10).is_constant() == 0.1);
    CHECK_FALSE(var(0).is_constant().has_value());
    Polynomial diff = var(0) - var(0);
    REQUIRE(diff.is_constant().has_value());
    CHECK(*diff.is_constant() == 0.0);
    CHECK(diff.is_zero());
}

TEST_CASE("parameters_of") {
    Polynomial p = Polynomial::constant(1, 10) * (Polynomial::constant(1) - var(0));
    CHECK(p.parameters_of() == std::vector<VarId>{0});
    CHECK(Polynomial::constant(3, 10).parameters_of().empty());
    Polynomial q = var(1) + Polynomial::constant(2) * var(2);
    CHECK(q.parameters_of() == std::vector<VarId>{1, 2});
}

TEST_CASE("evaluation is linear in coefficients (exact arithmetic)") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<long> num(-30, 30);
    std::uniform_int_distribution<long> den(1, 9);
    for (int rep = 0; rep < 200; ++rep) {
        Polynomial p = random_poly(rng, 4, 3);
        Polynomial q = random_poly(rng, 4, 3);
        Rational a = rational(num(rng), den(rng));
        Rational b = rational(num(rng), den(rng));
        std::vector<Rational> u{rational(num(rng), 17), rational(num(rng), 13),
                                rational(num(rng), 11)};
        Rational lhs = oracles::exact_eval(p * a + q * b, u);
        Rational rhs = a * oracles::exact_eval(p, u) + b * oracles::exact_eval(q, u);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("normalization is idempotent") {
    std::mt19937 rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        Polynomial once = random_poly(rng, 5, 3);
        Polynomial twice = Polynomial::from_terms(once.terms());
        CHECK(once == twice);
    }
}

TEST_CASE("term-summation evaluation matches brute-force expansion") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        Polynomial p = random_poly(rng, 6, 3);
        std::vector<double> u{uni(rng), uni(rng), uni(rng)};
        double fast = p.evaluate(u);
        double slow = oracles::brute_force_eval(p, u);
        CHECK(fast == Catch::Approx(slow).margin(1e-12));
    }
}

TEST_CASE("graded-lex printing is deterministic") {
    Polynomial p = var(1) * var(1) + var(0) * var(1) + var(0) + Polynomial::constant(2);
    std::vector<std::string> names{"x", "y"};
    CHECK(p.to_string(names) == "x*y + y^2 + x + 2");
    CHECK(Polynomial().to_string(names) == "0");
}

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "scenv/generators.hpp"
#include "scenv/sampling.hpp"
#include "support/oracles.hpp"

using namespace scenv;

TEST_CASE("draws are deterministic and strictly inside the support") {
    auto pm = generate_fig1();
    auto s1 = draw(pm.dist, pm.model, 5, 7);
    auto s2 = draw(pm.dist, pm.model, 5, 7);
    REQUIRE(s1.samples.size() == 5);
    for (int i = 0; i < 5; ++i) {
        double v = s1.samples[i].get(0);
        CHECK(v == s2.samples[i].get(0));
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    CHECK(s1.rejected_count == 0);
}

TEST_CASE("K = 0 violates the precondition") {
    auto pm = generate_fig1();
    CHECK_THROWS_AS(draw(pm.dist, pm.model, 0, 7), DomainError);
}

TEST_CASE("prefixes agree across sample counts") {
    auto pm = generate_fig1();
    auto big = draw(pm.dist, pm.model, 100, 42);
    auto small = draw(pm.dist, pm.model, 17, 42);
    for (int i = 0; i < 17; ++i)
        CHECK(big.samples[i].get(0) == small.samples[i].get(0));
}

TEST_CASE("uniform marginal passes mean and Kolmogorov-Smirnov checks") {
    auto pm = generate_fig1();
    const std::size_t K = 10000;
    auto set = draw(pm.dist, pm.model, K, 2024);
    std::vector<double> xs;
    double mean = 0.0;
    for (auto& u : set.samples) {
        xs.push_back(u.get(0));
        mean += u.get(0);
    }
    mean /= K;
    CHECK(std::abs(mean - 0.5) < 0.02);

    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        double f = xs[i]; // CDF of Uniform(0,1)
        d = std::max(d, std::abs(f - static_cast<double>(i) / K));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / K - f));
    }
    double critical = 1.62762 / std::sqrt(static_cast<double>(K)); // 1% significance
    CHECK(d < critical);
}

TEST_CASE("dirichlet blocks sample the open simplex") {
    ParametricModel m;
    std::vector<VarId> vars;
    for (int i = 0; i < 3; ++i)
        vars.push_back(m.add_parameter("p" + std::to_string(i), ParamKind::Uncontrollable));
    StateId a = m.add_state("a"), b = m.add_state("b");
    m.set_initial(a);
    m.mark_target(b);
    ActionId act = m.intern_action("_");
    Polynomial rest = Polynomial::constant(1);
    for (VarId v : vars) rest = rest - Polynomial::variable(v);
    m.add_row(a, act,
              {{b, Polynomial::variable(vars[0]) + Polynomial::variable(vars[1])},
               {a, Polynomial::variable(vars[2]) + rest}});
    m.add_row(b, act, {{b, Polynomial::constant(1)}});

    ParameterDistribution dist;
    dist.add_dirichlet(vars, {5.0, 1.0, 1.0, 1.0});
    const std::size_t K = 4000;
    auto set = draw(dist, m, K, 99);
    double mean0 = 0.0;
    for (auto& u : set.samples) {
        double sum = 0.0;
        for (VarId v : vars) {
            CHECK(u.get(v) > 0.0);
            sum += u.get(v);
        }
        CHECK(sum < 1.0); // the implied fourth coordinate stays positive
        mean0 += u.get(vars[0]);
    }
    mean0 /= K;
    CHECK(mean0 == Catch::Approx(5.0 / 8.0).margin(0.02));
}

TEST_CASE("non-graph-preserving draws are rejected and counted") {
    // valid only when p > 1/2: edge 'p - 1/2' must stay positive
    ParametricModel m;
    VarId p = m.add_parameter("p", ParamKind::Uncontrollable);
    StateId a = m.add_state("a"), b = m.add_state("b");
    m.set_initial(a);
    m.mark_target(b);
    ActionId act = m.intern_action("_");
    Polynomial pp = Polynomial::variable(p);
    m.add_row(a, act, {{b, pp - Polynomial::constant(1, 2)},
                       {a, Polynomial::constant(3, 2) - pp}});
    m.add_row(b, act, {{b, Polynomial::constant(1)}});

    ParameterDistribution dist;
    dist.add_uniform(p, 0.0, 1.0);
    auto set = draw(dist, m, 200, 5);
    CHECK(set.rejected_count > 0);
    for (auto& u : set.samples) CHECK(u.get(p) > 0.5);

    // a distribution that can never produce a valid draw exhausts the budget
    ParameterDistribution bad;
    bad.add_discrete(p, {0.25}, {1.0});
    CHECK_THROWS_AS(draw(bad, m, 3, 1), RejectionBudgetExceededError);
}

TEST_CASE("sample sets export to json") {
    auto pm = generate_fig1();
    auto set = draw(pm.dist, pm.model, 3, 11);
    auto j = sample_set_to_json(set, pm.model);
    CHECK(j["seed"] == 11);
    CHECK(j["count"] == 3);
    CHECK(j["samples"].size() == 3);
    CHECK(j["samples"][0].contains("v"));
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "scenv/checker.hpp"
#include "scenv/generators.hpp"
#include "support/oracles.hpp"

using namespace scenv;

namespace {

Specification fig1_spec() {
    return {SpecKind::Reachability, kFig1Lambda, Direction::AtMost, PolicyObjective::Min};
}

double fig1_value(const ParsedModel& pm, const GraphAnalysis& ga, double v) {
    Valuation u(1);
    u.set(0, v);
    return check_sample(pm.model, u, fig1_spec(), ga, GraphPolicy::AllowBoundary).value_at_init;
}

} // namespace

TEST_CASE("fig1 values match path enumeration") {
    auto pm = generate_fig1();
    auto ga = preprocess_for(pm.model, fig1_spec());
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        double v = uni(rng);
        Valuation u(1);
        u.set(0, v);
        auto c = pm.model.instantiate(u, GraphPolicy::AllowBoundary);
        double oracle = oracles::path_enum_value(c);
        CHECK(fig1_value(pm, ga, v) == Catch::Approx(oracle).margin(1e-9));
    }
    CHECK(fig1_value(pm, ga, 0.0) == Catch::Approx(0.14).margin(1e-9));
    CHECK(fig1_value(pm, ga, 1.0) == Catch::Approx(0.09).margin(1e-9));
}

TEST_CASE("fig1 verdicts follow the satisfying region") {
    auto pm = generate_fig1();
    auto ga = preprocess_for(pm.model, fig1_spec());
    auto at = [&](double v) {
        Valuation u(1);
        u.set(0, v);
        return check_sample(pm.model, u, fig1_spec(), ga);
    };
    CHECK(at(0.3).satisfied);
    CHECK_FALSE(at(0.7).satisfied);
    CHECK(at(0.95).satisfied);
}

TEST_CASE("boundary values: target states and unreachable states") {
    auto pm = generate_fig1();
    auto ga = preprocess_for(pm.model, fig1_spec());
    Valuation u(1);
    u.set(0, 0.4);
    auto c = pm.model.instantiate(u);
    auto vr = reach_values(c, *ga.reach, PolicyObjective::Min);
    CHECK(vr.value[3] == 1.0);
    CHECK(vr.value[6] == 0.0);
    CHECK(vr.value[7] == 0.0);
    for (double x : vr.value) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("value iteration agrees with the sparse linear solve on chains") {
    std::mt19937 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        auto pm = oracles::random_parametric_mc(rng, 40, 2);
        auto ga = graph_preprocess(pm.model, pm.model.target_states());
        auto samples = draw(pm.dist, pm.model, 3, 1000 + rep);
        for (const auto& u : samples.samples) {
            auto c = pm.model.instantiate(u);
            auto vi = reach_values(c, *ga.reach, PolicyObjective::Min);
            auto exact = reach_values_exact(c, *ga.reach, PolicyObjective::Min);
            for (StateId s = 0; s < c.num_states; ++s)
                CHECK(vi.value[s] == Catch::Approx(exact.value[s]).margin(1e-6));
        }
    }
}

TEST_CASE("expected-cost values: boundary, one step, geometric") {
    // single goal state
    ParametricModel m;
    StateId s0 = m.add_state("s0"), s1 = m.add_state("s1"), g = m.add_state("g");
    m.set_initial(s0);
    m.mark_goal(g);
    ActionId a = m.intern_action("_");
    Polynomial one = Polynomial::constant(1);
    m.add_row(s0, a, {{g, one}}, Polynomial::constant(3));
    m.add_row(s1, a, {{g, one}}, Polynomial());
    m.add_row(g, a, {{g, one}}, Polynomial());
    Specification spec{SpecKind::ExpectedCost, 10.0, Direction::AtMost, PolicyObjective::Min};
    auto ga = preprocess_for(m, spec);
    Valuation u(0);
    auto c = m.instantiate(u);
    auto vr = cost_values(c, *ga.cost, PolicyObjective::Min);
    CHECK(vr.value[g] == 0.0);
    CHECK(vr.value[s0] == Catch::Approx(3.0).margin(1e-9));

    auto pm = oracles::load_bundled("geometric_cost.umdp");
    Specification cspec{SpecKind::ExpectedCost, 20.0, Direction::AtMost, PolicyObjective::Min};
    auto ga2 = preprocess_for(pm.model, cspec);
    Valuation uq(pm.model.num_params());
    uq.set(*pm.model.find_parameter("q"), 0.25);
    uq.set(*pm.model.find_parameter("w1"), 0.0);
    auto verdict = check_sample(pm.model, uq, cspec, ga2);
    CHECK(verdict.value_at_init == Catch::Approx(4.0).margin(1e-7));
    // cross-check with the exact linear path
    auto cc = pm.model.instantiate(uq);
    std::vector<double> w{0.0};
    auto exact = cost_values_exact(cc, *ga2.cost, PolicyObjective::Min, w);
    CHECK(exact.value[cc.initial] == Catch::Approx(4.0).margin(1e-10));
}

TEST_CASE("min and max policies agree with exhaustive enumeration") {
    std::mt19937 rng(4242);
    auto ga_for = [&](const ConcreteModel& c) {
        AdjacencyList adj = adjacency_of(c);
        return analyze_reach(adj, c.is_target);
    };
    for (int rep = 0; rep < 40; ++rep) {
        auto c = oracles::random_concrete_mdp(rng, 2 + rep % 5, 3);
        auto ra = ga_for(c);
        auto [bmin, bmax] = oracles::enumerate_policies(c);
        auto vmin = reach_values(c, ra, PolicyObjective::Min);
        auto vmax = reach_values(c, ra, PolicyObjective::Max);
        CHECK(vmin.value[c.initial] == Catch::Approx(bmin).margin(1e-8));
        CHECK(vmax.value[c.initial] == Catch::Approx(bmax).margin(1e-8));
    }
}

TEST_CASE("consensus walk values match the gambler's ruin closed form") {
    auto pm = oracles::load_bundled("consensus_coin.umdp");
    Specification spec{SpecKind::Reachability, 0.6, Direction::AtLeast, PolicyObjective::Max};
    auto ga = preprocess_for(pm.model, spec);
    Valuation u(pm.model.num_params());
    u.set(*pm.model.find_parameter("pa"), 0.6);
    u.set(*pm.model.find_parameter("pb"), 0.4);
    auto c = pm.model.instantiate(u);
    auto ruin = [](double p) {
        double r = (1.0 - p) / p;
        return (1.0 - r * r) / (1.0 - r * r * r * r);
    };
    auto vmax = reach_values(c, *ga.reach, PolicyObjective::Max);
    auto vmin = reach_values(c, *ga.reach, PolicyObjective::Min);
    CHECK(vmax.value[c.initial] == Catch::Approx(ruin(0.6)).margin(1e-7));
    CHECK(vmin.value[c.initial] == Catch::Approx(ruin(0.4)).margin(1e-7));
}

TEST_CASE("verdicts near the threshold are resolved exactly") {
    // fig1 value crosses 0.13 at v = 0.13 exactly; a check right there must
    // not be corrupted by value-iteration slack.
    auto pm = generate_fig1();
    auto ga = preprocess_for(pm.model, fig1_spec());
    Valuation u(1);
    u.set(0, 0.13);
    auto verdict = check_sample(pm.model, u, fig1_spec(), ga);
    CHECK(verdict.value_at_init == Catch::Approx(0.13).margin(1e-11));
}

TEST_CASE("scenario program decomposes to per-sample checks") {
    auto pm = generate_fig1();
    auto ga = preprocess_for(pm.model, fig1_spec());
    SampleSet set;
    for (double v : {0.2, 0.3, 0.4}) {
        Valuation u(1);
        u.set(0, v);
        set.samples.push_back(u);
    }
    auto r = scenario_lp_reach(pm.model, set, kFig1Lambda);
    CHECK(r.feasible);
    CHECK_FALSE(r.degenerate);
    CHECK(r.tau == Catch::Approx(fig1_value(pm, ga, 0.2)).margin(1e-12));

    Valuation u7(1);
    u7.set(0, 0.7);
    set.samples.push_back(u7);
    auto r2 = scenario_lp_reach(pm.model, set, kFig1Lambda);
    CHECK_FALSE(r2.feasible);
    CHECK(r2.tau == Catch::Approx(fig1_value(pm, ga, 0.7)).margin(1e-12));

    SampleSet empty;
    auto r3 = scenario_lp_reach(pm.model, empty, kFig1Lambda);
    CHECK(r3.degenerate);
    CHECK(r3.feasible);
    CHECK(r3.tau == 0.0);
}

TEST_CASE("monolithic assembly agrees with the decomposed route") {
    std::mt19937 rng(555);
    for (int rep = 0; rep < 3; ++rep) {
        auto pm = oracles::random_parametric_mc(rng, 30, 2);
        auto samples = draw(pm.dist, pm.model, 5, 31 + rep);
        auto mono = scenario_lp_reach_monolithic(pm.model, samples, 0.9);
        auto dec = scenario_lp_reach(pm.model, samples, 0.9);
        CHECK(mono.tau == Catch::Approx(dec.tau).margin(1e-6));
    }
    auto fig1 = generate_fig1();
    auto samples = draw(fig1.dist, fig1.model, 8, 77);
    auto mono = scenario_lp_reach_monolithic(fig1.model, samples, kFig1Lambda);
    auto dec = scenario_lp_reach(fig1.model, samples, kFig1Lambda);
    CHECK(mono.tau == Catch::Approx(dec.tau).margin(1e-6));
    CHECK(mono.feasible == dec.feasible);
}

TEST_CASE("preprocessing output is identical across random instantiations") {
    auto pm = generate_fig1();
    auto adj0 = adjacency_of(pm.model);
    auto ra0 = analyze_reach(adj0, {0, 0, 0, 1, 0, 0, 0, 0});
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uni(1e-3, 1.0 - 1e-3);
    for (int rep = 0; rep < 100; ++rep) {
        Valuation u(1);
        u.set(0, uni(rng));
        auto c = pm.model.instantiate(u);
        auto adj = adjacency_of(c);
        auto ra = analyze_reach(adj, c.is_target);
        CHECK(ra.cannot_reach == ra0.cannot_reach);
        CHECK(ra.prob0_min == ra0.prob0_min);
        CHECK(ra.mec.mec_id == ra0.mec.mec_id);
    }
}

TEST_CASE("verdict CSV has the documented columns") {
    auto pm = generate_fig1();
    auto ga = preprocess_for(pm.model, fig1_spec());
    std::vector<SampleVerdict> verdicts;
    Valuation u(1);
    u.set(0, 0.3);
    auto v = check_sample(pm.model, u, fig1_spec(), ga);
    v.index = 0;
    verdicts.push_back(v);
    auto csv = verdicts_to_csv(verdicts);
    CHECK(csv.rfind("sample_index,value_at_init,satisfied,wall_time_ms\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

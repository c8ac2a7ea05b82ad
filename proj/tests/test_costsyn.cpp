#include <catch2/catch_amalgamated.hpp>

#include "scenv/costsyn.hpp"
#include "scenv/generators.hpp"
#include "support/oracles.hpp"

using namespace scenv;

namespace {

// two-state chain: s0 -> g with probability 1, cost w1 at s0
ParsedModel unit_cost_chain() {
    ParsedModel pm;
    ParametricModel& m = pm.model;
    m.name = "unit_cost";
    VarId q = m.add_parameter("q", ParamKind::Uncontrollable);
    VarId w = m.add_parameter("w1", ParamKind::ControllableCost);
    StateId s0 = m.add_state("s0"), g = m.add_state("g");
    m.set_initial(s0);
    m.mark_goal(g);
    ActionId a = m.intern_action("_");
    Polynomial one = Polynomial::constant(1);
    (void)q; // declared so samples have a coordinate to carry
    m.add_row(s0, a, {{g, one}}, Polynomial::variable(w));
    m.add_row(g, a, {{g, one}}, Polynomial());
    pm.dist.add_uniform(q, 0.1, 0.9);
    return pm;
}

SampleSet samples_for(const ParsedModel& pm, std::initializer_list<double> qs) {
    SampleSet set;
    for (double q : qs) {
        Valuation u(pm.model.num_params());
        u.set(*pm.model.find_parameter("q"), q);
        set.samples.push_back(u);
    }
    return set;
}

Specification cost_spec(double kappa) {
    return {SpecKind::ExpectedCost, kappa, Direction::AtMost, PolicyObjective::Min};
}

} // namespace

TEST_CASE("one-sample chain pins w at its lower bound") {
    auto pm = unit_cost_chain();
    auto ga = preprocess_for(pm.model, cost_spec(10.0));
    auto set = samples_for(pm, {0.5});
    CostSynOptions opt;
    opt.w_min = 2.0;
    opt.w_max = 100.0;
    opt.mode = CostLpMode::Monolithic;
    auto built = build_cost_lp(pm.model, set, 10.0, opt, ga);
    CHECK(built.equality_rows == set.samples.size() * 1); // |S \ G| = 1 per sample
    auto r = solve_cost_lp(built, 10.0);
    CHECK(r.w_star[0] == Catch::Approx(2.0).margin(1e-6));
    CHECK(r.tau_star == Catch::Approx(2.0).margin(1e-6));
    CHECK(r.feasible);
    CHECK(r.duality_gap <= 1e-7);
}

TEST_CASE("W = 0 reduces to the worst sample expected cost") {
    // strip the cost parameter by fixing the cost to a constant
    ParsedModel pm;
    ParametricModel& m = pm.model;
    VarId q = m.add_parameter("q", ParamKind::Uncontrollable);
    StateId s0 = m.add_state("s0"), s1 = m.add_state("s1"), g = m.add_state("g");
    m.set_initial(s0);
    m.mark_goal(g);
    ActionId a = m.intern_action("_");
    Polynomial pq = Polynomial::variable(q), one = Polynomial::constant(1);
    m.add_row(s0, a, {{s1, pq}, {s0, one - pq}}, Polynomial::constant(1));
    m.add_row(s1, a, {{g, one}}, Polynomial());
    m.add_row(g, a, {{g, one}}, Polynomial());
    pm.dist.add_uniform(q, 0.1, 0.9);

    auto ga = preprocess_for(pm.model, cost_spec(20.0));
    auto set = samples_for(pm, {0.5, 0.25, 0.8});
    for (auto mode : {CostLpMode::Monolithic, CostLpMode::Reduced}) {
        CostSynOptions opt;
        opt.mode = mode;
        auto r = synthesize(pm.model, set, 20.0, opt, ga);
        // checker oracle: worst expected cost is 1/q at q = 0.25
        double worst = 0.0;
        for (const auto& u : set.samples) {
            auto verdict = check_sample(pm.model, u, cost_spec(20.0), ga);
            worst = std::max(worst, verdict.value_at_init);
        }
        CHECK(worst == Catch::Approx(4.0).margin(1e-7));
        CHECK(r.tau_star == Catch::Approx(worst).margin(1e-6));
        CHECK(r.w_star.empty());
        CHECK(r.feasible);
    }
}

TEST_CASE("geometric instance solves to the closed-form optimum") {
    auto pm = oracles::load_bundled("geometric_cost.umdp");
    auto ga = preprocess_for(pm.model, cost_spec(20.0));
    auto set = samples_for(pm, {0.5, 0.25});
    for (auto mode : {CostLpMode::Monolithic, CostLpMode::Reduced}) {
        CostSynOptions opt;
        opt.mode = mode;
        auto r = synthesize(pm.model, set, 20.0, opt, ga);
        // per sample (1 + 2 w1)/q; worst at q = 0.25; minimized at w1 = 0
        CHECK(r.w_star[0] == Catch::Approx(0.0).margin(1e-6));
        CHECK(r.tau_star == Catch::Approx(4.0).margin(1e-6));
        CHECK(r.sample_costs[1] == Catch::Approx(4.0).margin(1e-6));
        CHECK(r.sample_costs[0] == Catch::Approx(2.0).margin(1e-6));
        CHECK(r.feasible);
    }
    // kappa below the reachable optimum flips feasibility
    CostSynOptions opt;
    auto r = synthesize(pm.model, set, 3.0, opt, ga);
    CHECK_FALSE(r.feasible);
}

TEST_CASE("monolithic and reduced modes agree") {
    auto pm = oracles::load_bundled("geometric_cost.umdp");
    auto ga = preprocess_for(pm.model, cost_spec(25.0));
    auto set = draw(pm.dist, pm.model, 20, 13);
    CostSynOptions mono, red;
    mono.mode = CostLpMode::Monolithic;
    red.mode = CostLpMode::Reduced;
    auto a = synthesize(pm.model, set, 25.0, mono, ga);
    auto b = synthesize(pm.model, set, 25.0, red, ga);
    CHECK(a.tau_star == Catch::Approx(b.tau_star).margin(1e-6));
    REQUIRE(a.w_star.size() == b.w_star.size());
    for (std::size_t i = 0; i < a.w_star.size(); ++i)
        CHECK(a.w_star[i] == Catch::Approx(b.w_star[i]).margin(1e-5));
}

TEST_CASE("scaling costs and kappa scales the optimum") {
    auto build_scaled = [&](long gamma_num) {
        ParsedModel pm;
        ParametricModel& m = pm.model;
        VarId q = m.add_parameter("q", ParamKind::Uncontrollable);
        VarId w = m.add_parameter("w1", ParamKind::ControllableCost);
        StateId s0 = m.add_state("s0"), g = m.add_state("g");
        m.set_initial(s0);
        m.mark_goal(g);
        ActionId a = m.intern_action("_");
        Polynomial pq = Polynomial::variable(q), one = Polynomial::constant(1);
        m.add_row(s0, a, {{g, pq}, {s0, one - pq}},
                  Polynomial::constant(gamma_num) * (Polynomial::constant(1) +
                                                     Polynomial::constant(2) * Polynomial::variable(w)));
        m.add_row(g, a, {{g, one}}, Polynomial());
        pm.dist.add_uniform(q, 0.1, 0.9);
        return pm;
    };
    auto base = build_scaled(1);
    auto scaled = build_scaled(7);
    auto ga1 = preprocess_for(base.model, cost_spec(20.0));
    auto ga7 = preprocess_for(scaled.model, cost_spec(140.0));
    auto set = samples_for(base, {0.4, 0.7});
    CostSynOptions opt;
    auto r1 = synthesize(base.model, set, 20.0, opt, ga1);
    auto r7 = synthesize(scaled.model, set, 140.0, opt, ga7);
    CHECK(r7.tau_star == Catch::Approx(7.0 * r1.tau_star).margin(1e-5));
    CHECK(r1.feasible == r7.feasible);
    CHECK(r1.violating == r7.violating);
}

TEST_CASE("a larger w box never increases the optimum") {
    auto pm = oracles::load_bundled("geometric_cost.umdp");
    auto ga = preprocess_for(pm.model, cost_spec(25.0));
    auto set = samples_for(pm, {0.3, 0.6});
    double prev = std::numeric_limits<double>::infinity();
    for (double wmin : {3.0, 1.0, 0.0}) {
        CostSynOptions opt;
        opt.w_min = wmin;
        auto r = synthesize(pm.model, set, 25.0, opt, ga);
        CHECK(r.tau_star <= prev + 1e-9);
        prev = r.tau_star;
    }
}

TEST_CASE("certification needs K >= W+1 and applies the cost theorems") {
    auto pm = oracles::load_bundled("geometric_cost.umdp");
    CHECK_THROWS_AS(synthesize_and_certify(pm.model, pm.dist, 25.0, 1, 3, 0.05), DomainError);
    auto cs = synthesize_and_certify(pm.model, pm.dist, 25.0, 60, 3, 0.05);
    CHECK(cs.K == 60);
    // kappa = 25 is above every reachable cost ((1+0)/0.2 = 5 worst case)
    CHECK(cs.synthesis.violating == 0);
    CHECK(cs.certificate.theorem == Theorem::T3);
    CHECK(cs.certificate.nu < 0.3);
    auto j = synthesis_to_json(cs, pm.model);
    CHECK(j["w_star"].contains("w1"));
    CHECK(j["certificate"]["theorem"] == "T3");
}

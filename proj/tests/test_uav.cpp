#include <catch2/catch_amalgamated.hpp>

#include "scenv/checker.hpp"
#include "scenv/costsyn.hpp"
#include "scenv/generators.hpp"
#include "scenv/modelio.hpp"
#include "scenv/sampling.hpp"
#include "support/oracles.hpp"

using namespace scenv;

TEST_CASE("state and parameter counts follow the construction formula") {
    UavConfig cfg;
    cfg.nx = 4; cfg.ny = 4; cfg.nz = 1;
    cfg.weathers = 2;
    cfg.zones = 1;
    cfg.default_obstacles = false;
    auto pm = generate_uav(cfg);
    // cells * weathers * winds + crash sink
    CHECK(pm.model.num_states() == 4 * 4 * 1 * 2 * 8 + 1);
    // zones * weathers * 7 wind params + weathers * (weathers - 1)
    CHECK(pm.model.num_params() == 1 * 2 * 7 + 2 * 1);
    CHECK(pm.model.validate().empty());
}

TEST_CASE("a one-cell grid satisfies reach >= 0.9 for every instantiation") {
    UavConfig cfg;
    cfg.nx = 1; cfg.ny = 1; cfg.nz = 1;
    cfg.weathers = 2;
    cfg.default_obstacles = false;
    auto pm = generate_uav(cfg);
    Specification spec{SpecKind::Reachability, 0.9, Direction::AtLeast, PolicyObjective::Max};
    auto ga = preprocess_for(pm.model, spec);
    auto samples = draw(pm.dist, pm.model, 20, 4);
    for (const auto& u : samples.samples) {
        auto verdict = check_sample(pm.model, u, spec, ga);
        CHECK(verdict.value_at_init == 1.0);
        CHECK(verdict.satisfied);
    }
}

TEST_CASE("the default desk-scale model validates and instantiates cleanly") {
    auto pm = generate_uav({});
    CHECK(pm.model.validate().empty());
    auto samples = draw(pm.dist, pm.model, 50, 123);
    CHECK(samples.rejected_count == 0);
    auto c = pm.model.instantiate(samples.samples[0]);
    CHECK(c.max_row_sum_error <= 1e-12);
}

TEST_CASE("config errors are rejected") {
    UavConfig bad_zone;
    bad_zone.zones = 99;
    CHECK_THROWS_AS(generate_uav(bad_zone), ConfigError);

    UavConfig target_on_obstacle;
    target_on_obstacle.nx = 3; target_on_obstacle.ny = 3; target_on_obstacle.nz = 1;
    target_on_obstacle.default_obstacles = false;
    target_on_obstacle.obstacles = {{2, 1, 0}};
    CHECK_THROWS_AS(generate_uav(target_on_obstacle), ConfigError);

    UavConfig cost_without_horizon;
    cost_without_horizon.cost_mode = true;
    CHECK_THROWS_AS(generate_uav(cost_without_horizon), ConfigError);

    UavConfig bad_preset;
    bad_preset.preset = "sideways";
    CHECK_THROWS_AS(generate_uav(bad_preset), ConfigError);
}

TEST_CASE("wind presets reweight the dirichlet blocks") {
    for (const char* preset : {"uniform", "bias-y", "bias-neg-x"}) {
        UavConfig cfg;
        cfg.nx = 3; cfg.ny = 3; cfg.nz = 1;
        cfg.preset = preset;
        auto pm = generate_uav(cfg);
        CHECK(pm.model.validate().empty());
    }
}

TEST_CASE("cost mode builds a deadline model with almost-sure goal") {
    UavConfig cfg;
    cfg.nx = 3; cfg.ny = 3; cfg.nz = 1;
    cfg.weathers = 2;
    cfg.cost_mode = true;
    cfg.horizon = 6;
    auto pm = generate_uav(cfg);
    CHECK(pm.model.validate().empty());
    CHECK(pm.model.num_cost_params() == 2);
    Specification spec{SpecKind::ExpectedCost, 20.0, Direction::AtMost, PolicyObjective::Min};
    CHECK_NOTHROW(preprocess_for(pm.model, spec));
    // one sample checks end to end
    auto ga = preprocess_for(pm.model, spec);
    auto samples = draw(pm.dist, pm.model, 2, 6);
    Valuation u = samples.samples[0];
    u.set(*pm.model.find_parameter("wx"), 0.5);
    u.set(*pm.model.find_parameter("wy"), 0.5);
    auto verdict = check_sample(pm.model, u, spec, ga);
    CHECK(verdict.value_at_init >= 0.0);
}

TEST_CASE("cost-mode synthesis runs at desk scale") {
    UavConfig cfg;
    cfg.nx = 3; cfg.ny = 3; cfg.nz = 1;
    cfg.weathers = 1;
    cfg.cost_mode = true;
    cfg.horizon = 6;
    auto pm = generate_uav(cfg);
    CostSynOptions opt;
    opt.w_max = 10.0;
    auto cs = synthesize_and_certify(pm.model, pm.dist, 20.0, 40, 2, 0.05, opt);
    CHECK(cs.synthesis.w_star.size() == 2);
    CHECK(cs.synthesis.tau_star >= 0.0);
    CHECK(cs.certificate.nu <= 1.0);
}

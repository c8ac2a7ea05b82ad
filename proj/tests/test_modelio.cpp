#include <catch2/catch_amalgamated.hpp>

#include "scenv/generators.hpp"
#include "scenv/modelio.hpp"
#include "support/oracles.hpp"

using namespace scenv;

namespace {

bool models_equal(const ParametricModel& a, const ParametricModel& b) {
    if (a.name != b.name || a.num_states() != b.num_states() ||
        a.num_params() != b.num_params() || a.initial() != b.initial())
        return false;
    if (a.state_names() != b.state_names()) return false;
    if (a.target_flags() != b.target_flags() || a.goal_flags() != b.goal_flags()) return false;
    for (std::size_t p = 0; p < a.num_params(); ++p)
        if (a.parameters()[p].name != b.parameters()[p].name ||
            a.parameters()[p].kind != b.parameters()[p].kind)
            return false;
    for (StateId s = 0; s < a.num_states(); ++s) {
        const auto& ra = a.rows()[s];
        const auto& rb = b.rows()[s];
        if (ra.size() != rb.size()) return false;
        for (std::size_t i = 0; i < ra.size(); ++i) {
            if (ra[i].edges.size() != rb[i].edges.size()) return false;
            for (std::size_t j = 0; j < ra[i].edges.size(); ++j)
                if (ra[i].edges[j].succ != rb[i].edges[j].succ ||
                    !(ra[i].edges[j].prob == rb[i].edges[j].prob))
                    return false;
            if (ra[i].cost.has_value() != rb[i].cost.has_value()) return false;
            if (ra[i].cost && !(*ra[i].cost == *rb[i].cost)) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("the bundled fig1 document parses to the generator's model") {
    auto parsed = oracles::load_bundled("fig1.umdp");
    CHECK(parsed.model.num_states() == 8);
    CHECK(parsed.model.num_params() == 1);
    CHECK(parsed.model.is_mc());
    CHECK(parsed.model.target_states() == std::vector<StateId>{3});
    CHECK(models_equal(parsed.model, generate_fig1().model));
}

TEST_CASE("all bundled documents parse and validate") {
    for (const char* name : {"fig1.umdp", "brp_retry.umdp", "crowds_forward.umdp",
                             "nand_gate.umdp", "consensus_coin.umdp", "geometric_cost.umdp"}) {
        auto parsed = oracles::load_bundled(name);
        CHECK(parsed.model.validate().empty());
    }
}

TEST_CASE("empty input points at line 1 column 1") {
    try {
        parse_model("");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(e.col == 1);
        CHECK(e.message == "expected header");
    }
}

TEST_CASE("duplicate states are a semantic error") {
    std::string doc = "umdp 1\nname t\nkind mc\nstate a init\nstate a\na --> { a: 1 }\n";
    CHECK_THROWS_AS(parse_model(doc), SemanticError);
}

TEST_CASE("rational functions are rejected") {
    std::string doc =
        "umdp 1\nname t\nkind mc\nparam v : uniform(0,1)\nstate a init target\n"
        "a --> { a: v/2 }\n";
    CHECK_THROWS_AS(parse_model(doc), SyntaxError);
}

TEST_CASE("named actions are rejected in mc documents") {
    std::string doc =
        "umdp 1\nname t\nkind mc\nstate a init target\na --x--> { a: 1 }\n";
    CHECK_THROWS_AS(parse_model(doc), SyntaxError);
}

TEST_CASE("unknown parameters and states are flagged with positions") {
    std::string doc = "umdp 1\nname t\nkind mc\nstate a init target\na --> { a: zz }\n";
    try {
        parse_model(doc);
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 5);
    }
    CHECK_THROWS_AS(parse_model("umdp 1\nname t\nkind mc\nstate a init\nb --> { a: 1 }\n"),
                    SyntaxError);
}

TEST_CASE("costs must attach to declared transitions") {
    std::string doc =
        "umdp 1\nname t\nkind mc\nparam w1 : cost\nstate a init goal\n"
        "a --> { a: 1 }\ncost(a) = w1\ncost(a) = w1\n";
    CHECK_THROWS_AS(parse_model(doc), SemanticError);
}

TEST_CASE("fraction and decimal literals land on exact rationals") {
    std::string doc =
        "umdp 1\nname t\nkind mc\nstate a init target\nstate b\n"
        "a --> { b: 3/10, a: 0.7 }\nb --> { b: 1 }\n";
    auto pm = parse_model(doc);
    auto& edges = pm.model.rows()[0][0].edges;
    CHECK(*edges[0].prob.constant_value() == rational(3, 10));
    CHECK(*edges[1].prob.constant_value() == rational(7, 10));
}

TEST_CASE("serialization round-trips structurally") {
    for (const char* name :
         {"fig1.umdp", "crowds_forward.umdp", "consensus_coin.umdp", "geometric_cost.umdp"}) {
        auto pm = oracles::load_bundled(name);
        std::string text = serialize_model(pm);
        auto back = parse_model(text);
        CHECK(models_equal(pm.model, back.model));
        CHECK(serialize_model(back) == text);
    }
    UavConfig small;
    small.nx = 3; small.ny = 3; small.nz = 1; small.weathers = 2; small.zones = 2;
    auto uav = generate_uav(small);
    auto back = parse_model(serialize_model(uav));
    CHECK(models_equal(uav.model, back.model));
    CHECK(serialize_model(back) == serialize_model(uav));
}

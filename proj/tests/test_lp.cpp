#include <catch2/catch_amalgamated.hpp>

#include "scenv/lp.hpp"

using namespace scenv;

TEST_CASE("bound-driven minimum") {
    LpProblem p;
    int x = p.add_var(1.0, 3.0, kLpInfinity);
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[x] == Catch::Approx(3.0).margin(1e-7));
    CHECK(sol.duality_gap <= 1e-7);
}

TEST_CASE("equality row with a box") {
    // minimize x + 2y  s.t.  x + y = 1, 0 <= x,y <= 1  ->  x = 1, y = 0
    LpProblem p;
    int x = p.add_var(1.0, 0.0, 1.0);
    int y = p.add_var(2.0, 0.0, 1.0);
    int r = p.add_eq_row(1.0);
    p.add_entry(r, x, 1.0);
    p.add_entry(r, y, 1.0);
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[x] == Catch::Approx(1.0).margin(1e-7));
    CHECK(sol.x[y] == Catch::Approx(0.0).margin(1e-7));
    CHECK(sol.objective == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("free epigraph variable takes the max") {
    // minimize t  s.t.  a_i <= t  ->  t = max a_i
    LpProblem p;
    int t = p.add_var(1.0, -kLpInfinity, kLpInfinity);
    for (double a : {0.3, 0.9, -0.4, 0.7}) p.add_le_row({{t, -1.0}}, -a);
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[t] == Catch::Approx(0.9).margin(1e-7));
}

TEST_CASE("inequalities mix with equalities") {
    // minimize -x - y  s.t.  x + 2y <= 4, x - y = 1, x,y >= 0
    LpProblem p;
    int x = p.add_var(-1.0, 0.0, kLpInfinity);
    int y = p.add_var(-1.0, 0.0, kLpInfinity);
    p.add_le_row({{x, 1.0}, {y, 2.0}}, 4.0);
    int r = p.add_eq_row(1.0);
    p.add_entry(r, x, 1.0);
    p.add_entry(r, y, -1.0);
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[x] == Catch::Approx(2.0).margin(1e-6));
    CHECK(sol.x[y] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("infeasible boxes are detected") {
    LpProblem p;
    int x = p.add_var(0.0, 0.0, 1.0);
    int y = p.add_var(0.0, 0.0, 1.0);
    int r = p.add_eq_row(5.0);
    p.add_entry(r, x, 1.0);
    p.add_entry(r, y, 1.0);
    auto sol = solve_lp(p);
    CHECK(sol.status == LpStatus::Infeasible);
}

TEST_CASE("moderate random feasible programs stay consistent") {
    // diag-dominant equality system with known interior solution
    LpProblem p;
    const int n = 40;
    std::vector<int> vars;
    for (int i = 0; i < n; ++i) vars.push_back(p.add_var(1.0 + (i % 3), 0.0, 10.0));
    for (int i = 0; i < n; ++i) {
        int r = p.add_eq_row(2.0 + (i % 5) * 0.1);
        p.add_entry(r, vars[i], 3.0);
        p.add_entry(r, vars[(i + 1) % n], 0.5);
        p.add_entry(r, vars[(i + 7) % n], 0.25);
    }
    auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.duality_gap <= 1e-7);
    // residual check
    for (int i = 0; i < n; ++i) {
        double lhs = 3.0 * sol.x[vars[i]] + 0.5 * sol.x[vars[(i + 1) % n]] +
                     0.25 * sol.x[vars[(i + 7) % n]];
        CHECK(lhs == Catch::Approx(2.0 + (i % 5) * 0.1).margin(1e-6));
    }
}

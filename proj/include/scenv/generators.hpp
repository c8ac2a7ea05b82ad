#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scenv/distribution.hpp"
#include "scenv/errors.hpp"
#include "scenv/model.hpp"
#include "scenv/modelio.hpp"

namespace scenv {

// Eight-state chain with one uncontrollable parameter v ~ Uniform(0,1).
// The reachability value at s0 is a quartic whose satisfying set against
// lambda = 0.13 is exactly [0.13, 0.525] u [0.89, 1], so the satisfaction
// probability is 0.505 by construction. Endpoint behavior: value 0.14 at
// v = 0 and 0.09 at v = 1; the edges s0->s1 and s0->s4 carry 1-v and v, so
// boundary draws are not graph-preserving.
inline constexpr double kFig1Lambda = 0.13;

inline ParsedModel generate_fig1() {
    ParsedModel pm;
    ParametricModel& m = pm.model;
    m.name = "fig1";
    VarId v = m.add_parameter("v", ParamKind::Uncontrollable);
    pm.dist.add_uniform(v, 0.0, 1.0);

    std::vector<StateId> s;
    for (int i = 0; i < 8; ++i) s.push_back(m.add_state("s" + std::to_string(i)));
    m.set_initial(s[0]);
    m.mark_target(s[3]);

    Polynomial pv = Polynomial::variable(v);
    Polynomial one = Polynomial::constant(1);

    // branch = (1-v) * A(v) + v * 9/100 with A chosen so the value curve has
    // its sign changes against 0.13 at exactly 13/100, 21/40, 89/100.
    Polynomial acc = Polynomial::constant(7, 50);
    acc = acc - Polynomial::constant(2025872, 147264117) * pv;
    acc = acc - Polynomial::constant(33166300, 147264117) * (pv * pv);
    acc = acc + Polynomial::constant(105340000, 147264117) * (pv * pv * pv);

    ActionId tau = m.intern_action("_");
    m.add_row(s[0], tau, {{s[1], one - pv}, {s[4], pv}});
    m.add_row(s[1], tau, {{s[2], acc}, {s[7], one - acc}});
    m.add_row(s[2], tau, {{s[3], one}});
    m.add_row(s[4], tau, {{s[5], Polynomial::constant(3, 10)}, {s[6], Polynomial::constant(7, 10)}});
    m.add_row(s[5], tau, {{s[3], Polynomial::constant(3, 10)}, {s[6], Polynomial::constant(7, 10)}});
    m.add_row(s[3], tau, {{s[3], one}});
    m.add_row(s[6], tau, {{s[6], one}});
    m.add_row(s[7], tau, {{s[7], one}});
    return pm;
}

// UAV gridworld: position x weather x wind (x time in cost mode). The
// current wind displaces deterministically; the step randomness is the next
// weather and wind, whose distributions own the model parameters.
struct UavConfig {
    int nx = 6, ny = 6, nz = 2;
    int weathers = 2;
    int zones = 1; // contiguous bands along x
    std::vector<std::array<int, 3>> obstacles;     // empty: default wall layout
    bool default_obstacles = true;                 // set false for an empty grid
    std::vector<std::array<int, 3>> target_cells;  // empty: column at (nx-1, ny/2, *)
    std::array<int, 3> initial = {0, -1, 0};       // y = -1: centre row
    std::string preset = "uniform";                // uniform | bias-y | bias-neg-x
    int horizon = 0;                               // cost mode needs a deadline
    bool cost_mode = false;
};

namespace uav_detail {

inline constexpr std::array<std::array<int, 2>, 8> kWindDelta = {{
    {1, 0},   // E
    {1, 1},   // NE
    {0, 1},   // N
    {-1, 1},  // NW
    {-1, 0},  // W
    {-1, -1}, // SW
    {0, -1},  // S
    {1, -1},  // SE
}};

inline constexpr std::array<std::array<int, 3>, 7> kActionDelta = {{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}, {0, 0, 0},
}};

inline const char* kActionName[7] = {"xp", "xn", "yp", "yn", "zp", "zn", "hov"};

inline std::vector<double> preset_weights(const std::string& preset) {
    std::vector<double> w(8, 1.0);
    if (preset == "uniform") return w;
    if (preset == "bias-y") { w[2] = 5.0; return w; }     // N pushes +y
    if (preset == "bias-neg-x") { w[4] = 5.0; return w; } // W pushes -x
    throw ConfigError("unknown wind preset '" + preset + "'");
}

} // namespace uav_detail

inline ParsedModel generate_uav(UavConfig cfg) {
    using namespace uav_detail;
    if (cfg.nx < 1 || cfg.ny < 1 || cfg.nz < 1) throw ConfigError("grid dims must be >= 1");
    if (cfg.weathers < 1) throw ConfigError("need at least one weather condition");
    if (cfg.zones < 1 || cfg.zones > cfg.nx)
        throw ConfigError("zone count must lie in [1, nx]");
    if (cfg.cost_mode && cfg.horizon < 1)
        throw ConfigError("cost mode needs a positive time horizon");

    if (cfg.obstacles.empty() && cfg.default_obstacles && cfg.nx >= 3 && cfg.ny >= 3) {
        // Wall across x = nx/2 with one gap at y = 1.
        int wx = cfg.nx / 2;
        for (int y = 0; y < cfg.ny; ++y)
            for (int z = 0; z < cfg.nz; ++z)
                if (y != 1) cfg.obstacles.push_back({wx, y, z});
    }
    if (cfg.target_cells.empty()) {
        for (int z = 0; z < cfg.nz; ++z) cfg.target_cells.push_back({cfg.nx - 1, cfg.ny / 2, z});
    }
    if (cfg.initial[1] < 0) cfg.initial[1] = cfg.ny / 2;

    auto in_grid = [&](int x, int y, int z) {
        return x >= 0 && x < cfg.nx && y >= 0 && y < cfg.ny && z >= 0 && z < cfg.nz;
    };
    std::vector<char> obstacle(static_cast<std::size_t>(cfg.nx) * cfg.ny * cfg.nz, 0);
    auto cell_index = [&](int x, int y, int z) {
        return (static_cast<std::size_t>(z) * cfg.ny + y) * cfg.nx + x;
    };
    for (auto& o : cfg.obstacles) {
        if (!in_grid(o[0], o[1], o[2])) throw ConfigError("obstacle outside the grid");
        obstacle[cell_index(o[0], o[1], o[2])] = 1;
    }
    std::vector<char> target(obstacle.size(), 0);
    for (auto& t : cfg.target_cells) {
        if (!in_grid(t[0], t[1], t[2])) throw ConfigError("target outside the grid");
        if (obstacle[cell_index(t[0], t[1], t[2])]) throw ConfigError("target cell is an obstacle");
        target[cell_index(t[0], t[1], t[2])] = 1;
    }
    if (obstacle[cell_index(cfg.initial[0], cfg.initial[1], cfg.initial[2])])
        throw ConfigError("initial cell is an obstacle");
    if (!in_grid(cfg.initial[0], cfg.initial[1], cfg.initial[2]))
        throw ConfigError("initial cell outside the grid");

    auto zone_of = [&](int x) { return std::min(cfg.zones - 1, x * cfg.zones / cfg.nx); };

    ParsedModel pm;
    ParametricModel& m = pm.model;
    m.name = cfg.cost_mode ? "uav_cost" : "uav";

    const int W = cfg.weathers;

    // Wind-direction parameters: 7 free per (zone, weather); the 8th
    // probability is 1 - sum. Weather transitions: W-1 free per weather.
    std::vector<std::vector<std::array<Polynomial, 8>>> wind_poly(
        cfg.zones, std::vector<std::array<Polynomial, 8>>(W));
    for (int z = 0; z < cfg.zones; ++z)
        for (int w = 0; w < W; ++w) {
            Polynomial rest = Polynomial::constant(1);
            std::vector<VarId> vars;
            for (int d = 0; d < 7; ++d) {
                VarId pv = m.add_parameter(
                    "wind_z" + std::to_string(z) + "_w" + std::to_string(w) + "_d" +
                        std::to_string(d),
                    ParamKind::Uncontrollable);
                vars.push_back(pv);
                wind_poly[z][w][d] = Polynomial::variable(pv);
                rest = rest - wind_poly[z][w][d];
            }
            wind_poly[z][w][7] = rest;
            pm.dist.add_dirichlet(vars, preset_weights(cfg.preset));
        }

    std::vector<std::vector<Polynomial>> weather_poly(W, std::vector<Polynomial>(W));
    if (W == 1) {
        weather_poly[0][0] = Polynomial::constant(1);
    } else {
        for (int w = 0; w < W; ++w) {
            Polynomial rest = Polynomial::constant(1);
            std::vector<VarId> vars;
            for (int w2 = 0; w2 < W - 1; ++w2) {
                VarId pv = m.add_parameter(
                    "wtrans_w" + std::to_string(w) + "_" + std::to_string(w2),
                    ParamKind::Uncontrollable);
                vars.push_back(pv);
                weather_poly[w][w2] = Polynomial::variable(pv);
                rest = rest - weather_poly[w][w2];
            }
            weather_poly[w][W - 1] = rest;
            pm.dist.add_dirichlet(vars, std::vector<double>(W, 1.0));
        }
    }

    VarId wx = 0, wy = 0;
    if (cfg.cost_mode) {
        wx = m.add_parameter("wx", ParamKind::ControllableCost);
        wy = m.add_parameter("wy", ParamKind::ControllableCost);
    }

    const int T = cfg.cost_mode ? cfg.horizon : 1;

    // State layout: (cell, weather, wind [, t]) for free cells, plus sinks.
    auto state_name = [&](int x, int y, int z, int w, int d, int t) {
        std::string s = "p" + std::to_string(x) + "_" + std::to_string(y) + "_" +
                        std::to_string(z) + "_w" + std::to_string(w) + "_d" + std::to_string(d);
        if (cfg.cost_mode) s += "_t" + std::to_string(t);
        return s;
    };

    std::vector<std::int32_t> sid(obstacle.size() * W * 8 * T, -1);
    auto sidx = [&](std::size_t cell, int w, int d, int t) {
        return ((cell * W + w) * 8 + d) * T + t;
    };

    for (int t = 0; t < T; ++t)
        for (int z = 0; z < cfg.nz; ++z)
            for (int y = 0; y < cfg.ny; ++y)
                for (int x = 0; x < cfg.nx; ++x) {
                    std::size_t cell = cell_index(x, y, z);
                    if (obstacle[cell]) continue;
                    if (target[cell] && t > 0) continue; // targets are timeless
                    for (int w = 0; w < W; ++w)
                        for (int d = 0; d < 8; ++d)
                            sid[sidx(cell, w, d, t)] =
                                m.add_state(state_name(x, y, z, w, d, t));
                }

    StateId crashed = 0, expired = 0;
    if (!cfg.cost_mode) crashed = m.add_state("crashed");
    if (cfg.cost_mode) expired = m.add_state("expired");

    // Labels.
    for (int w = 0; w < W; ++w)
        for (int d = 0; d < 8; ++d)
            for (std::size_t cell = 0; cell < obstacle.size(); ++cell) {
                if (!target[cell]) continue;
                std::int32_t id = sid[sidx(cell, w, d, 0)];
                if (id >= 0) {
                    m.mark_target(static_cast<StateId>(id));
                    if (cfg.cost_mode) m.mark_goal(static_cast<StateId>(id));
                }
            }
    if (cfg.cost_mode) m.mark_goal(expired);
    m.set_initial(static_cast<StateId>(
        sid[sidx(cell_index(cfg.initial[0], cfg.initial[1], cfg.initial[2]), 0, 0, 0)]));

    Polynomial one = Polynomial::constant(1);
    std::vector<ActionId> act;
    for (int a = 0; a < 7; ++a) act.push_back(m.intern_action(kActionName[a]));
    ActionId stay = m.intern_action("stay");

    for (int t = 0; t < T; ++t)
        for (int z = 0; z < cfg.nz; ++z)
            for (int y = 0; y < cfg.ny; ++y)
                for (int x = 0; x < cfg.nx; ++x) {
                    std::size_t cell = cell_index(x, y, z);
                    if (obstacle[cell]) continue;
                    if (target[cell] && t > 0) continue;
                    for (int w = 0; w < W; ++w)
                        for (int d = 0; d < 8; ++d) {
                            StateId from = static_cast<StateId>(sid[sidx(cell, w, d, t)]);
                            if (target[cell]) {
                                m.add_row(from, stay, {{from, one}},
                                          cfg.cost_mode
                                              ? std::optional<Polynomial>(Polynomial())
                                              : std::nullopt);
                                continue;
                            }
                            for (int a = 0; a < 7; ++a) {
                                int px = std::clamp(x + kActionDelta[a][0] + kWindDelta[d][0], 0,
                                                    cfg.nx - 1);
                                int py = std::clamp(y + kActionDelta[a][1] + kWindDelta[d][1], 0,
                                                    cfg.ny - 1);
                                int pz = std::clamp(z + kActionDelta[a][2], 0, cfg.nz - 1);
                                std::size_t dest = cell_index(px, py, pz);
                                bool hit = obstacle[dest] != 0;
                                bool landed = !hit && target[dest];

                                std::vector<ParametricEdge> edges;
                                Polynomial cost;
                                if (cfg.cost_mode) {
                                    if (a == 0 || a == 1) cost = Polynomial::variable(wx);
                                    else if (a == 2 || a == 3) cost = Polynomial::variable(wy);
                                    else cost = Polynomial::constant(1, 10);
                                    if (hit) cost = cost + Polynomial::constant(100);
                                }

                                if (!cfg.cost_mode && hit) {
                                    edges.push_back({crashed, one});
                                    m.add_row(from, act[a], std::move(edges), std::nullopt);
                                    continue;
                                }
                                std::size_t next_cell =
                                    hit ? cell_index(cfg.initial[0], cfg.initial[1],
                                                     cfg.initial[2])
                                        : dest;
                                bool expires = cfg.cost_mode && !landed && t + 1 >= T;
                                if (expires) {
                                    edges.push_back({expired, one});
                                    cost = cost + Polynomial::constant(100);
                                    m.add_row(from, act[a], std::move(edges), std::move(cost));
                                    continue;
                                }
                                int nt = landed ? 0 : (cfg.cost_mode ? t + 1 : 0);
                                for (int w2 = 0; w2 < W; ++w2)
                                    for (int d2 = 0; d2 < 8; ++d2) {
                                        Polynomial p =
                                            weather_poly[w][w2] *
                                            wind_poly[zone_of(landed ? px : static_cast<int>(
                                                                  next_cell % cfg.nx))][w2][d2];
                                        StateId to = static_cast<StateId>(
                                            sid[sidx(next_cell, w2, d2, landed ? 0 : nt)]);
                                        edges.push_back({to, std::move(p)});
                                    }
                                m.add_row(from, act[a], std::move(edges),
                                          cfg.cost_mode ? std::optional<Polynomial>(std::move(cost))
                                                        : std::nullopt);
                            }
                        }
                    }

    if (!cfg.cost_mode) m.add_row(crashed, stay, {{crashed, one}});
    if (cfg.cost_mode) m.add_row(expired, stay, {{expired, one}}, Polynomial());
    return pm;
}

} // namespace scenv

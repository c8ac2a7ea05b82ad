#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "scenv/errors.hpp"
#include "scenv/graph.hpp"
#include "scenv/model.hpp"

namespace scenv {

inline constexpr double kViEpsilon = 1e-8;

// Instantiation-independent graph facts for a reachability target. Computed
// once per parametric model and shared by every sample.
struct ReachAnalysis {
    std::vector<char> target;
    std::vector<char> cannot_reach; // no digraph path to T; value 0 under any policy
    std::vector<char> prob0_min;    // some policy avoids T: min-policy value 0
    MecDecomposition mec;           // over S \ (T u cannot_reach), for the max objective
};

inline ReachAnalysis analyze_reach(const AdjacencyList& adj, const std::vector<char>& target) {
    ReachAnalysis ra;
    ra.target = target;
    std::size_t n = adj.num_states();
    bool any = false;
    for (char t : target) any = any || t;
    if (!any) throw DomainError("target set must not be empty");

    std::vector<char> can = backward_reachable(adj, target);
    ra.cannot_reach.assign(n, 0);
    for (StateId s = 0; s < n; ++s) ra.cannot_reach[s] = !can[s];

    ra.prob0_min = closed_avoid_set(adj, target);
    for (StateId s = 0; s < n; ++s)
        ra.prob0_min[s] = ra.prob0_min[s] || ra.cannot_reach[s];

    std::vector<char> maybe(n, 0);
    for (StateId s = 0; s < n; ++s) maybe[s] = !target[s] && !ra.cannot_reach[s];
    ra.mec = mec_decomposition(adj, maybe);
    return ra;
}

// Goal-set facts for expected-cost specifications.
struct CostAnalysis {
    std::vector<char> goal;
    std::vector<char> almost_sure; // Pr(eventually G) = 1 under every policy
    std::optional<StateId> offending;
};

inline CostAnalysis analyze_cost(const AdjacencyList& adj, const std::vector<char>& goal) {
    CostAnalysis ca;
    ca.goal = goal;
    bool any = false;
    for (char g : goal) any = any || g;
    if (!any) throw DomainError("goal set must not be empty");
    ca.almost_sure = almost_sure_under_all_policies(adj, goal);
    for (StateId s = 0; s < adj.num_states(); ++s)
        if (!ca.almost_sure[s]) { ca.offending = s; break; }
    return ca;
}

struct ValueResult {
    std::vector<double> value;           // per original state
    std::vector<std::int32_t> policy;    // chosen row index per state
    double gap = 0.0;                    // certified bound width at convergence
    std::size_t iterations = 0;
};

namespace vi_detail {

// Flat node-major action table; nz spans live in one arena so building a
// problem is two large allocations rather than one per action.
struct Problem {
    struct Act {
        double c0 = 0.0; // constant part: one-step target mass, or immediate cost
        std::uint32_t nz_begin = 0, nz_end = 0;
        StateId src = 0;
        std::int32_t row = -1;
    };
    std::vector<std::pair<std::uint32_t, double>> nz;
    std::vector<Act> acts;
    std::vector<std::uint32_t> node_begin; // size n+1
    bool maximize = false;
    double upper_init = 1.0;
    bool relative_stop = false;

    std::size_t num_nodes() const { return node_begin.empty() ? 0 : node_begin.size() - 1; }
};

// Gauss-Seidel interval iteration. Both bound vectors stay valid bounds of
// the unique fixed point at every sweep, so gap < eps certifies the result.
struct IterOut {
    std::vector<double> lower, upper;
    std::vector<std::uint32_t> choice; // chosen act index per node
    double gap = 0.0;
    std::size_t sweeps = 0;
};

inline IterOut interval_iterate(const Problem& pb, double eps) {
    std::size_t n = pb.num_nodes();
    IterOut out;
    out.lower.assign(n, 0.0);
    out.upper.assign(n, pb.upper_init);
    out.choice.assign(n, 0);
    const std::size_t max_sweeps = 40'000'000 / std::max<std::size_t>(n, 1) + 10'000;
    double gap = std::numeric_limits<double>::infinity();
    std::size_t sweep = 0;
    for (; sweep < max_sweeps && !(gap <= eps); ++sweep) {
        gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best_l = 0.0, best_u = 0.0;
            std::uint32_t best_act = pb.node_begin[i];
            bool first = true;
            for (std::uint32_t a = pb.node_begin[i]; a < pb.node_begin[i + 1]; ++a) {
                const auto& act = pb.acts[a];
                double vl = act.c0, vu = act.c0;
                for (std::uint32_t k = act.nz_begin; k < act.nz_end; ++k) {
                    vl += pb.nz[k].second * out.lower[pb.nz[k].first];
                    vu += pb.nz[k].second * out.upper[pb.nz[k].first];
                }
                if (first || (pb.maximize ? vl > best_l : vl < best_l)) {
                    best_l = vl;
                    best_act = a;
                }
                if (first || (pb.maximize ? vu > best_u : vu < best_u)) best_u = vu;
                first = false;
            }
            out.lower[i] = best_l;
            out.upper[i] = std::max(best_u, best_l); // bounds may not cross
            out.choice[i] = best_act;
            double g = out.upper[i] - out.lower[i];
            if (pb.relative_stop) g /= std::max(1.0, std::abs(out.lower[i]));
            gap = std::max(gap, g);
        }
    }
    if (!(gap <= eps))
        throw NumericError("value iteration did not converge (gap " + std::to_string(gap) + ")");
    out.gap = gap;
    out.sweeps = sweep;
    return out;
}

// Routes every member of a MEC toward the exit state via internal actions;
// distances shrink with positive probability each step, so the exit is hit
// almost surely.
inline void route_inside_mec(const ConcreteModel& c, const std::vector<StateId>& members,
                             StateId exit_state, std::vector<std::int32_t>& policy) {
    std::vector<char> in_mec(c.num_states, 0);
    for (StateId s : members) in_mec[s] = 1;
    std::vector<std::uint32_t> dist(c.num_states, std::numeric_limits<std::uint32_t>::max());
    dist[exit_state] = 0;
    std::queue<StateId> q;
    q.push(exit_state);
    // Backward BFS over internal action edges.
    while (!q.empty()) {
        StateId t = q.front();
        q.pop();
        for (StateId s : members) {
            if (dist[s] != std::numeric_limits<std::uint32_t>::max()) continue;
            for (std::size_t r = 0; r < c.rows[s].size(); ++r) {
                bool internal = true, hits = false;
                for (const auto& e : c.rows[s][r].edges) {
                    if (!in_mec[e.succ]) { internal = false; break; }
                    if (e.succ == t) hits = true;
                }
                if (internal && hits) {
                    dist[s] = dist[t] + 1;
                    policy[s] = static_cast<std::int32_t>(r);
                    q.push(s);
                    break;
                }
            }
        }
    }
}

} // namespace vi_detail

// Reachability probabilities and an optimal memoryless deterministic policy,
// by interval value iteration with the preprocessing boundaries of the
// analysis. For the max objective the iteration runs on the MEC quotient so
// the upper bound converges.
inline ValueResult reach_values(const ConcreteModel& c, const ReachAnalysis& ra,
                                PolicyObjective obj, double eps = kViEpsilon) {
    std::size_t n = c.num_states;
    ValueResult res;
    res.value.assign(n, 0.0);
    res.policy.assign(n, 0);

    const std::vector<char>& zero = (obj == PolicyObjective::Min) ? ra.prob0_min : ra.cannot_reach;

    // Map unknown states to solver nodes; for max, MEC members share a node.
    std::vector<std::int32_t> node_of(n, -1);
    std::int32_t next_node = 0;
    std::vector<std::int32_t> mec_node(ra.mec.count, -1);
    for (StateId s = 0; s < n; ++s) {
        if (ra.target[s] || zero[s]) continue;
        if (obj == PolicyObjective::Max && ra.mec.mec_id[s] >= 0) {
            std::int32_t m = ra.mec.mec_id[s];
            if (mec_node[m] < 0) mec_node[m] = next_node++;
            node_of[s] = mec_node[m];
        } else {
            node_of[s] = next_node++;
        }
    }

    std::vector<std::vector<StateId>> node_states(next_node);
    for (StateId s = 0; s < n; ++s)
        if (node_of[s] >= 0) node_states[node_of[s]].push_back(s);

    vi_detail::Problem pb;
    pb.maximize = (obj == PolicyObjective::Max);
    pb.node_begin.reserve(next_node + 1);
    pb.node_begin.push_back(0);
    for (std::int32_t ni = 0; ni < next_node; ++ni) {
        bool is_mec_node = node_states[ni].size() > 1 ||
                           (obj == PolicyObjective::Max &&
                            ra.mec.mec_id[node_states[ni][0]] >= 0);
        for (StateId s : node_states[ni]) {
            for (std::size_t r = 0; r < c.rows[s].size(); ++r) {
                const auto& row = c.rows[s][r];
                // Inside a MEC quotient node only leaving actions matter.
                if (is_mec_node) {
                    bool internal = true;
                    for (const auto& e : row.edges)
                        if (node_of[e.succ] != ni) { internal = false; break; }
                    if (internal) continue;
                }
                vi_detail::Problem::Act act;
                act.src = s;
                act.row = static_cast<std::int32_t>(r);
                act.nz_begin = static_cast<std::uint32_t>(pb.nz.size());
                for (const auto& e : row.edges) {
                    if (ra.target[e.succ]) act.c0 += e.prob;
                    else if (zero[e.succ]) continue;
                    else
                        pb.nz.push_back({static_cast<std::uint32_t>(node_of[e.succ]), e.prob});
                }
                act.nz_end = static_cast<std::uint32_t>(pb.nz.size());
                pb.acts.push_back(act);
            }
        }
        pb.node_begin.push_back(static_cast<std::uint32_t>(pb.acts.size()));
        if (pb.node_begin[ni + 1] == pb.node_begin[ni])
            throw NumericError("internal: solver node without actions");
    }

    auto it = vi_detail::interval_iterate(pb, eps);
    res.gap = it.gap;
    res.iterations = it.sweeps;

    for (StateId s = 0; s < n; ++s) {
        if (ra.target[s]) res.value[s] = 1.0;
        else if (zero[s]) res.value[s] = 0.0;
        else res.value[s] = 0.5 * (it.lower[node_of[s]] + it.upper[node_of[s]]);
    }
    // Policy: boundary states keep row 0; solver nodes take the chosen row,
    // and MEC members are routed to the exit state of the chosen action.
    for (std::int32_t ni = 0; ni < next_node; ++ni) {
        const auto& act = pb.acts[it.choice[ni]];
        res.policy[act.src] = act.row;
        if (node_states[ni].size() > 1)
            vi_detail::route_inside_mec(c, node_states[ni], act.src, res.policy);
        else
            res.policy[node_states[ni][0]] = act.row;
    }
    // Min objective: states with value zero by an avoiding policy must follow
    // one, otherwise the reported policy would not attain the reported value.
    if (obj == PolicyObjective::Min) {
        for (StateId s = 0; s < n; ++s) {
            if (!ra.prob0_min[s] || ra.target[s]) continue;
            for (std::size_t r = 0; r < c.rows[s].size(); ++r) {
                bool safe = true;
                for (const auto& e : c.rows[s][r].edges)
                    if (!ra.prob0_min[e.succ]) { safe = false; break; }
                if (safe) { res.policy[s] = static_cast<std::int32_t>(r); break; }
            }
        }
    }
    return res;
}

namespace vi_detail {

// Sparse linear solve of the reachability system restricted to unknowns:
// (I - P_UU) x = P_UT * 1. `zero` states contribute nothing.
inline std::vector<double> chain_reach_solve(const ConcreteModel& c,
                                             const std::vector<std::int32_t>& policy,
                                             const std::vector<char>& target,
                                             const std::vector<char>& zero) {
    std::size_t n = c.num_states;
    std::vector<std::int32_t> idx(n, -1);
    std::vector<StateId> unknowns;
    for (StateId s = 0; s < n; ++s)
        if (!target[s] && !zero[s]) {
            idx[s] = static_cast<std::int32_t>(unknowns.size());
            unknowns.push_back(s);
        }
    std::size_t m = unknowns.size();
    std::vector<double> x(n, 0.0);
    for (StateId s = 0; s < n; ++s) x[s] = target[s] ? 1.0 : 0.0;
    if (m == 0) return x;

    Eigen::SparseMatrix<double> A(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < m; ++i) {
        StateId s = unknowns[i];
        trip.emplace_back(i, i, 1.0);
        const auto& row = c.rows[s][policy[s]];
        for (const auto& e : row.edges) {
            if (target[e.succ]) b[i] += e.prob;
            else if (idx[e.succ] >= 0) trip.emplace_back(i, idx[e.succ], -e.prob);
        }
    }
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NumericError("singular reachability system");
    Eigen::VectorXd sol = lu.solve(b);
    for (std::size_t i = 0; i < m; ++i) x[unknowns[i]] = std::clamp(sol[i], 0.0, 1.0);
    return x;
}

inline std::vector<char> policy_zero_set(const ConcreteModel& c,
                                         const std::vector<std::int32_t>& policy,
                                         const std::vector<char>& target) {
    // States that cannot reach T in the digraph induced by the policy.
    std::size_t n = c.num_states;
    std::vector<std::vector<StateId>> preds(n);
    for (StateId s = 0; s < n; ++s)
        for (const auto& e : c.rows[s][policy[s]].edges) preds[e.succ].push_back(s);
    std::vector<char> reach(n, 0);
    std::vector<StateId> stack;
    for (StateId s = 0; s < n; ++s)
        if (target[s]) { reach[s] = 1; stack.push_back(s); }
    while (!stack.empty()) {
        StateId t = stack.back();
        stack.pop_back();
        for (StateId p : preds[t])
            if (!reach[p]) { reach[p] = 1; stack.push_back(p); }
    }
    std::vector<char> zero(n, 0);
    for (StateId s = 0; s < n; ++s) zero[s] = !reach[s];
    return zero;
}

} // namespace vi_detail

// Exact reachability by policy iteration with sparse linear policy
// evaluation. Used to refine verdicts that fall within the value-iteration
// tolerance of the specification threshold, and as a test oracle.
inline ValueResult reach_values_exact(const ConcreteModel& c, const ReachAnalysis& ra,
                                      PolicyObjective obj) {
    ValueResult seed = reach_values(c, ra, obj, 1e-6);
    std::vector<std::int32_t> policy = seed.policy;
    std::size_t n = c.num_states;
    std::vector<double> x;
    for (int round = 0; round < 1000; ++round) {
        auto zero = vi_detail::policy_zero_set(c, policy, ra.target);
        x = vi_detail::chain_reach_solve(c, policy, ra.target, zero);
        bool improved = false;
        for (StateId s = 0; s < n; ++s) {
            if (ra.target[s]) continue;
            if (obj == PolicyObjective::Min ? ra.prob0_min[s] : ra.cannot_reach[s]) continue;
            double best = std::numeric_limits<double>::quiet_NaN();
            std::int32_t best_row = policy[s];
            for (std::size_t r = 0; r < c.rows[s].size(); ++r) {
                double v = 0.0;
                for (const auto& e : c.rows[s][r].edges) v += e.prob * x[e.succ];
                if (std::isnan(best) || (obj == PolicyObjective::Max ? v > best + 1e-13
                                                                     : v < best - 1e-13)) {
                    best = v;
                    best_row = static_cast<std::int32_t>(r);
                }
            }
            if (best_row != policy[s]) {
                double cur = 0.0;
                for (const auto& e : c.rows[s][policy[s]].edges) cur += e.prob * x[e.succ];
                if (obj == PolicyObjective::Max ? best > cur + 1e-13 : best < cur - 1e-13) {
                    policy[s] = best_row;
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    ValueResult res;
    res.value = std::move(x);
    if (obj == PolicyObjective::Min)
        for (StateId s = 0; s < n; ++s)
            if (ra.prob0_min[s] && !ra.target[s]) res.value[s] = 0.0;
    res.policy = std::move(policy);
    res.gap = 0.0;
    return res;
}

// Expected total cost until the goal set, by interval value iteration with a
// certified upper seed. Requires almost-sure goal reachability under every
// policy; costs must be concrete (controllable parameters already valued).
inline ValueResult cost_values(const ConcreteModel& c, const CostAnalysis& ca,
                               PolicyObjective obj, std::span<const double> w = {},
                               double eps = kViEpsilon) {
    std::size_t n = c.num_states;
    if (ca.offending)
        throw ExpectedCostIllDefinedError("#" + std::to_string(*ca.offending));

    auto cost_of = [&](StateId s, std::size_t r) {
        const AffineCost& ac = c.rows[s][r].cost;
        if (!ac.is_constant() && w.empty())
            throw DomainError("cost parameters are unset; provide a w valuation");
        return ac.at(w);
    };

    double c_max = 0.0;
    for (StateId s = 0; s < n; ++s)
        for (std::size_t r = 0; r < c.rows[s].size(); ++r)
            if (!ca.goal[s]) c_max = std::max(c_max, cost_of(s, r));

    // Upper seed: every policy reaches G within t steps with probability at
    // least q from everywhere, so E[steps] <= t/q and cost <= c_max * t / q.
    // Jacobi sweeps keep y the exact t-step minimum over policies.
    std::vector<double> y(n, 0.0), y_next(n, 0.0);
    for (StateId s = 0; s < n; ++s) y[s] = y_next[s] = ca.goal[s] ? 1.0 : 0.0;
    double q = 0.0;
    std::size_t t = 0;
    const std::size_t t_cap = 10 * n + 10'000;
    while (q < 0.5) {
        if (++t > t_cap) throw NumericError("cost upper-bound seed did not stabilize");
        double min_y = 1.0;
        for (StateId s = 0; s < n; ++s) {
            if (ca.goal[s]) continue;
            double best = 1.0;
            for (const auto& row : c.rows[s]) {
                double v = 0.0;
                for (const auto& e : row.edges) v += e.prob * y[e.succ];
                best = std::min(best, v);
            }
            y_next[s] = best;
            min_y = std::min(min_y, best);
        }
        y.swap(y_next);
        q = min_y;
    }
    double upper_seed = c_max * static_cast<double>(t) / q + 1.0;

    std::vector<std::int32_t> node_of(n, -1);
    std::vector<StateId> unknowns;
    for (StateId s = 0; s < n; ++s)
        if (!ca.goal[s]) {
            node_of[s] = static_cast<std::int32_t>(unknowns.size());
            unknowns.push_back(s);
        }

    vi_detail::Problem pb;
    pb.maximize = (obj == PolicyObjective::Max);
    pb.relative_stop = true;
    pb.upper_init = upper_seed;
    pb.node_begin.push_back(0);
    for (std::size_t i = 0; i < unknowns.size(); ++i) {
        StateId s = unknowns[i];
        for (std::size_t r = 0; r < c.rows[s].size(); ++r) {
            vi_detail::Problem::Act act;
            act.src = s;
            act.row = static_cast<std::int32_t>(r);
            act.c0 = cost_of(s, r);
            act.nz_begin = static_cast<std::uint32_t>(pb.nz.size());
            for (const auto& e : c.rows[s][r].edges)
                if (node_of[e.succ] >= 0)
                    pb.nz.push_back({static_cast<std::uint32_t>(node_of[e.succ]), e.prob});
            act.nz_end = static_cast<std::uint32_t>(pb.nz.size());
            pb.acts.push_back(act);
        }
        pb.node_begin.push_back(static_cast<std::uint32_t>(pb.acts.size()));
    }

    auto it = vi_detail::interval_iterate(pb, eps);
    ValueResult res;
    res.value.assign(n, 0.0);
    res.policy.assign(n, 0);
    res.gap = it.gap;
    res.iterations = it.sweeps;
    for (std::size_t i = 0; i < unknowns.size(); ++i) {
        res.value[unknowns[i]] = 0.5 * (it.lower[i] + it.upper[i]);
        res.policy[unknowns[i]] = pb.acts[it.choice[i]].row;
    }
    return res;
}

// Exact expected costs for a fixed policy; almost-sure reachability makes the
// restricted system nonsingular for every policy.
inline ValueResult cost_values_exact(const ConcreteModel& c, const CostAnalysis& ca,
                                     PolicyObjective obj, std::span<const double> w = {}) {
    if (ca.offending)
        throw ExpectedCostIllDefinedError("#" + std::to_string(*ca.offending));
    std::size_t n = c.num_states;
    ValueResult seed = cost_values(c, ca, obj, w, 1e-6);
    std::vector<std::int32_t> policy = seed.policy;

    std::vector<std::int32_t> idx(n, -1);
    std::vector<StateId> unknowns;
    for (StateId s = 0; s < n; ++s)
        if (!ca.goal[s]) {
            idx[s] = static_cast<std::int32_t>(unknowns.size());
            unknowns.push_back(s);
        }
    std::size_t m = unknowns.size();

    auto evaluate = [&](const std::vector<std::int32_t>& pol) {
        Eigen::SparseMatrix<double> A(m, m);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < m; ++i) {
            StateId s = unknowns[i];
            trip.emplace_back(i, i, 1.0);
            const auto& row = c.rows[s][pol[s]];
            b[i] = row.cost.at(w);
            for (const auto& e : row.edges)
                if (idx[e.succ] >= 0) trip.emplace_back(i, idx[e.succ], -e.prob);
        }
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw NumericError("singular expected-cost system");
        Eigen::VectorXd sol = lu.solve(b);
        std::vector<double> x(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) x[unknowns[i]] = sol[i];
        return x;
    };

    std::vector<double> x;
    for (int round = 0; round < 1000; ++round) {
        x = evaluate(policy);
        bool improved = false;
        for (std::size_t i = 0; i < m; ++i) {
            StateId s = unknowns[i];
            double cur = 0.0;
            {
                const auto& row = c.rows[s][policy[s]];
                cur = row.cost.at(w);
                for (const auto& e : row.edges) cur += e.prob * x[e.succ];
            }
            double best = cur;
            std::int32_t best_row = policy[s];
            for (std::size_t r = 0; r < c.rows[s].size(); ++r) {
                const auto& row = c.rows[s][r];
                double v = row.cost.at(w);
                for (const auto& e : row.edges) v += e.prob * x[e.succ];
                if (obj == PolicyObjective::Max ? v > best + 1e-11 : v < best - 1e-11) {
                    best = v;
                    best_row = static_cast<std::int32_t>(r);
                }
            }
            if (best_row != policy[s]) {
                policy[s] = best_row;
                improved = true;
            }
        }
        if (!improved) break;
    }
    ValueResult res;
    res.value = std::move(x);
    res.policy = std::move(policy);
    res.gap = 0.0;
    return res;
}

} // namespace scenv

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "scenv/model.hpp"

namespace scenv {

// Action-resolved successor structure shared by the parametric and the
// concrete model; an edge exists iff its probability is syntactically
// nonzero (graph preservation makes the two views coincide on samples).
struct AdjacencyList {
    // succ[state][row] = sorted unique successor list of that action row
    std::vector<std::vector<std::vector<StateId>>> succ;

    std::size_t num_states() const { return succ.size(); }
};

inline AdjacencyList adjacency_of(const ParametricModel& m) {
    AdjacencyList adj;
    adj.succ.resize(m.num_states());
    for (StateId s = 0; s < m.num_states(); ++s)
        for (const auto& row : m.rows()[s]) {
            std::vector<StateId> out;
            for (const auto& e : row.edges)
                if (!e.prob.is_zero()) out.push_back(e.succ);
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            adj.succ[s].push_back(std::move(out));
        }
    return adj;
}

inline AdjacencyList adjacency_of(const ConcreteModel& m) {
    AdjacencyList adj;
    adj.succ.resize(m.num_states);
    for (StateId s = 0; s < m.num_states; ++s)
        for (const auto& row : m.rows[s]) {
            std::vector<StateId> out;
            for (const auto& e : row.edges)
                if (e.prob > 0.0) out.push_back(e.succ);
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            adj.succ[s].push_back(std::move(out));
        }
    return adj;
}

// States with a digraph path to a target (targets included), never expanding
// through blocked states.
inline std::vector<char> backward_reachable(const AdjacencyList& adj,
                                            const std::vector<char>& targets,
                                            const std::vector<char>* blocked = nullptr) {
    std::size_t n = adj.num_states();
    std::vector<std::vector<StateId>> preds(n);
    for (StateId s = 0; s < n; ++s)
        for (const auto& row : adj.succ[s])
            for (StateId t : row) preds[t].push_back(s);
    std::vector<char> reach(n, 0);
    std::vector<StateId> stack;
    for (StateId s = 0; s < n; ++s)
        if (targets[s]) { reach[s] = 1; stack.push_back(s); }
    while (!stack.empty()) {
        StateId t = stack.back();
        stack.pop_back();
        for (StateId p : preds[t]) {
            if (reach[p]) continue;
            if (blocked && (*blocked)[p] && !targets[p]) continue;
            reach[p] = 1;
            stack.push_back(p);
        }
    }
    return reach;
}

// Largest U within S \ avoid such that every state of U has an action whose
// successors all stay in U. From any state of U some policy avoids `avoid`
// forever with probability one.
inline std::vector<char> closed_avoid_set(const AdjacencyList& adj,
                                          const std::vector<char>& avoid) {
    std::size_t n = adj.num_states();
    std::vector<char> in(n, 1);
    for (StateId s = 0; s < n; ++s) in[s] = avoid[s] ? 0 : 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (StateId s = 0; s < n; ++s) {
            if (!in[s]) continue;
            bool has_safe_action = false;
            for (const auto& row : adj.succ[s]) {
                bool safe = true;
                for (StateId t : row)
                    if (!in[t]) { safe = false; break; }
                if (safe && !row.empty()) { has_safe_action = true; break; }
            }
            if (!has_safe_action) {
                in[s] = 0;
                changed = true;
            }
        }
    }
    return in;
}

// Pr_min(eventually G) = 1 holds exactly at states with no G-avoiding path
// into the closed avoid set.
inline std::vector<char> almost_sure_under_all_policies(const AdjacencyList& adj,
                                                        const std::vector<char>& goal) {
    std::vector<char> avoid = closed_avoid_set(adj, goal);
    std::vector<char> bad = backward_reachable(adj, avoid, &goal);
    std::vector<char> ok(adj.num_states(), 0);
    for (StateId s = 0; s < adj.num_states(); ++s) ok[s] = goal[s] || !bad[s];
    return ok;
}

namespace detail {

// Iterative Tarjan over an explicit edge list restricted to a node subset.
inline std::vector<std::int32_t> scc_of_subgraph(std::size_t n,
                                                 const std::vector<std::vector<StateId>>& edges,
                                                 const std::vector<char>& in_subset,
                                                 std::int32_t& scc_count) {
    std::vector<std::int32_t> comp(n, -1);
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<StateId> stack;
    std::int32_t next_index = 0;
    scc_count = 0;

    struct Frame { StateId v; std::size_t edge; };
    std::vector<Frame> call;

    for (StateId root = 0; root < n; ++root) {
        if (!in_subset[root] || index[root] != -1) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& fr = call.back();
            StateId v = fr.v;
            if (fr.edge == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (fr.edge < edges[v].size()) {
                StateId w = edges[v][fr.edge++];
                if (!in_subset[w]) continue;
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                for (;;) {
                    StateId w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = scc_count;
                    if (w == v) break;
                }
                ++scc_count;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    return comp;
}

} // namespace detail

// Maximal end components of the sub-MDP restricted to `subset`. Returns a
// component id per state (-1 for states outside every MEC) and the number of
// components. An action belongs to a component iff all its successors stay
// inside. Standard refinement: drop states without internal actions, split
// along SCCs of the internal-action digraph, repeat until stable.
struct MecDecomposition {
    std::vector<std::int32_t> mec_id;
    std::int32_t count = 0;
};

inline MecDecomposition mec_decomposition(const AdjacencyList& adj,
                                          const std::vector<char>& subset) {
    std::size_t n = adj.num_states();
    MecDecomposition out;
    out.mec_id.assign(n, -1);

    std::vector<std::vector<char>> work;
    work.push_back(subset);

    while (!work.empty()) {
        std::vector<char> cand = std::move(work.back());
        work.pop_back();

        std::vector<std::vector<StateId>> edges(n);
        std::vector<char> has_internal(n, 0);
        std::size_t members = 0, defective = 0;
        for (StateId s = 0; s < n; ++s) {
            if (!cand[s]) continue;
            ++members;
            for (const auto& row : adj.succ[s]) {
                bool internal = !row.empty();
                for (StateId t : row)
                    if (!cand[t]) { internal = false; break; }
                if (internal) {
                    has_internal[s] = 1;
                    for (StateId t : row) edges[s].push_back(t);
                }
            }
            if (!has_internal[s]) ++defective;
        }
        if (members == 0) continue;

        if (defective > 0) {
            // States that cannot stay inside the candidate can be in no end
            // component of it; shrink and retry.
            if (defective == members) continue;
            std::vector<char> rest(n, 0);
            for (StateId s = 0; s < n; ++s) rest[s] = cand[s] && has_internal[s];
            work.push_back(std::move(rest));
            continue;
        }

        std::int32_t scc_count = 0;
        auto comp = detail::scc_of_subgraph(n, edges, cand, scc_count);
        if (scc_count == 1) {
            for (StateId s = 0; s < n; ++s)
                if (cand[s]) out.mec_id[s] = out.count;
            ++out.count;
            continue;
        }
        std::vector<std::vector<char>> groups(scc_count, std::vector<char>(n, 0));
        for (StateId s = 0; s < n; ++s)
            if (cand[s] && comp[s] >= 0) groups[comp[s]][s] = 1;
        for (auto& g : groups) work.push_back(std::move(g));
    }
    return out;
}

} // namespace scenv

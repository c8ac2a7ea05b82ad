#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scenv/errors.hpp"
#include "scenv/lp.hpp"
#include "scenv/model.hpp"
#include "scenv/sampling.hpp"
#include "scenv/value_iteration.hpp"

namespace scenv {

// Graph facts shared by every instantiation of one parametric model. Target
// and goal analyses are computed on the parametric digraph, which graph
// preservation keeps valid for all samples.
struct GraphAnalysis {
    std::optional<ReachAnalysis> reach;
    std::optional<CostAnalysis> cost;

    std::vector<StateId> cannot_reach_states() const {
        std::vector<StateId> out;
        if (!reach) return out;
        for (StateId s = 0; s < reach->cannot_reach.size(); ++s)
            if (reach->cannot_reach[s]) out.push_back(s);
        return out;
    }
    bool goal_almost_sure() const { return cost && !cost->offending; }
};

inline GraphAnalysis graph_preprocess(const ParametricModel& m,
                                      const std::vector<StateId>& target,
                                      const std::vector<StateId>* goal = nullptr) {
    if (target.empty() && (!goal || goal->empty()))
        throw DomainError("target set must not be empty");
    AdjacencyList adj = adjacency_of(m);
    GraphAnalysis ga;
    if (!target.empty()) {
        std::vector<char> t(m.num_states(), 0);
        for (StateId s : target) t.at(s) = 1;
        ga.reach = analyze_reach(adj, t);
    }
    if (goal && !goal->empty()) {
        std::vector<char> g(m.num_states(), 0);
        for (StateId s : *goal) g.at(s) = 1;
        ga.cost = analyze_cost(adj, g);
        if (ga.cost->offending)
            throw ExpectedCostIllDefinedError(m.state_names()[*ga.cost->offending]);
    }
    return ga;
}

// Builds the analysis a specification needs, rejecting ill-posed inputs early.
inline GraphAnalysis preprocess_for(const ParametricModel& m, const Specification& spec) {
    spec.check();
    if (spec.kind == SpecKind::Reachability) {
        auto t = m.target_states();
        if (t.empty()) throw SemanticError("specification needs target-labeled states");
        return graph_preprocess(m, t);
    }
    auto g = m.goal_states();
    if (g.empty()) g = m.target_states();
    if (g.empty()) throw SemanticError("expected-cost specification needs goal-labeled states");
    return graph_preprocess(m, {}, &g);
}

struct SampleVerdict {
    std::size_t index = 0;
    double value_at_init = 0.0;
    bool satisfied = false;
    std::vector<ActionId> policy; // chosen action per state
    double wall_time_ms = 0.0;
};

namespace checker_detail {

inline std::vector<double> cost_param_values(const ParametricModel& m, const Valuation& u) {
    std::vector<double> w;
    for (VarId v : m.cost_parameters()) {
        if (!u.has(v)) throw MissingParameterError(m.parameters()[v].name);
        w.push_back(u.get(v));
    }
    return w;
}

inline std::vector<ActionId> policy_actions(const ConcreteModel& c,
                                            const std::vector<std::int32_t>& rows) {
    std::vector<ActionId> out(c.num_states, 0);
    for (StateId s = 0; s < c.num_states; ++s)
        out[s] = c.rows[s][static_cast<std::size_t>(std::max(rows[s], 0))].action;
    return out;
}

} // namespace checker_detail

// Model-checks one instantiation against the specification. Verdicts landing
// within the value-iteration tolerance of the threshold are re-resolved by
// the exact linear path so they cannot corrupt the discarding counts.
inline SampleVerdict check_sample(const ParametricModel& m, const Valuation& u,
                                  const Specification& spec, const GraphAnalysis& ga,
                                  GraphPolicy policy = GraphPolicy::Strict) {
    auto t0 = std::chrono::steady_clock::now();
    ConcreteModel c = m.instantiate(u, policy);
    SampleVerdict v;
    ValueResult vr;
    if (spec.kind == SpecKind::Reachability) {
        if (!ga.reach) throw DomainError("missing reachability analysis");
        vr = reach_values(c, *ga.reach, spec.objective);
        if (std::abs(vr.value[c.initial] - spec.threshold) <= kViEpsilon)
            vr = reach_values_exact(c, *ga.reach, spec.objective);
    } else {
        if (!ga.cost) throw DomainError("missing cost analysis");
        auto w = checker_detail::cost_param_values(m, u);
        vr = cost_values(c, *ga.cost, spec.objective, w);
        if (std::abs(vr.value[c.initial] - spec.threshold) <=
            kViEpsilon * std::max(1.0, std::abs(spec.threshold)))
            vr = cost_values_exact(c, *ga.cost, spec.objective, w);
    }
    v.value_at_init = vr.value[c.initial];
    v.satisfied = spec.satisfied(v.value_at_init);
    v.policy = checker_detail::policy_actions(c, vr.policy);
    v.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

inline std::string verdicts_to_csv(const std::vector<SampleVerdict>& verdicts) {
    std::ostringstream os;
    os << "sample_index,value_at_init,satisfied,wall_time_ms\n";
    os.precision(17);
    for (const auto& v : verdicts)
        os << v.index << "," << v.value_at_init << "," << (v.satisfied ? 1 : 0) << ","
           << v.wall_time_ms << "\n";
    return os.str();
}

// Joint scenario program over a sample set for an at-most reachability
// threshold. The program decomposes: the only variables shared between
// samples are (lambda, tau), so the optimum is the largest per-sample
// min-policy value at the initial state, and feasibility is tau <= lambda.
struct ScenarioLpResult {
    bool feasible = true;
    double tau = 0.0;
    bool degenerate = false; // no samples: vacuously feasible
};

inline ScenarioLpResult scenario_lp_reach(const ParametricModel& m, const SampleSet& samples,
                                          double lambda,
                                          PolicyObjective objective = PolicyObjective::Min) {
    Specification spec{SpecKind::Reachability, lambda, Direction::AtMost, objective};
    auto ga = preprocess_for(m, spec);
    ScenarioLpResult out;
    if (samples.samples.empty()) {
        out.degenerate = true;
        out.tau = 0.0;
        out.feasible = true;
        return out;
    }
    double tau = 0.0;
    for (const auto& u : samples.samples) {
        SampleVerdict v = check_sample(m, u, spec, ga);
        tau = std::max(tau, v.value_at_init);
    }
    out.tau = tau;
    out.feasible = tau <= lambda;
    return out;
}

// Paper-shaped monolithic assembly for cross-validation: one LP holding every
// sample's Bellman equalities plus the shared tau. Markov chains only; the
// per-sample route above is the production path and also covers MDPs.
inline ScenarioLpResult scenario_lp_reach_monolithic(const ParametricModel& m,
                                                     const SampleSet& samples, double lambda) {
    if (!m.is_mc())
        throw DomainError("monolithic scenario LP assembly supports Markov chains only");
    Specification spec{SpecKind::Reachability, lambda, Direction::AtMost, PolicyObjective::Min};
    auto ga = preprocess_for(m, spec);
    const ReachAnalysis& ra = *ga.reach;

    ScenarioLpResult out;
    if (samples.samples.empty()) {
        out.degenerate = true;
        return out;
    }

    LpProblem lp;
    int tau = lp.add_var(1.0, -kLpInfinity, kLpInfinity);

    for (const auto& u : samples.samples) {
        ConcreteModel c = m.instantiate(u);
        std::vector<int> var_of(c.num_states, -1);
        for (StateId s = 0; s < c.num_states; ++s)
            if (!ra.target[s] && !ra.cannot_reach[s]) var_of[s] = lp.add_var(0.0, 0.0, 1.0);
        for (StateId s = 0; s < c.num_states; ++s) {
            if (var_of[s] < 0) continue;
            double rhs = 0.0;
            int row = lp.add_eq_row(0.0);
            lp.add_entry(row, var_of[s], 1.0);
            for (const auto& e : c.rows[s][0].edges) {
                if (ra.target[e.succ]) rhs += e.prob;
                else if (var_of[e.succ] >= 0) lp.add_entry(row, var_of[e.succ], -e.prob);
            }
            lp.set_rhs(row, rhs);
        }
        StateId init = c.initial;
        if (var_of[init] >= 0) {
            lp.add_le_row({{var_of[init], 1.0}, {tau, -1.0}}, 0.0);
        } else {
            double fixed = ra.target[init] ? 1.0 : 0.0;
            lp.add_le_row({{tau, -1.0}}, -fixed);
        }
    }

    LpSolution sol = solve_lp(lp, 1e-10);
    if (sol.status != LpStatus::Optimal) throw NumericError("monolithic scenario LP failed");
    out.tau = sol.x[tau];
    out.feasible = out.tau <= lambda + 1e-9;
    return out;
}

} // namespace scenv

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scenv/errors.hpp"
#include "scenv/polynomial.hpp"

namespace scenv {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

enum class ParamKind { Uncontrollable, ControllableCost };

struct Parameter {
    std::string name;
    ParamKind kind = ParamKind::Uncontrollable;
};

// An assignment of reals to parameters; NaN marks "unset". Cost parameters
// may stay unset when only transitions are instantiated.
struct Valuation {
    std::vector<double> values;

    explicit Valuation(std::size_t n = 0)
        : values(n, std::numeric_limits<double>::quiet_NaN()) {}

    void set(VarId v, double x) { values.at(v) = x; }
    double get(VarId v) const { return values.at(v); }
    bool has(VarId v) const { return v < values.size() && !std::isnan(values[v]); }
};

struct ParametricEdge {
    StateId succ;
    Polynomial prob;
};

struct ParametricRow {
    ActionId action;
    std::vector<ParametricEdge> edges;
    std::optional<Polynomial> cost;
};

enum class DiagCode {
    NoEnabledAction,
    EmptyTransitionRow,
    SuccessorOutOfRange,
    DuplicateActionRow,
    DuplicateSuccessor,
    ControllableInTransition,
    NonAffineCost,
    InitialOutOfRange,
    BadThreshold,
};

struct Diagnostic {
    DiagCode code;
    std::string message;
};

enum class SpecKind { Reachability, ExpectedCost };
enum class Direction { AtMost, AtLeast };
enum class PolicyObjective { Min, Max };

// A single reachability or expected-cost requirement on the initial state.
struct Specification {
    SpecKind kind = SpecKind::Reachability;
    double threshold = 0.0;
    Direction direction = Direction::AtMost;
    PolicyObjective objective = PolicyObjective::Min;

    bool satisfied(double value) const {
        return direction == Direction::AtMost ? value <= threshold : value >= threshold;
    }

    void check() const {
        if (kind == SpecKind::Reachability && (threshold < 0.0 || threshold > 1.0))
            throw DomainError("reachability threshold must lie in [0,1]");
        if (kind == SpecKind::ExpectedCost && threshold < 0.0)
            throw DomainError("expected-cost threshold must be nonnegative");
    }
};

// Cost of one state-action pair after instantiating the uncontrollable
// parameters: base + sum_j lin[j] * w[slot_j], affine in the controllable
// cost vector w.
struct AffineCost {
    double base = 0.0;
    std::vector<std::pair<std::uint32_t, double>> lin; // (w slot, coefficient)

    double at(std::span<const double> w) const {
        double c = base;
        for (auto& [slot, k] : lin) c += k * w[slot];
        return c;
    }
    bool is_constant() const { return lin.empty(); }
};

struct ConcreteEdge {
    StateId succ;
    double prob;
};

struct ConcreteRow {
    ActionId action;
    std::vector<ConcreteEdge> edges;
    AffineCost cost;
};

struct ConcreteModel {
    std::size_t num_states = 0;
    StateId initial = 0;
    std::vector<std::vector<ConcreteRow>> rows; // per state
    std::vector<char> is_target;
    std::vector<char> is_goal;
    Valuation valuation;        // the instantiation that produced this model
    double max_row_sum_error = 0.0;
    bool has_costs = false;

    bool is_mc() const {
        for (auto& r : rows)
            if (r.size() != 1) return false;
        return true;
    }
};

// How instantiate treats edges that evaluate to zero. Strict is the sampling
// contract; AllowBoundary supports curve sweeps at closed parameter-range
// endpoints where zero-probability edges simply vanish.
enum class GraphPolicy { Strict, AllowBoundary };

class ParametricModel {
public:
    std::string name = "model";

    StateId add_state(const std::string& sname) {
        if (state_ids_.count(sname)) throw SemanticError("duplicate state '" + sname + "'");
        state_ids_[sname] = static_cast<StateId>(state_names_.size());
        state_names_.push_back(sname);
        rows_.emplace_back();
        is_target_.push_back(0);
        is_goal_.push_back(0);
        return static_cast<StateId>(state_names_.size() - 1);
    }

    ActionId intern_action(const std::string& aname) {
        auto it = action_ids_.find(aname);
        if (it != action_ids_.end()) return it->second;
        action_ids_[aname] = static_cast<ActionId>(action_names_.size());
        action_names_.push_back(aname);
        return static_cast<ActionId>(action_names_.size() - 1);
    }

    VarId add_parameter(const std::string& pname, ParamKind kind) {
        if (param_ids_.count(pname)) throw SemanticError("duplicate parameter '" + pname + "'");
        param_ids_[pname] = static_cast<VarId>(params_.size());
        params_.push_back({pname, kind});
        if (kind == ParamKind::ControllableCost) {
            cost_param_slots_[static_cast<VarId>(params_.size() - 1)] =
                static_cast<std::uint32_t>(cost_params_.size());
            cost_params_.push_back(static_cast<VarId>(params_.size() - 1));
        }
        return static_cast<VarId>(params_.size() - 1);
    }

    void add_row(StateId s, ActionId a, std::vector<ParametricEdge> edges,
                 std::optional<Polynomial> cost = std::nullopt) {
        rows_.at(s).push_back({a, std::move(edges), std::move(cost)});
    }

    // Attaches a cost to an existing transition row.
    bool set_cost(StateId s, ActionId a, Polynomial cost, bool overwrite = false) {
        for (auto& row : rows_.at(s)) {
            if (row.action != a) continue;
            if (row.cost && !overwrite) throw SemanticError("duplicate cost declaration");
            row.cost = std::move(cost);
            return true;
        }
        return false;
    }

    void set_initial(StateId s) { initial_ = s; }
    void mark_target(StateId s) { is_target_.at(s) = 1; }
    void mark_goal(StateId s) { is_goal_.at(s) = 1; }

    std::size_t num_states() const { return state_names_.size(); }
    std::size_t num_actions() const { return action_names_.size(); }
    std::size_t num_params() const { return params_.size(); }
    std::size_t num_cost_params() const { return cost_params_.size(); }
    StateId initial() const { return initial_; }

    const std::vector<std::string>& state_names() const { return state_names_; }
    const std::vector<std::string>& action_names() const { return action_names_; }
    const std::vector<Parameter>& parameters() const { return params_; }
    const std::vector<VarId>& cost_parameters() const { return cost_params_; }
    const std::vector<std::vector<ParametricRow>>& rows() const { return rows_; }
    const std::vector<char>& target_flags() const { return is_target_; }
    const std::vector<char>& goal_flags() const { return is_goal_; }

    std::optional<StateId> find_state(const std::string& s) const {
        auto it = state_ids_.find(s);
        if (it == state_ids_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<VarId> find_parameter(const std::string& p) const {
        auto it = param_ids_.find(p);
        if (it == param_ids_.end()) return std::nullopt;
        return it->second;
    }

    std::vector<StateId> target_states() const {
        std::vector<StateId> t;
        for (StateId s = 0; s < is_target_.size(); ++s)
            if (is_target_[s]) t.push_back(s);
        return t;
    }
    std::vector<StateId> goal_states() const {
        std::vector<StateId> g;
        for (StateId s = 0; s < is_goal_.size(); ++s)
            if (is_goal_[s]) g.push_back(s);
        return g;
    }

    bool is_mc() const {
        for (auto& r : rows_)
            if (r.size() != 1) return false;
        return true;
    }

    bool has_costs() const {
        for (auto& sr : rows_)
            for (auto& r : sr)
                if (r.cost) return true;
        return false;
    }

    bool is_controllable(VarId v) const { return params_[v].kind == ParamKind::ControllableCost; }

    // Splits a cost polynomial into base + sum coef_j * w_j where base and
    // the coefficients only mention uncontrollable parameters. Throws on
    // anything not affine in the controllable parameters.
    struct AffineSplit {
        Polynomial base;
        std::vector<std::pair<std::uint32_t, Polynomial>> lin; // (w slot, coefficient poly)
    };

    AffineSplit split_affine_cost(const Polynomial& p, const std::string& where) const {
        std::vector<Term> base_terms;
        std::map<std::uint32_t, std::vector<Term>> lin_terms;
        for (const Term& t : p.terms()) {
            std::optional<VarId> cvar;
            Term reduced;
            reduced.coeff = t.coeff;
            for (auto& [v, e] : t.mono.factors) {
                if (is_controllable(v)) {
                    if (cvar || e > 1)
                        throw SemanticError("cost at " + where +
                                            " is not affine in the controllable parameters");
                    cvar = v;
                } else {
                    reduced.mono.factors.push_back({v, e});
                }
            }
            if (cvar)
                lin_terms[cost_param_slots_.at(*cvar)].push_back(std::move(reduced));
            else
                base_terms.push_back(std::move(reduced));
        }
        AffineSplit out;
        out.base = Polynomial::from_terms(std::move(base_terms));
        for (auto& [slot, ts] : lin_terms)
            out.lin.push_back({slot, Polynomial::from_terms(std::move(ts))});
        return out;
    }

    // Structural invariants; an empty list means the model is valid.
    std::vector<Diagnostic> validate() const {
        std::vector<Diagnostic> diags;
        auto add = [&](DiagCode c, std::string m) { diags.push_back({c, std::move(m)}); };
        if (initial_ >= num_states())
            add(DiagCode::InitialOutOfRange, "initial state index out of range");
        for (StateId s = 0; s < rows_.size(); ++s) {
            const auto& srows = rows_[s];
            if (srows.empty()) {
                add(DiagCode::NoEnabledAction, "state " + state_names_[s] + " has no enabled action");
                continue;
            }
            std::vector<ActionId> seen;
            for (const auto& row : srows) {
                for (ActionId a : seen)
                    if (a == row.action)
                        add(DiagCode::DuplicateActionRow,
                            "state " + state_names_[s] + " declares action " +
                                action_names_[row.action] + " twice");
                seen.push_back(row.action);
                if (row.edges.empty())
                    add(DiagCode::EmptyTransitionRow,
                        "state " + state_names_[s] + ", action " + action_names_[row.action] +
                            " has no successors");
                std::vector<StateId> succs;
                for (const auto& e : row.edges) {
                    if (e.succ >= num_states()) {
                        add(DiagCode::SuccessorOutOfRange,
                            "successor index " + std::to_string(e.succ) + " out of range");
                        continue;
                    }
                    for (StateId t : succs)
                        if (t == e.succ)
                            add(DiagCode::DuplicateSuccessor,
                                "state " + state_names_[s] + " lists successor " +
                                    state_names_[e.succ] + " twice");
                    succs.push_back(e.succ);
                    for (VarId v : e.prob.parameters_of())
                        if (is_controllable(v))
                            add(DiagCode::ControllableInTransition,
                                "controllable parameter " + params_[v].name +
                                    " occurs in transition " + state_names_[s] + " -> " +
                                    state_names_[e.succ]);
                }
                if (row.cost) {
                    try {
                        split_affine_cost(*row.cost, state_names_[s]);
                    } catch (const SemanticError& e) {
                        add(DiagCode::NonAffineCost, e.what());
                    }
                }
            }
        }
        return diags;
    }

    // Replaces every polynomial by its value at u. Row sums must be 1 within
    // kRowSumTolerance; under GraphPolicy::Strict every syntactic edge must
    // keep a probability in (0,1].
    static constexpr double kRowSumTolerance = 1e-9;

    ConcreteModel instantiate(const Valuation& u,
                              GraphPolicy policy = GraphPolicy::Strict) const {
        for (VarId v = 0; v < params_.size(); ++v)
            if (params_[v].kind == ParamKind::Uncontrollable && !u.has(v))
                throw MissingParameterError(params_[v].name);

        ConcreteModel c;
        c.num_states = num_states();
        c.initial = initial_;
        c.is_target = is_target_;
        c.is_goal = is_goal_;
        c.valuation = u;
        c.rows.resize(num_states());
        for (StateId s = 0; s < rows_.size(); ++s) {
            for (const auto& row : rows_[s]) {
                ConcreteRow cr;
                cr.action = row.action;
                double sum = 0.0;
                for (const auto& e : row.edges) {
                    double p = e.prob.evaluate(u.values);
                    if (policy == GraphPolicy::Strict && p <= 0.0)
                        throw NotGraphPreservingError(edge_name(s, row.action, e.succ), p);
                    if (p < 0.0 || p > 1.0 + 1e-12)
                        throw NotGraphPreservingError(edge_name(s, row.action, e.succ), p);
                    sum += p;
                    if (p > 0.0) cr.edges.push_back({e.succ, std::min(p, 1.0)});
                }
                if (std::abs(sum - 1.0) > kRowSumTolerance)
                    throw NotWellDefinedError(
                        "(" + state_names_[s] + ", " + action_names_[row.action] + ")", sum);
                c.max_row_sum_error = std::max(c.max_row_sum_error, std::abs(sum - 1.0));
                if (row.cost) {
                    c.has_costs = true;
                    auto split = split_affine_cost(*row.cost, state_names_[s]);
                    cr.cost.base = split.base.evaluate(u.values);
                    if (cr.cost.base < -1e-12)
                        throw SemanticError("negative cost at state " + state_names_[s]);
                    cr.cost.base = std::max(cr.cost.base, 0.0);
                    for (auto& [slot, coef] : split.lin) {
                        double k = coef.evaluate(u.values);
                        if (k < 0.0)
                            throw SemanticError("negative controllable-cost coefficient at state " +
                                                state_names_[s]);
                        cr.cost.lin.push_back({slot, k});
                    }
                }
                c.rows[s].push_back(std::move(cr));
            }
        }
        return c;
    }

    std::string edge_name(StateId s, ActionId a, StateId t) const {
        return state_names_[s] + " --" + action_names_[a] + "--> " + state_names_[t];
    }

private:
    std::vector<std::string> state_names_;
    std::vector<std::string> action_names_;
    std::vector<Parameter> params_;
    std::vector<VarId> cost_params_;
    std::map<VarId, std::uint32_t> cost_param_slots_;
    std::unordered_map<std::string, StateId> state_ids_;
    std::unordered_map<std::string, ActionId> action_ids_;
    std::unordered_map<std::string, VarId> param_ids_;
    std::vector<std::vector<ParametricRow>> rows_;
    std::vector<char> is_target_;
    std::vector<char> is_goal_;
    StateId initial_ = 0;
};

} // namespace scenv

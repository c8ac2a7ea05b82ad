#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenv/checker.hpp"
#include "scenv/confidence.hpp"
#include "scenv/estimate.hpp"
#include "scenv/lp.hpp"
#include "scenv/parallel.hpp"
#include "scenv/sampling.hpp"

namespace scenv {

enum class CostLpMode { Auto, Monolithic, Reduced };

struct CostSynOptions {
    double w_min = 0.0;
    double w_max = 1000.0;
    CostLpMode mode = CostLpMode::Auto;
    unsigned threads = 1;
};

// Monolithic scenario program for cost synthesis: every sample contributes
// its full Bellman equality block; the cost parameters w and the worst-case
// bound tau couple the blocks.
struct CostLp {
    LpProblem lp;
    int tau_var = -1;
    std::vector<int> w_vars;
    std::vector<int> init_vars;    // per sample, -1 when the initial state is a goal
    std::size_t equality_rows = 0;
    std::size_t num_samples = 0;
};

struct SynthesisResult {
    std::vector<double> w_star;
    double tau_star = 0.0;
    std::vector<double> sample_costs; // expected cost at the initial state per sample
    std::size_t violating = 0;        // samples above kappa at w_star
    bool feasible = false;            // tau_star <= kappa
    double duality_gap = 0.0;
};

namespace costsyn_detail {

// Fixed per-sample policy for the LP blocks. Chains have none to choose; for
// MDPs the cost-minimal policy at the centre of the w box is used, and the
// certification step re-optimizes policies at w*.
inline std::vector<std::int32_t> lp_policy(const ConcreteModel& c, const CostAnalysis& ca,
                                           const ParametricModel& m, const CostSynOptions& opt) {
    if (c.is_mc()) return std::vector<std::int32_t>(c.num_states, 0);
    std::vector<double> w_mid(m.num_cost_params(), 0.5 * (opt.w_min + opt.w_max));
    return cost_values(c, ca, PolicyObjective::Min, w_mid).policy;
}

} // namespace costsyn_detail

inline CostLp build_cost_lp(const ParametricModel& m, const SampleSet& samples, double kappa,
                            const CostSynOptions& opt, const GraphAnalysis& ga) {
    if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
    if (!ga.cost) throw DomainError("missing cost analysis");
    const CostAnalysis& ca = *ga.cost;

    CostLp out;
    out.num_samples = samples.samples.size();
    out.tau_var = out.lp.add_var(1.0, -kLpInfinity, kLpInfinity);
    for (std::size_t j = 0; j < m.num_cost_params(); ++j)
        out.w_vars.push_back(out.lp.add_var(0.0, opt.w_min, opt.w_max));

    for (const auto& u : samples.samples) {
        ConcreteModel c = m.instantiate(u);
        auto policy = costsyn_detail::lp_policy(c, ca, m, opt);

        std::vector<int> var_of(c.num_states, -1);
        for (StateId s = 0; s < c.num_states; ++s)
            if (!ca.goal[s]) var_of[s] = out.lp.add_var(0.0, 0.0, kLpInfinity);
        for (StateId s = 0; s < c.num_states; ++s) {
            if (var_of[s] < 0) continue;
            const auto& row = c.rows[s][policy[s]];
            int r = out.lp.add_eq_row(row.cost.base);
            ++out.equality_rows;
            out.lp.add_entry(r, var_of[s], 1.0);
            for (const auto& e : row.edges)
                if (var_of[e.succ] >= 0) out.lp.add_entry(r, var_of[e.succ], -e.prob);
            for (auto& [slot, coef] : row.cost.lin)
                out.lp.add_entry(r, out.w_vars[slot], -coef);
        }
        int iv = var_of[c.initial];
        out.init_vars.push_back(iv);
        if (iv >= 0)
            out.lp.add_le_row({{iv, 1.0}, {out.tau_var, -1.0}}, 0.0);
        else
            out.lp.add_le_row({{out.tau_var, -1.0}}, 0.0);
    }
    return out;
}

// Solves the assembled program; feasibility in the sense of Problem 2 is the
// post-check tau* <= kappa (the kappa row never moves the optimum when it is
// satisfiable, and its absence keeps the program always feasible).
inline SynthesisResult solve_cost_lp(const CostLp& built, double kappa) {
    LpSolution sol = solve_lp(built.lp, 1e-10);
    if (sol.status == LpStatus::Infeasible) throw NumericError("cost LP reported infeasible");
    if (sol.status == LpStatus::Unbounded) throw NumericError("cost LP reported unbounded");
    SynthesisResult r;
    for (int wv : built.w_vars) r.w_star.push_back(sol.x[wv]);
    r.tau_star = sol.x[built.tau_var];
    for (int iv : built.init_vars) r.sample_costs.push_back(iv >= 0 ? sol.x[iv] : 0.0);
    r.duality_gap = sol.duality_gap;
    r.feasible = r.tau_star <= kappa + 1e-9;
    for (double c : r.sample_costs) r.violating += c > kappa + 1e-9 ? 1 : 0;
    return r;
}

// Reduced program: per sample the Bellman block is eliminated by solving
// |W|+1 sparse linear systems, leaving the affine map c_init(w) = a + b.w;
// the LP then ranges over (w, tau) only. Default above 50 samples.
inline SynthesisResult solve_cost_reduced(const ParametricModel& m, const SampleSet& samples,
                                          double kappa, const CostSynOptions& opt,
                                          const GraphAnalysis& ga) {
    if (!ga.cost) throw DomainError("missing cost analysis");
    const CostAnalysis& ca = *ga.cost;
    const std::size_t W = m.num_cost_params();
    const std::size_t n_samples = samples.samples.size();

    std::vector<double> a(n_samples, 0.0);
    std::vector<std::vector<double>> bmat(n_samples, std::vector<double>(W, 0.0));

    parallel_for(n_samples, opt.threads, [&](std::size_t si) {
        ConcreteModel c = m.instantiate(samples.samples[si]);
        auto policy = costsyn_detail::lp_policy(c, ca, m, opt);

        std::vector<std::int32_t> idx(c.num_states, -1);
        std::vector<StateId> unknowns;
        for (StateId s = 0; s < c.num_states; ++s)
            if (!ca.goal[s]) {
                idx[s] = static_cast<std::int32_t>(unknowns.size());
                unknowns.push_back(s);
            }
        std::size_t nu = unknowns.size();
        if (nu == 0) return;

        Eigen::SparseMatrix<double> A(nu, nu);
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nu, W + 1);
        for (std::size_t i = 0; i < nu; ++i) {
            StateId s = unknowns[i];
            trip.emplace_back(i, i, 1.0);
            const auto& row = c.rows[s][policy[s]];
            rhs(i, 0) = row.cost.base;
            for (auto& [slot, coef] : row.cost.lin) rhs(i, 1 + slot) = coef;
            for (const auto& e : row.edges)
                if (idx[e.succ] >= 0) trip.emplace_back(i, idx[e.succ], -e.prob);
        }
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw NumericError("singular cost system");
        Eigen::MatrixXd sols = lu.solve(rhs);
        std::int32_t ii = idx[c.initial];
        if (ii < 0) return; // initial state is a goal: cost identically 0
        a[si] = sols(ii, 0);
        for (std::size_t j = 0; j < W; ++j) bmat[si][j] = sols(ii, 1 + j);
    });

    LpProblem lp;
    int tau = lp.add_var(1.0, -kLpInfinity, kLpInfinity);
    std::vector<int> wv;
    for (std::size_t j = 0; j < W; ++j) wv.push_back(lp.add_var(0.0, opt.w_min, opt.w_max));
    for (std::size_t si = 0; si < n_samples; ++si) {
        std::vector<std::pair<int, double>> coeffs{{tau, -1.0}};
        for (std::size_t j = 0; j < W; ++j)
            if (bmat[si][j] != 0.0) coeffs.push_back({wv[j], bmat[si][j]});
        lp.add_le_row(coeffs, -a[si]);
    }
    LpSolution sol = solve_lp(lp, 1e-10);
    if (sol.status != LpStatus::Optimal) throw NumericError("reduced cost LP failed");

    SynthesisResult r;
    for (int j : wv) r.w_star.push_back(sol.x[j]);
    r.tau_star = sol.x[tau];
    r.sample_costs.resize(n_samples);
    for (std::size_t si = 0; si < n_samples; ++si) {
        double cval = a[si];
        for (std::size_t j = 0; j < W; ++j) cval += bmat[si][j] * r.w_star[j];
        r.sample_costs[si] = cval;
    }
    r.duality_gap = sol.duality_gap;
    r.feasible = r.tau_star <= kappa + 1e-9;
    for (double c : r.sample_costs) r.violating += c > kappa + 1e-9 ? 1 : 0;
    return r;
}

inline SynthesisResult synthesize(const ParametricModel& m, const SampleSet& samples,
                                  double kappa, const CostSynOptions& opt,
                                  const GraphAnalysis& ga) {
    CostLpMode mode = opt.mode;
    if (mode == CostLpMode::Auto)
        mode = samples.samples.size() > 50 ? CostLpMode::Reduced : CostLpMode::Monolithic;
    if (mode == CostLpMode::Monolithic) {
        CostLp built = build_cost_lp(m, samples, kappa, opt, ga);
        return solve_cost_lp(built, kappa);
    }
    return solve_cost_reduced(m, samples, kappa, opt, ga);
}

struct CertifiedSynthesis {
    SynthesisResult synthesis;
    DirectionResult certificate; // theorem-backed (nu, alpha) for phi_c at w*
    std::size_t K = 0;
    std::uint64_t seed = 0;
    long long rejected = 0;
};

// Scenario pipeline for Problem 2: optimize w over the sampled programs,
// then certify the obtained w* by counting violating samples and applying
// the cost-parameter theorems.
inline CertifiedSynthesis synthesize_and_certify(const ParametricModel& m,
                                                 const ParameterDistribution& dist, double kappa,
                                                 std::size_t K, std::uint64_t seed,
                                                 double alpha_target,
                                                 const CostSynOptions& opt = {}) {
    const std::size_t W = m.num_cost_params();
    if (K < W + 1)
        throw DomainError("cost synthesis needs K >= W+1 samples (got K=" + std::to_string(K) +
                          ", W=" + std::to_string(W) + ")");
    Specification spec{SpecKind::ExpectedCost, kappa, Direction::AtMost, PolicyObjective::Min};
    GraphAnalysis ga = preprocess_for(m, spec);
    SampleSet samples = draw(dist, m, K, seed);

    CertifiedSynthesis out;
    out.K = K;
    out.seed = seed;
    out.rejected = samples.rejected_count;
    out.synthesis = synthesize(m, samples, kappa, opt, ga);

    // Certification recheck at w*: policies re-optimized per sample.
    std::vector<char> violated(K, 0);
    parallel_for(K, opt.threads, [&](std::size_t i) {
        Valuation u = samples.samples[i];
        for (std::size_t j = 0; j < W; ++j)
            u.set(m.cost_parameters()[j], out.synthesis.w_star[j]);
        SampleVerdict v = check_sample(m, u, spec, ga);
        violated[i] = v.satisfied ? 0 : 1;
    });
    std::size_t L = 0;
    for (char f : violated) L += f;
    out.synthesis.violating = L;
    out.synthesis.feasible = out.synthesis.tau_star <= kappa + 1e-9;
    out.certificate =
        estimate_detail::direction_result(K, L, W, EstimateMode::FixedAlpha, 0.0, alpha_target);
    return out;
}

inline nlohmann::json synthesis_to_json(const CertifiedSynthesis& cs, const ParametricModel& m) {
    nlohmann::json j;
    nlohmann::json w;
    for (std::size_t i = 0; i < cs.synthesis.w_star.size(); ++i)
        w[m.parameters()[m.cost_parameters()[i]].name] = cs.synthesis.w_star[i];
    j["w_star"] = w;
    j["tau_star"] = cs.synthesis.tau_star;
    j["sample_costs"] = cs.synthesis.sample_costs;
    j["violating"] = cs.synthesis.violating;
    j["feasible"] = cs.synthesis.feasible;
    j["duality_gap"] = cs.synthesis.duality_gap;
    j["K"] = cs.K;
    j["seed"] = cs.seed;
    j["rejected"] = cs.rejected;
    j["certificate"] = direction_to_json(cs.certificate);
    return j;
}

} // namespace scenv

#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenv/checker.hpp"
#include "scenv/confidence.hpp"
#include "scenv/parallel.hpp"
#include "scenv/sampling.hpp"

namespace scenv {

enum class EstimateMode { FixedNu, FixedAlpha };

struct EstimateOptions {
    std::size_t K = 1000;
    std::uint64_t seed = 0;
    EstimateMode mode = EstimateMode::FixedAlpha;
    double nu = 0.05;          // FixedNu: tolerance probability to certify
    double alpha = 1e-3;       // FixedAlpha: confidence target for the bisection
    unsigned threads = 1;
    std::vector<double> cost_values; // fixed w when the model has cost parameters
};

// One direction of the two-sided readout (phi itself, and its complement).
struct DirectionResult {
    std::size_t violating = 0;
    Theorem theorem = Theorem::T1;
    double nu = 1.0;
    double alpha = 1.0;
    double log_alpha = 0.0;
    bool vacuous = false;
};

struct EstimationReport {
    std::string model_name;
    Specification spec;
    std::size_t K = 0;
    std::size_t L = 0; // samples violating phi
    std::size_t W = 0; // scenario decision dimension beyond (lambda, tau)
    std::uint64_t seed = 0;
    long long rejected = 0;
    EstimateMode mode = EstimateMode::FixedAlpha;
    DirectionResult sat, unsat;
    std::vector<SampleVerdict> verdicts;
    double wall_time_ms = 0.0;
    unsigned threads = 1;

    double satisfaction_lower_bound() const { return 1.0 - sat.nu; }
    double confidence() const { return 1.0 - sat.alpha; }
};

namespace estimate_detail {

inline DirectionResult direction_result(std::size_t K, std::size_t violating, std::size_t W,
                                        EstimateMode mode, double nu, double alpha_target) {
    DirectionResult r;
    r.violating = violating;
    r.theorem = choose_theorem(violating, W);
    // All four formulas sum the tail up to violating + W + 1.
    std::size_t limit = violating + W + 1;
    bool formula_ok = true;
    try {
        conf_detail::shape_of(r.theorem, K, violating, W);
    } catch (const DomainError&) {
        formula_ok = false;
    }

    if (mode == EstimateMode::FixedNu) {
        r.nu = nu;
        if (!formula_ok) {
            r.alpha = 1.0;
            r.vacuous = true;
            return r;
        }
        auto cr = confidence_value(r.theorem, K, violating, W, nu);
        r.alpha = cr.alpha;
        r.log_alpha = cr.log_alpha;
        r.vacuous = cr.vacuous;
        return r;
    }

    // FixedAlpha: the bisection needs the tail to vanish as nu -> 1, which
    // requires limit < K. Otherwise only the trivial bound F >= 0 remains.
    if (!formula_ok || limit >= K) {
        r.nu = 1.0;
        r.alpha = 0.0;
        r.vacuous = true;
        return r;
    }
    r.nu = solve_nu(r.theorem, K, violating, W, alpha_target);
    auto cr = confidence_value(r.theorem, K, violating, W, r.nu);
    r.alpha = cr.alpha;
    r.log_alpha = cr.log_alpha;
    r.vacuous = cr.vacuous;
    return r;
}

} // namespace estimate_detail

// End-to-end satisfaction-probability estimation: draw K instantiations,
// model-check each, count the violating set, and bind the empirical outcome
// to a (1-nu, 1-alpha) guarantee through the matching theorem.
inline EstimationReport estimate(const ParametricModel& m, const ParameterDistribution& dist,
                                 const Specification& spec, const EstimateOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    spec.check();
    if (opt.K < 2) throw DomainError("estimation needs K >= 2 samples");

    std::size_t W = 0;
    if (m.num_cost_params() > 0 && spec.kind == SpecKind::ExpectedCost) {
        if (opt.cost_values.size() != m.num_cost_params())
            throw DomainError("model has cost parameters; provide a value for each (or use costsyn)");
        W = m.num_cost_params();
    }

    GraphAnalysis ga = preprocess_for(m, spec);
    SampleSet samples = draw(dist, m, opt.K, opt.seed);

    std::vector<SampleVerdict> verdicts(opt.K);
    parallel_for(opt.K, opt.threads, [&](std::size_t i) {
        Valuation u = samples.samples[i];
        for (std::size_t j = 0; j < opt.cost_values.size(); ++j)
            u.set(m.cost_parameters()[j], opt.cost_values[j]);
        verdicts[i] = check_sample(m, u, spec, ga);
        verdicts[i].index = i;
    });

    std::size_t L = 0;
    for (const auto& v : verdicts) L += v.satisfied ? 0 : 1;

    EstimationReport rep;
    rep.model_name = m.name;
    rep.spec = spec;
    rep.K = opt.K;
    rep.L = L;
    rep.W = W;
    rep.seed = opt.seed;
    rep.rejected = samples.rejected_count;
    rep.mode = opt.mode;
    rep.threads = opt.threads;
    rep.sat = estimate_detail::direction_result(opt.K, L, W, opt.mode, opt.nu, opt.alpha);
    rep.unsat = estimate_detail::direction_result(opt.K, opt.K - L, W, opt.mode, 1.0 - opt.nu,
                                                  opt.alpha);
    rep.verdicts = std::move(verdicts);
    rep.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline nlohmann::json direction_to_json(const DirectionResult& d) {
    return {
        {"violating", d.violating}, {"theorem", theorem_name(d.theorem)},
        {"nu", d.nu},               {"alpha", d.alpha},
        {"log_alpha", d.log_alpha}, {"bound", 1.0 - d.nu},
        {"confidence", 1.0 - d.alpha}, {"vacuous", d.vacuous},
    };
}

// JSON report. The timing object is the only part allowed to differ between
// reruns of an identical configuration.
inline nlohmann::json report_to_json(const EstimationReport& r) {
    nlohmann::json j;
    j["model"] = r.model_name;
    j["spec"] = {
        {"kind", r.spec.kind == SpecKind::Reachability ? "reach" : "cost"},
        {"threshold", r.spec.threshold},
        {"direction", r.spec.direction == Direction::AtMost ? "le" : "ge"},
        {"policy", r.spec.objective == PolicyObjective::Min ? "min" : "max"},
    };
    j["K"] = r.K;
    j["L"] = r.L;
    j["W"] = r.W;
    j["seed"] = r.seed;
    j["rejected"] = r.rejected;
    j["mode"] = r.mode == EstimateMode::FixedNu ? "fixed_nu" : "fixed_alpha";
    j["sat"] = direction_to_json(r.sat);
    j["unsat"] = direction_to_json(r.unsat);
    j["satisfaction_lower_bound"] = r.satisfaction_lower_bound();
    j["confidence"] = r.confidence();

    // Per-theorem breakdown at the reported tolerance, where preconditions hold.
    nlohmann::json breakdown;
    for (Theorem t : {Theorem::T1, Theorem::T2, Theorem::T3, Theorem::T4}) {
        try {
            auto cr = confidence_value(t, r.K, r.L, r.W, r.sat.nu);
            breakdown[theorem_name(t)] = cr.alpha;
        } catch (const DomainError&) {
        }
    }
    j["theorem_breakdown"] = breakdown;
    j["timing"] = {{"wall_time_ms", r.wall_time_ms}, {"threads", r.threads}};
    return j;
}

inline std::string report_table(const EstimationReport& r) {
    std::ostringstream os;
    os << "model: " << r.model_name << "  K=" << r.K << "  L=" << r.L
       << "  rejected=" << r.rejected << "\n";
    os << std::left << std::setw(10) << "samples" << std::setw(16) << "alpha_sat"
       << std::setw(16) << "alpha_unsat" << std::setw(14) << "bound(1-nu)" << std::setw(12)
       << "time(s)" << "\n";
    os << std::setw(10) << r.K;
    os << std::setw(16) << std::scientific << std::setprecision(2) << r.sat.alpha;
    os << std::setw(16) << r.unsat.alpha;
    os << std::setw(14) << std::fixed << std::setprecision(6) << r.satisfaction_lower_bound();
    os << std::setw(12) << std::setprecision(2) << r.wall_time_ms / 1000.0 << "\n";
    if (r.sat.vacuous) os << "note: sat-side bound is vacuous (formula clamped at 1)\n";
    return os.str();
}

} // namespace scenv

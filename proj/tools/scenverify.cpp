#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "scenv/checker.hpp"
#include "scenv/confidence.hpp"
#include "scenv/costsyn.hpp"
#include "scenv/estimate.hpp"
#include "scenv/generators.hpp"
#include "scenv/modelio.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitModel = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

scenv::ParsedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scenv::ModelError("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return scenv::parse_model(buf.str());
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw scenv::ConfigError("cannot write '" + path + "'");
    out << text;
}

struct SpecFlags {
    std::string kind = "reach";
    double lambda = -1.0;
    double kappa = -1.0;
    std::string direction;
    std::string policy;

    scenv::Specification build() const {
        scenv::Specification s;
        if (kind == "reach") {
            s.kind = scenv::SpecKind::Reachability;
            if (lambda < 0) throw scenv::DomainError("--lambda is required for reach specs");
            s.threshold = lambda;
        } else if (kind == "cost") {
            s.kind = scenv::SpecKind::ExpectedCost;
            if (kappa < 0) throw scenv::DomainError("--kappa is required for cost specs");
            s.threshold = kappa;
        } else {
            throw scenv::DomainError("--spec must be reach or cost");
        }
        std::string dir = direction.empty() ? "le" : direction;
        s.direction = dir == "ge" ? scenv::Direction::AtLeast : scenv::Direction::AtMost;
        if (policy.empty())
            s.objective = s.direction == scenv::Direction::AtMost ? scenv::PolicyObjective::Min
                                                                  : scenv::PolicyObjective::Max;
        else
            s.objective = policy == "max" ? scenv::PolicyObjective::Max
                                          : scenv::PolicyObjective::Min;
        s.check();
        return s;
    }
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
    cmd->add_option("--spec", f.kind, "specification kind: reach | cost");
    cmd->add_option("--lambda", f.lambda, "reachability threshold");
    cmd->add_option("--kappa", f.kappa, "expected-cost threshold");
    cmd->add_option("--direction", f.direction, "le | ge (default le)");
    cmd->add_option("--policy", f.policy, "min | max (default from direction)");
}

scenv::Valuation parse_assignments(const scenv::ParametricModel& m,
                                   const std::vector<std::string>& sets,
                                   const std::vector<std::string>& extras) {
    scenv::Valuation u(m.num_params());
    auto apply = [&](const std::string& name, const std::string& value) {
        auto v = m.find_parameter(name);
        if (!v) throw scenv::DomainError("unknown parameter '" + name + "'");
        u.set(*v, scenv::to_double(scenv::parse_rational(value)));
    };
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw scenv::DomainError("--set expects name=value");
        apply(s.substr(0, eq), s.substr(eq + 1));
    }
    for (std::size_t i = 0; i + 1 < extras.size(); i += 2) {
        std::string flag = extras[i];
        if (flag.rfind("--", 0) != 0)
            throw scenv::DomainError("unexpected argument '" + flag + "'");
        apply(flag.substr(2), extras[i + 1]);
    }
    if (extras.size() % 2 == 1)
        throw scenv::DomainError("dangling argument '" + extras.back() + "'");
    return u;
}

int run_check(const std::string& path, const SpecFlags& sf, const std::vector<std::string>& sets,
              const std::vector<std::string>& extras) {
    auto pm = load_model(path);
    auto spec = sf.build();
    auto u = parse_assignments(pm.model, sets, extras);
    auto ga = scenv::preprocess_for(pm.model, spec);
    auto verdict = scenv::check_sample(pm.model, u, spec, ga, scenv::GraphPolicy::AllowBoundary);
    nlohmann::json j;
    j["model"] = pm.model.name;
    j["value_at_init"] = verdict.value_at_init;
    j["satisfied"] = verdict.satisfied;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int run_estimate(const std::string& path, const SpecFlags& sf, scenv::EstimateOptions opt,
                 bool have_nu, bool have_alpha, const std::string& out,
                 const std::string& verdicts_out, const std::string& samples_out,
                 const std::string& format, const std::vector<double>& w) {
    if (have_nu && have_alpha)
        throw scenv::DomainError("--nu and --alpha are mutually exclusive");
    opt.mode = have_nu ? scenv::EstimateMode::FixedNu : scenv::EstimateMode::FixedAlpha;
    opt.cost_values = w;

    auto pm = load_model(path);
    auto spec = sf.build();
    std::cerr << "estimating " << pm.model.name << " with K=" << opt.K << " seed=" << opt.seed
              << " threads=" << opt.threads << "\n";
    auto rep = scenv::estimate(pm.model, pm.dist, spec, opt);

    nlohmann::json j = scenv::report_to_json(rep);
    if (!out.empty()) write_file(out, j.dump(2) + "\n");
    if (!verdicts_out.empty()) write_file(verdicts_out, scenv::verdicts_to_csv(rep.verdicts));
    if (!samples_out.empty()) {
        auto samples = scenv::draw(pm.dist, pm.model, opt.K, opt.seed);
        write_file(samples_out, scenv::sample_set_to_json(samples, pm.model).dump(2) + "\n");
    }
    if (format == "json") std::cout << j.dump(2) << "\n";
    else std::cout << scenv::report_table(rep);
    return kExitOk;
}

int run_costsyn(const std::string& path, double kappa, std::size_t K, std::uint64_t seed,
                double alpha, scenv::CostSynOptions opt, const std::string& mode,
                const std::string& out, const std::string& format) {
    if (mode == "mono") opt.mode = scenv::CostLpMode::Monolithic;
    else if (mode == "reduced") opt.mode = scenv::CostLpMode::Reduced;
    else if (mode == "auto") opt.mode = scenv::CostLpMode::Auto;
    else throw scenv::DomainError("--mode must be auto, mono or reduced");

    auto pm = load_model(path);
    if (kappa < 0) throw scenv::DomainError("--kappa is required");
    auto cs = scenv::synthesize_and_certify(pm.model, pm.dist, kappa, K, seed, alpha, opt);
    nlohmann::json j = scenv::synthesis_to_json(cs, pm.model);
    if (!out.empty()) write_file(out, j.dump(2) + "\n");
    if (format == "table") {
        std::cout << "tau* = " << cs.synthesis.tau_star << "  feasible(kappa=" << kappa
                  << ") = " << (cs.synthesis.feasible ? "yes" : "no")
                  << "  violating = " << cs.synthesis.violating << "/" << cs.K << "\n";
        std::cout << "certified bound 1-nu = " << 1.0 - cs.certificate.nu
                  << " at confidence 1-alpha = " << 1.0 - cs.certificate.alpha << " ("
                  << scenv::theorem_name(cs.certificate.theorem) << ")\n";
    } else {
        std::cout << j.dump(2) << "\n";
    }
    return kExitOk;
}

int run_gen_uav(const scenv::UavConfig& cfg, const std::string& out) {
    auto pm = scenv::generate_uav(cfg);
    std::string text = scenv::serialize_model(pm);
    if (out.empty()) std::cout << text;
    else write_file(out, text);
    std::cerr << "generated " << pm.model.name << ": " << pm.model.num_states() << " states, "
              << pm.model.num_params() << " parameters\n";
    return kExitOk;
}

struct BenchDefault {
    const char* name;
    SpecFlags spec;
};

SpecFlags bench_spec_for(const std::string& model_name, const SpecFlags& flags) {
    if (flags.lambda >= 0 || flags.kappa >= 0) return flags;
    static const std::vector<BenchDefault> table = {
        {"fig1", {"reach", 0.13, -1, "le", "min"}},
        {"brp_retry", {"reach", 0.05, -1, "le", "min"}},
        {"crowds_forward", {"reach", 0.35, -1, "le", "min"}},
        {"nand_gate", {"reach", 0.05, -1, "le", "min"}},
        {"consensus_coin", {"reach", 0.6, -1, "ge", "max"}},
    };
    for (const auto& d : table)
        if (model_name == d.name) return d.spec;
    throw scenv::DomainError("no default spec for model '" + model_name +
                             "'; pass --lambda/--kappa");
}

int run_bench(const std::vector<std::string>& paths, const SpecFlags& flags, std::uint64_t seed,
              int reps, double margin, unsigned threads, const std::string& out,
              const std::vector<std::size_t>& k_list) {
    std::ostringstream csv;
    csv << "model,K,alpha_sat_avg,alpha_unsat_avg,violating_frac_avg,time_s_avg\n";
    for (const auto& path : paths) {
        auto pm = load_model(path);
        auto spec = bench_spec_for(pm.model.name, flags).build();
        auto ga = scenv::preprocess_for(pm.model, spec);

        // Pilot run pins the tolerance above the observed violation level so
        // confidence grows with K.
        std::size_t pilot_k = 2000;
        auto pilot = scenv::draw(pm.dist, pm.model, pilot_k, seed + 99991);
        std::size_t pilot_l = 0;
        std::vector<char> bad(pilot_k, 0);
        scenv::parallel_for(pilot_k, threads, [&](std::size_t i) {
            bad[i] = !scenv::check_sample(pm.model, pilot.samples[i], spec, ga).satisfied;
        });
        for (char b : bad) pilot_l += b;
        double frac = static_cast<double>(pilot_l) / static_cast<double>(pilot_k);
        double nu_sat = std::min(0.999, frac + margin);
        double nu_unsat = std::min(0.999, (1.0 - frac) + margin);
        std::cerr << "bench " << pm.model.name << ": pilot violation fraction " << frac << "\n";

        for (std::size_t K : k_list) {
            double sum_sat = 0.0, sum_unsat = 0.0, sum_l = 0.0, sum_t = 0.0;
            for (int rep = 0; rep < reps; ++rep) {
                auto t0 = std::chrono::steady_clock::now();
                auto samples = scenv::draw(pm.dist, pm.model, K, seed + 1000 + rep);
                std::vector<char> viol(K, 0);
                scenv::parallel_for(K, threads, [&](std::size_t i) {
                    viol[i] =
                        !scenv::check_sample(pm.model, samples.samples[i], spec, ga).satisfied;
                });
                std::size_t L = 0;
                for (char b : viol) L += b;
                auto a_sat =
                    scenv::confidence_value(scenv::choose_theorem(L, 0), K, L, 0, nu_sat);
                auto a_unsat = scenv::confidence_value(scenv::choose_theorem(K - L, 0), K, K - L,
                                                       0, nu_unsat);
                sum_sat += a_sat.alpha;
                sum_unsat += a_unsat.alpha;
                sum_l += static_cast<double>(L) / static_cast<double>(K);
                sum_t += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count();
            }
            csv << pm.model.name << "," << K << "," << sum_sat / reps << "," << sum_unsat / reps
                << "," << sum_l / reps << "," << sum_t / reps << "\n";
            std::cerr << "  K=" << K << " alpha_sat_avg=" << sum_sat / reps
                      << " alpha_unsat_avg=" << sum_unsat / reps << "\n";
        }
    }
    if (out.empty()) std::cout << csv.str();
    else write_file(out, csv.str());
    return kExitOk;
}

#define ST_CHECK(cond)                                                    \
    do {                                                                  \
        if (!(cond)) {                                                    \
            std::cerr << "selftest FAILED at " << __FILE__ << ":" << __LINE__ \
                      << ": " #cond "\n";                                 \
            return 1;                                                     \
        }                                                                 \
    } while (0)

int run_selftest() {
    using namespace scenv;
    // polynomial arithmetic and evaluation
    {
        ParametricModel m;
        VarId v = m.add_parameter("v", ParamKind::Uncontrollable);
        Polynomial pv = Polynomial::variable(v);
        std::vector<double> at{0.3};
        ST_CHECK(std::abs(pv.evaluate(at) - 0.3) < 1e-15);
        Polynomial half_sq = Polynomial::constant(1, 2) * pv * pv;
        std::vector<double> one{1.0};
        ST_CHECK(std::abs(half_sq.evaluate(one) - 0.5) < 1e-15);
        Polynomial p = Polynomial::constant(1) - half_sq;
        std::vector<double> half{0.5};
        ST_CHECK(std::abs(p.evaluate(half) - 0.875) < 1e-15);
        ST_CHECK((pv - pv).is_constant().has_value());
        ST_CHECK(*(pv - pv).is_constant() == 0.0);
        ST_CHECK(*Polynomial::constant(1, 10).is_constant() == 0.1);
        ST_CHECK(!pv.is_constant().has_value());
        ST_CHECK(p.parameters_of() == std::vector<VarId>{v});
    }
    // fig1 pinned behavior
    {
        auto pm = generate_fig1();
        ST_CHECK(pm.model.validate().empty());
        ST_CHECK(pm.model.num_states() == 8);
        ST_CHECK(pm.model.is_mc());
        Valuation u(1);
        u.set(0, 0.3);
        auto c = pm.model.instantiate(u);
        ST_CHECK(std::abs(c.rows[0][0].edges[0].prob - 0.7) < 1e-15);
        ST_CHECK(std::abs(c.rows[0][0].edges[1].prob - 0.3) < 1e-15);
        Valuation u0(1);
        u0.set(0, 0.0);
        bool threw = false;
        try {
            pm.model.instantiate(u0);
        } catch (const NotGraphPreservingError&) {
            threw = true;
        }
        ST_CHECK(threw);

        Specification spec{SpecKind::Reachability, kFig1Lambda, Direction::AtMost,
                           PolicyObjective::Min};
        auto ga = preprocess_for(pm.model, spec);
        auto cannot = ga.cannot_reach_states();
        ST_CHECK(cannot == (std::vector<StateId>{6, 7}));
        auto at = [&](double v) {
            Valuation uu(1);
            uu.set(0, v);
            return check_sample(pm.model, uu, spec, ga, GraphPolicy::AllowBoundary);
        };
        ST_CHECK(std::abs(at(0.0).value_at_init - 0.14) < 1e-9);
        ST_CHECK(std::abs(at(1.0).value_at_init - 0.09) < 1e-9);
        ST_CHECK(at(0.3).satisfied);
        ST_CHECK(!at(0.7).satisfied);
        ST_CHECK(at(0.95).satisfied);
    }
    // confidence formulas
    {
        ST_CHECK(alpha_t1(2, 0.0) == 1.0);
        ST_CHECK(std::abs(alpha_t1(10, 0.5) - 11.0 / 1024.0) < 1e-15);
        ST_CHECK(std::abs(alpha_t1(100, 0.05) - 0.037081) < 1e-4);
        ST_CHECK(std::abs(alpha_t2(50, 0, 0.2) - alpha_t1(50, 0.2)) < 1e-15);
        ST_CHECK(std::abs(alpha_t3(50, 0, 0.2) - alpha_t1(50, 0.2)) < 1e-15);
        ST_CHECK(std::abs(alpha_t4(50, 3, 0, 0.2) - alpha_t2(50, 3, 0.2)) < 1e-15);
        ST_CHECK(alpha_t3(50, 3, 0.0) == 1.0);
        double nu = solve_nu(Theorem::T1, 100, 0, 0, 0.01);
        ST_CHECK(alpha_t1(100, nu) <= 0.01);
        ST_CHECK(alpha_t1(100, nu - 1e-6) > 0.01);
    }
    // sampling determinism and prefix property
    {
        auto pm = generate_fig1();
        auto s1 = draw(pm.dist, pm.model, 5, 7);
        auto s2 = draw(pm.dist, pm.model, 5, 7);
        ST_CHECK(s1.samples.size() == 5);
        for (int i = 0; i < 5; ++i)
            ST_CHECK(s1.samples[i].get(0) == s2.samples[i].get(0));
        auto s3 = draw(pm.dist, pm.model, 3, 7);
        for (int i = 0; i < 3; ++i)
            ST_CHECK(s1.samples[i].get(0) == s3.samples[i].get(0));
        bool threw = false;
        try {
            draw(pm.dist, pm.model, 0, 7);
        } catch (const DomainError&) {
            threw = true;
        }
        ST_CHECK(threw);
    }
    // scenario program over samples
    {
        auto pm = generate_fig1();
        SampleSet set;
        for (double v : {0.2, 0.3, 0.4}) {
            Valuation u(1);
            u.set(0, v);
            set.samples.push_back(u);
        }
        auto r = scenario_lp_reach(pm.model, set, kFig1Lambda);
        ST_CHECK(r.feasible);
        Specification spec{SpecKind::Reachability, kFig1Lambda, Direction::AtMost,
                           PolicyObjective::Min};
        auto ga = preprocess_for(pm.model, spec);
        Valuation u02(1);
        u02.set(0, 0.2);
        double v02 = check_sample(pm.model, u02, spec, ga).value_at_init;
        ST_CHECK(std::abs(r.tau - v02) < 1e-12);
        Valuation u07(1);
        u07.set(0, 0.7);
        set.samples.push_back(u07);
        ST_CHECK(!scenario_lp_reach(pm.model, set, kFig1Lambda).feasible);
        SampleSet empty;
        auto rd = scenario_lp_reach(pm.model, empty, kFig1Lambda);
        ST_CHECK(rd.degenerate && rd.feasible && rd.tau == 0.0);
    }
    // expected-cost basics: geometric chain
    {
        ParametricModel m;
        VarId q = m.add_parameter("q", ParamKind::Uncontrollable);
        StateId s0 = m.add_state("s0"), s1 = m.add_state("s1"), g = m.add_state("g");
        m.set_initial(s0);
        m.mark_goal(g);
        ActionId a = m.intern_action("_");
        Polynomial pq = Polynomial::variable(q), one = Polynomial::constant(1);
        m.add_row(s0, a, {{s1, pq}, {s0, one - pq}}, Polynomial::constant(1));
        m.add_row(s1, a, {{g, one}}, Polynomial());
        m.add_row(g, a, {{g, one}}, Polynomial());
        Specification spec{SpecKind::ExpectedCost, 20.0, Direction::AtMost,
                           PolicyObjective::Min};
        auto ga = preprocess_for(m, spec);
        Valuation u(1);
        u.set(0, 0.25);
        auto verdict = check_sample(m, u, spec, ga);
        ST_CHECK(std::abs(verdict.value_at_init - 4.0) < 1e-6);
    }
    std::cerr << "selftest passed\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-based verification of uncertain Markov models"};
    app.require_subcommand(1);

    // check
    auto* c_check = app.add_subcommand("check", "model-check one instantiation");
    std::string check_model;
    SpecFlags check_spec;
    std::vector<std::string> check_sets;
    c_check->add_option("model", check_model, "model file")->required();
    add_spec_flags(c_check, check_spec);
    c_check->add_option("--set", check_sets, "parameter assignment name=value");
    c_check->allow_extras();

    // estimate
    auto* c_est = app.add_subcommand("estimate", "estimate the satisfaction probability");
    std::string est_model, est_out, est_verdicts, est_samples, est_format = "table";
    SpecFlags est_spec;
    scenv::EstimateOptions est_opt;
    est_opt.threads = scenv::default_thread_count();
    double est_nu = -1.0, est_alpha = -1.0;
    std::vector<double> est_w;
    c_est->add_option("model", est_model, "model file")->required();
    add_spec_flags(c_est, est_spec);
    c_est->add_option("--K", est_opt.K, "number of samples");
    c_est->add_option("--seed", est_opt.seed, "sampling seed");
    c_est->add_option("--nu", est_nu, "fixed tolerance probability; reports alpha");
    c_est->add_option("--alpha", est_alpha, "confidence target; bisects nu");
    c_est->add_option("--threads", est_opt.threads, "worker threads");
    c_est->add_option("--out", est_out, "write the JSON report here");
    c_est->add_option("--verdicts", est_verdicts, "write per-sample verdicts CSV here");
    c_est->add_option("--samples-out", est_samples, "write the sample-set audit JSON here");
    c_est->add_option("--format", est_format, "stdout format: table | json");
    c_est->add_option("--w", est_w, "fixed cost-parameter values");

    // costsyn
    auto* c_cs = app.add_subcommand("costsyn", "synthesize controllable cost parameters");
    std::string cs_model, cs_out, cs_mode = "auto", cs_format = "table";
    double cs_kappa = -1.0, cs_alpha = 1e-3;
    std::size_t cs_k = 100;
    std::uint64_t cs_seed = 0;
    scenv::CostSynOptions cs_opt;
    cs_opt.threads = scenv::default_thread_count();
    c_cs->add_option("model", cs_model, "model file")->required();
    c_cs->add_option("--kappa", cs_kappa, "expected-cost threshold")->required();
    c_cs->add_option("--K", cs_k, "number of samples");
    c_cs->add_option("--seed", cs_seed, "sampling seed");
    c_cs->add_option("--alpha", cs_alpha, "confidence target for the certificate");
    c_cs->add_option("--wmin", cs_opt.w_min, "cost-parameter lower bound");
    c_cs->add_option("--wmax", cs_opt.w_max, "cost-parameter upper bound");
    c_cs->add_option("--mode", cs_mode, "LP build mode: auto | mono | reduced");
    c_cs->add_option("--threads", cs_opt.threads, "worker threads");
    c_cs->add_option("--out", cs_out, "write the JSON result here");
    c_cs->add_option("--format", cs_format, "stdout format: table | json");

    // gen-uav
    auto* c_uav = app.add_subcommand("gen-uav", "generate a UAV gridworld model");
    scenv::UavConfig uav_cfg;
    std::string uav_out;
    bool uav_empty = false;
    c_uav->add_option("--nx", uav_cfg.nx, "grid width");
    c_uav->add_option("--ny", uav_cfg.ny, "grid depth");
    c_uav->add_option("--nz", uav_cfg.nz, "grid height");
    c_uav->add_option("--weathers", uav_cfg.weathers, "number of weather conditions");
    c_uav->add_option("--zones", uav_cfg.zones, "wind zones along x");
    c_uav->add_option("--preset", uav_cfg.preset, "wind preset: uniform | bias-y | bias-neg-x");
    c_uav->add_option("--horizon", uav_cfg.horizon, "time horizon (cost mode)");
    c_uav->add_flag("--cost", uav_cfg.cost_mode, "cost mode: obstacle hits cost 100");
    c_uav->add_flag("--no-obstacles", uav_empty, "generate an empty grid");
    c_uav->add_option("--out", uav_out, "output .umdp path (default stdout)");

    // bench
    auto* c_bench = app.add_subcommand("bench", "K-schedule benchmark over bundled models");
    std::vector<std::string> bench_models;
    SpecFlags bench_spec;
    std::uint64_t bench_seed = 1;
    int bench_reps = 10;
    double bench_margin = 0.05;
    unsigned bench_threads = scenv::default_thread_count();
    std::string bench_out;
    std::vector<std::size_t> bench_k = {100, 1000, 10000};
    c_bench->add_option("models", bench_models, "model files (default: bundled set)");
    add_spec_flags(c_bench, bench_spec);
    c_bench->add_option("--seed", bench_seed, "base seed");
    c_bench->add_option("--reps", bench_reps, "repetitions per sample count");
    c_bench->add_option("--margin", bench_margin, "tolerance margin over the pilot fraction");
    c_bench->add_option("--threads", bench_threads, "worker threads");
    c_bench->add_option("--out", bench_out, "write CSV here (default stdout)");
    c_bench->add_option("--K-list", bench_k, "sample counts");

    // selftest
    app.add_subcommand("selftest", "run the built-in example assertions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (c_check->parsed())
            return run_check(check_model, check_spec, check_sets, c_check->remaining());
        if (c_est->parsed()) {
            if (est_nu >= 0) est_opt.nu = est_nu;
            if (est_alpha >= 0) est_opt.alpha = est_alpha;
            return run_estimate(est_model, est_spec, est_opt, est_nu >= 0, est_alpha >= 0,
                                est_out, est_verdicts, est_samples, est_format, est_w);
        }
        if (c_cs->parsed())
            return run_costsyn(cs_model, cs_kappa, cs_k, cs_seed, cs_alpha, cs_opt, cs_mode,
                               cs_out, cs_format);
        if (c_uav->parsed()) {
            if (uav_empty) uav_cfg.default_obstacles = false;
            return run_gen_uav(uav_cfg, uav_out);
        }
        if (c_bench->parsed()) {
            if (bench_models.empty()) {
                const std::string dir = SCENV_MODELS_DIR;
                for (const char* name : {"fig1.umdp", "brp_retry.umdp", "crowds_forward.umdp",
                                         "nand_gate.umdp", "consensus_coin.umdp"})
                    bench_models.push_back(dir + "/" + name);
            }
            return run_bench(bench_models, bench_spec, bench_seed, bench_reps, bench_margin,
                             bench_threads, bench_out, bench_k);
        }
        return run_selftest();
    } catch (const scenv::DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const scenv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const scenv::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const scenv::Error& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    }
}

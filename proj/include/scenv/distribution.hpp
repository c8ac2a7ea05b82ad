#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "scenv/errors.hpp"
#include "scenv/model.hpp"
#include "scenv/rng.hpp"

namespace scenv {

// Joint distribution over the uncontrollable parameters: a product of
// independent blocks. Dirichlet blocks cover a simplex group of n parameters
// whose implied (n+1)-th coordinate appears in the model as 1 - sum.
struct UniformBlock {
    VarId var;
    double lo, hi;
};

struct DiscreteBlock {
    VarId var;
    std::vector<double> values;
    std::vector<double> probs; // same length, sums to 1
};

struct DirichletBlock {
    std::vector<VarId> vars;     // n parameters
    std::vector<double> weights; // n+1 concentration weights, all > 0
};

using DistributionBlock = std::variant<UniformBlock, DiscreteBlock, DirichletBlock>;

class ParameterDistribution {
public:
    void add_uniform(VarId v, double lo, double hi) {
        if (!(lo < hi)) throw ConfigError("uniform block needs lo < hi");
        blocks_.push_back(UniformBlock{v, lo, hi});
    }

    void add_discrete(VarId v, std::vector<double> values, std::vector<double> probs) {
        if (values.empty() || values.size() != probs.size())
            throw ConfigError("discrete block needs matching values and probabilities");
        double sum = 0.0;
        for (double p : probs) {
            if (p <= 0.0) throw ConfigError("discrete probabilities must be positive");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ConfigError("discrete probabilities must sum to 1");
        blocks_.push_back(DiscreteBlock{v, std::move(values), std::move(probs)});
    }

    void add_dirichlet(std::vector<VarId> vars, std::vector<double> weights) {
        if (weights.size() != vars.size() + 1)
            throw ConfigError("dirichlet block over n parameters needs n+1 weights");
        for (double w : weights)
            if (w <= 0.0) throw ConfigError("dirichlet weights must be positive");
        blocks_.push_back(DirichletBlock{std::move(vars), std::move(weights)});
    }

    const std::vector<DistributionBlock>& blocks() const { return blocks_; }

    // Every uncontrollable parameter must be covered by exactly one block.
    void check_coverage(const ParametricModel& m) const {
        std::vector<int> cover(m.num_params(), 0);
        auto touch = [&](VarId v) {
            if (v >= cover.size()) throw ConfigError("distribution block names unknown parameter");
            ++cover[v];
        };
        for (const auto& b : blocks_) {
            if (auto* u = std::get_if<UniformBlock>(&b)) touch(u->var);
            else if (auto* d = std::get_if<DiscreteBlock>(&b)) touch(d->var);
            else
                for (VarId v : std::get<DirichletBlock>(b).vars) touch(v);
        }
        for (VarId v = 0; v < m.num_params(); ++v) {
            bool unc = m.parameters()[v].kind == ParamKind::Uncontrollable;
            if (unc && cover[v] != 1)
                throw ConfigError("parameter " + m.parameters()[v].name + " is covered by " +
                                  std::to_string(cover[v]) + " distribution blocks (need 1)");
            if (!unc && cover[v] != 0)
                throw ConfigError("controllable parameter " + m.parameters()[v].name +
                                  " must not carry a distribution");
        }
    }

    // Draws one joint valuation. Each block owns an independent counter
    // stream, so the result depends only on (seed, sample_index, attempt).
    Valuation sample(std::size_t num_params, std::uint64_t seed, std::uint64_t sample_index,
                     std::uint32_t attempt) const {
        Valuation u(num_params);
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
            RngStream stream(seed, sample_index, attempt, static_cast<std::uint32_t>(bi));
            const auto& b = blocks_[bi];
            if (auto* ub = std::get_if<UniformBlock>(&b)) {
                u.set(ub->var, ub->lo + (ub->hi - ub->lo) * stream.next_unit());
            } else if (auto* db = std::get_if<DiscreteBlock>(&b)) {
                double x = stream.next_unit(), acc = 0.0;
                double chosen = db->values.back();
                for (std::size_t i = 0; i < db->values.size(); ++i) {
                    acc += db->probs[i];
                    if (x <= acc) { chosen = db->values[i]; break; }
                }
                u.set(db->var, chosen);
            } else {
                const auto& dir = std::get<DirichletBlock>(b);
                std::vector<double> g(dir.weights.size());
                double total = 0.0;
                for (;;) {
                    total = 0.0;
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        g[i] = stream.next_gamma(dir.weights[i]);
                        total += g[i];
                    }
                    bool interior = total > 0.0;
                    for (double x : g) interior = interior && x > 0.0;
                    if (interior) break; // underflow is astronomically rare; redraw
                }
                for (std::size_t i = 0; i < dir.vars.size(); ++i)
                    u.set(dir.vars[i], g[i] / total);
            }
        }
        return u;
    }

private:
    std::vector<DistributionBlock> blocks_;
};

} // namespace scenv

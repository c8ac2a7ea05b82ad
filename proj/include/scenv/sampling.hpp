#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenv/distribution.hpp"
#include "scenv/errors.hpp"
#include "scenv/model.hpp"

namespace scenv {

// K i.i.d. parameter instantiations, all graph-preserving for the model that
// produced them. Draws that were rejected (non-graph-preserving or not
// well-defined) are counted but never returned.
struct SampleSet {
    std::uint64_t seed = 0;
    std::vector<Valuation> samples;
    long long rejected_count = 0;
};

// Deterministic for fixed (dist, m, K, seed); the first K' samples equal an
// independent draw of size K' with the same seed, which is what makes the
// 100 -> 1000 -> 10000 schedules consistent.
inline SampleSet draw(const ParameterDistribution& dist, const ParametricModel& m,
                      std::size_t K, std::uint64_t seed) {
    if (K < 1) throw DomainError("sample count K must be at least 1");
    dist.check_coverage(m);
    SampleSet out;
    out.seed = seed;
    out.samples.reserve(K);
    const long long budget = 1000LL * static_cast<long long>(K);
    for (std::size_t i = 0; i < K; ++i) {
        for (std::uint32_t attempt = 0;; ++attempt) {
            Valuation u = dist.sample(m.num_params(), seed, i, attempt);
            try {
                m.instantiate(u, GraphPolicy::Strict);
            } catch (const NotGraphPreservingError&) {
                if (++out.rejected_count > budget)
                    throw RejectionBudgetExceededError(out.rejected_count);
                continue;
            } catch (const NotWellDefinedError&) {
                if (++out.rejected_count > budget)
                    throw RejectionBudgetExceededError(out.rejected_count);
                continue;
            }
            out.samples.push_back(std::move(u));
            break;
        }
    }
    return out;
}

// Audit export: every valuation by parameter name, plus the seed and the
// rejection count.
inline nlohmann::json sample_set_to_json(const SampleSet& set, const ParametricModel& m) {
    nlohmann::json j;
    j["seed"] = set.seed;
    j["rejected_count"] = set.rejected_count;
    j["count"] = set.samples.size();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& u : set.samples) {
        nlohmann::json row;
        for (VarId v = 0; v < m.num_params(); ++v)
            if (u.has(v)) row[m.parameters()[v].name] = u.get(v);
        rows.push_back(std::move(row));
    }
    j["samples"] = std::move(rows);
    return j;
}

} // namespace scenv

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenv/errors.hpp"
#include "scenv/rational.hpp"

namespace scenv {

// Variables are dense indices into a per-model parameter table; names live
// with the model, not with the polynomial.
using VarId = std::uint32_t;

// Sorted (variable, exponent) pairs with positive exponents.
struct Monomial {
    std::vector<std::pair<VarId, std::uint32_t>> factors;

    std::uint32_t total_degree() const {
        std::uint32_t d = 0;
        for (auto& [v, e] : factors) d += e;
        return d;
    }
    bool operator==(const Monomial&) const = default;
};

// Graded-lexicographic order: higher total degree first, ties broken
// lexicographically on exponent vectors. Fixed so serialization is
// deterministic.
inline bool grlex_before(const Monomial& a, const Monomial& b) {
    std::uint32_t da = a.total_degree(), db = b.total_degree();
    if (da != db) return da > db;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        if (a.factors[i].first != b.factors[j].first)
            return a.factors[i].first < b.factors[j].first;
        if (a.factors[i].second != b.factors[j].second)
            return a.factors[i].second > b.factors[j].second;
        ++i; ++j;
    }
    return a.factors.size() > b.factors.size();
}

struct Term {
    Rational coeff;
    Monomial mono;
};

// Multivariate polynomial with exact rational coefficients. Normalized on
// construction: terms in graded-lex order, no duplicate monomials, no zero
// coefficients; the zero polynomial is the empty term list.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(Rational constant) {
        if (constant != 0) {
            terms_.push_back({std::move(constant), {}});
            sync_doubles();
        }
    }

    static Polynomial variable(VarId v) {
        Polynomial p;
        p.terms_.push_back({Rational(1), Monomial{{{v, 1}}}});
        p.sync_doubles();
        return p;
    }

    static Polynomial constant(long num, long den = 1) { return Polynomial(rational(num, den)); }

    static Polynomial from_terms(std::vector<Term> raw) {
        Polynomial p;
        for (auto& t : raw) {
            canonicalize_mono(t.mono);
            t.coeff.canonicalize();
        }
        std::sort(raw.begin(), raw.end(),
                  [](const Term& a, const Term& b) { return grlex_before(a.mono, b.mono); });
        for (auto& t : raw) {
            if (!p.terms_.empty() && p.terms_.back().mono == t.mono)
                p.terms_.back().coeff += t.coeff;
            else
                p.terms_.push_back(std::move(t));
        }
        std::erase_if(p.terms_, [](const Term& t) { return t.coeff == 0; });
        p.sync_doubles();
        return p;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Returns the constant value when no variable occurs, otherwise empty.
    std::optional<double> is_constant() const {
        if (terms_.empty()) return 0.0;
        if (terms_.size() == 1 && terms_[0].mono.factors.empty()) return coeff_d_[0];
        return std::nullopt;
    }

    std::optional<Rational> constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (terms_.size() == 1 && terms_[0].mono.factors.empty()) return terms_[0].coeff;
        return std::nullopt;
    }

    // Support set after normalization, ascending.
    std::vector<VarId> parameters_of() const {
        std::vector<VarId> vars;
        for (auto& t : terms_)
            for (auto& [v, e] : t.mono.factors) vars.push_back(v);
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        return vars;
    }

    std::uint32_t degree() const {
        std::uint32_t d = 0;
        for (auto& t : terms_) d = std::max(d, t.mono.total_degree());
        return d;
    }

    // Term-summation evaluation; coefficients cross the exact/float boundary
    // here. Missing values are signalled by NaN entries in the valuation.
    double evaluate(std::span<const double> values) const {
        double sum = 0.0;
        for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
            double prod = coeff_d_[ti];
            for (auto& [v, e] : terms_[ti].mono.factors) {
                if (v >= values.size() || std::isnan(values[v]))
                    throw MissingParameterError("#" + std::to_string(v));
                prod *= pow_u(values[v], e);
            }
            sum += prod;
        }
        return sum;
    }

    Polynomial operator+(const Polynomial& o) const {
        std::vector<Term> all = terms_;
        all.insert(all.end(), o.terms_.begin(), o.terms_.end());
        return from_terms(std::move(all));
    }

    Polynomial operator-(const Polynomial& o) const {
        std::vector<Term> all = terms_;
        for (auto t : o.terms_) {
            t.coeff = -t.coeff;
            all.push_back(std::move(t));
        }
        return from_terms(std::move(all));
    }

    Polynomial operator*(const Polynomial& o) const {
        std::vector<Term> prod;
        prod.reserve(terms_.size() * o.terms_.size());
        for (auto& a : terms_)
            for (auto& b : o.terms_) {
                Term t;
                t.coeff = a.coeff * b.coeff;
                t.mono.factors = a.mono.factors;
                t.mono.factors.insert(t.mono.factors.end(), b.mono.factors.begin(),
                                      b.mono.factors.end());
                prod.push_back(std::move(t));
            }
        return from_terms(std::move(prod));
    }

    Polynomial operator*(const Rational& c) const {
        std::vector<Term> scaled = terms_;
        for (auto& t : scaled) t.coeff *= c;
        return from_terms(std::move(scaled));
    }

    Polynomial operator-() const { return *this * Rational(-1); }

    bool operator==(const Polynomial& o) const {
        if (terms_.size() != o.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].mono != o.terms_[i].mono || terms_[i].coeff != o.terms_[i].coeff)
                return false;
        return true;
    }

    // Renders with explicit names; used by the serializer and diagnostics.
    std::string to_string(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto& t : terms_) {
            Rational c = t.coeff;
            if (first) {
                if (c < 0) { out += "-"; c = -c; }
            } else {
                out += c < 0 ? " - " : " + ";
                if (c < 0) c = -c;
            }
            first = false;
            bool unit = (c == 1) && !t.mono.factors.empty();
            if (!unit) out += scenv::to_string(c);
            for (std::size_t k = 0; k < t.mono.factors.size(); ++k) {
                if (!unit || k > 0) out += "*";
                auto [v, e] = t.mono.factors[k];
                out += v < names.size() ? names[v] : "#" + std::to_string(v);
                if (e > 1) out += "^" + std::to_string(e);
            }
        }
        return out;
    }

    static Polynomial pow(const Polynomial& base, std::uint32_t n) {
        Polynomial r = Polynomial(Rational(1));
        for (std::uint32_t i = 0; i < n; ++i) r = r * base;
        return r;
    }

private:
    static void canonicalize_mono(Monomial& m) {
        std::erase_if(m.factors, [](auto& f) { return f.second == 0; });
        std::sort(m.factors.begin(), m.factors.end());
        std::size_t w = 0;
        for (std::size_t i = 0; i < m.factors.size(); ++i) {
            if (w > 0 && m.factors[w - 1].first == m.factors[i].first)
                m.factors[w - 1].second += m.factors[i].second;
            else
                m.factors[w++] = m.factors[i];
        }
        m.factors.resize(w);
    }

    static double pow_u(double x, std::uint32_t e) {
        double r = 1.0;
        while (e) {
            if (e & 1) r *= x;
            x *= x;
            e >>= 1;
        }
        return r;
    }

    void sync_doubles() {
        coeff_d_.resize(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) coeff_d_[i] = to_double(terms_[i].coeff);
    }

    std::vector<Term> terms_;
    std::vector<double> coeff_d_;
};

inline Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }

} // namespace scenv

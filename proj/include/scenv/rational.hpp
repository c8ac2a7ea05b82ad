#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "scenv/errors.hpp"

namespace scenv {

// Exact arbitrary-precision rational. Model coefficients are stored as
// Rational so files round-trip losslessly; doubles appear only at the
// evaluation boundary.
using Rational = mpq_class;

inline Rational rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// mpq_get_d truncates toward zero; nudge to the nearest representable double
// by exact comparison against the neighbors.
inline double to_double(const Rational& q) {
    double d = q.get_d();
    if (!std::isfinite(d)) return d;
    Rational best_err = q - Rational(d);
    if (best_err < 0) best_err = -best_err;
    for (double cand : {std::nextafter(d, std::numeric_limits<double>::infinity()),
                        std::nextafter(d, -std::numeric_limits<double>::infinity())}) {
        if (!std::isfinite(cand)) continue;
        Rational err = q - Rational(cand);
        if (err < 0) err = -err;
        if (err < best_err) {
            best_err = err;
            d = cand;
        }
    }
    return d;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

// Exact conversion: every finite double is p/2^e.
inline Rational rational_from_double(double x) { return Rational(x); }

// Parses "123", "-4/5" or "0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        Rational q;
        if (q.set_str(text, 10) != 0)
            throw DomainError("bad rational literal '" + text + "'");
        q.canonicalize();
        return q;
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0 || digits.empty())
        throw DomainError("bad decimal literal '" + text + "'");
    mpz_class num;
    if (num.set_str(digits, 10) != 0)
        throw DomainError("bad decimal literal '" + text + "'");
    mpz_class den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Deterministic text form, "n" or "n/d".
inline std::string to_string(const Rational& q) {
    return q.get_str();
}

} // namespace scenv

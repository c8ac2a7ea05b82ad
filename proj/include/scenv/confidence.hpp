#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "scenv/errors.hpp"
#include "scenv/rational.hpp"

namespace scenv {

// The four confidence formulas share the shape
//   alpha = coeff * sum_{i=0}^{M} C(K,i) (1-nu)^{K-i} nu^i
// with (coeff, M) = (1, 1) | (L+1, L+1) | (1, W+1) | (C(L+W+1, L), L+W+1).
// Everything is evaluated in log space with extended precision so the
// K = 10^4 regime neither overflows nor loses the 1e-12 agreement with the
// exact rational oracle that the test grid demands.

enum class Theorem { T1, T2, T3, T4 };

inline const char* theorem_name(Theorem t) {
    switch (t) {
        case Theorem::T1: return "T1";
        case Theorem::T2: return "T2";
        case Theorem::T3: return "T3";
        case Theorem::T4: return "T4";
    }
    return "?";
}

struct ConfidenceResult {
    double nu = 0.0;
    double alpha = 1.0;
    double log_alpha = 0.0;
    std::size_t K = 0, L = 0, W = 0;
    Theorem theorem = Theorem::T1;
    bool vacuous = false; // formula exceeded 1 and was clamped
};

namespace conf_detail {

inline long double log_choose(std::size_t n, std::size_t k) {
    if (k > n) return -std::numeric_limits<long double>::infinity();
    k = std::min(k, n - k);
    long double s = 0.0L;
    for (std::size_t j = 1; j <= k; ++j)
        s += std::log(static_cast<long double>(n - k + j)) - std::log(static_cast<long double>(j));
    return s;
}

// log of the binomial lower tail P[Bin(K, nu) <= M], exact term recurrence.
inline long double log_binomial_tail(std::size_t K, std::size_t M, double nu) {
    if (nu < 0.0 || nu >= 1.0) throw DomainError("nu must lie in [0,1)");
    M = std::min(M, K);
    if (nu == 0.0) return 0.0L; // only the i=0 term survives and equals 1
    const long double lnu = std::log(static_cast<long double>(nu));
    const long double l1m = std::log1p(static_cast<long double>(-nu));
    std::vector<long double> lt(M + 1);
    lt[0] = static_cast<long double>(K) * l1m;
    for (std::size_t i = 0; i < M; ++i)
        lt[i + 1] = lt[i] + std::log(static_cast<long double>(K - i)) -
                    std::log(static_cast<long double>(i + 1)) + lnu - l1m;
    long double mx = lt[0];
    for (long double v : lt) mx = std::max(mx, v);
    if (mx == -std::numeric_limits<long double>::infinity()) return mx;
    long double sum = 0.0L, comp = 0.0L;
    for (long double v : lt) {
        long double term = std::exp(v - mx) - comp;
        long double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return mx + std::log(sum);
}

struct Shape {
    long double log_coeff;
    std::size_t limit;
};

inline Shape shape_of(Theorem t, std::size_t K, std::size_t L, std::size_t W) {
    switch (t) {
        case Theorem::T1:
            if (K < 2) throw DomainError("Theorem 1 needs K >= 2");
            return {0.0L, 1};
        case Theorem::T2:
            if (K < 2) throw DomainError("Theorem 2 needs K >= 2");
            if (L >= K) throw DomainError("Theorem 2 needs L < K");
            return {std::log(static_cast<long double>(L + 1)), L + 1};
        case Theorem::T3:
            if (K < W + 1) throw DomainError("Theorem 3 needs K >= W+1");
            return {0.0L, W + 1};
        case Theorem::T4:
            if (K < 2) throw DomainError("Theorem 4 needs K >= 2");
            if (L + W + 1 >= K) throw DomainError("Theorem 4 needs L+W+1 < K");
            return {log_choose(L + W + 1, L), L + W + 1};
    }
    throw DomainError("unknown theorem");
}

} // namespace conf_detail

// log alpha, unclamped (may exceed 0 when the formula exceeds 1).
inline double log_alpha_value(Theorem t, std::size_t K, std::size_t L, std::size_t W, double nu) {
    auto sh = conf_detail::shape_of(t, K, L, W);
    return static_cast<double>(sh.log_coeff + conf_detail::log_binomial_tail(K, sh.limit, nu));
}

inline ConfidenceResult confidence_value(Theorem t, std::size_t K, std::size_t L, std::size_t W,
                                         double nu) {
    ConfidenceResult r;
    r.nu = nu;
    r.K = K;
    r.L = L;
    r.W = W;
    r.theorem = t;
    double la = log_alpha_value(t, K, L, W, nu);
    if (la >= 0.0) {
        r.alpha = 1.0;
        r.log_alpha = 0.0;
        r.vacuous = la > 0.0;
    } else {
        r.alpha = std::exp(la);
        r.log_alpha = la;
    }
    return r;
}

inline double alpha_t1(std::size_t K, double nu) {
    return confidence_value(Theorem::T1, K, 0, 0, nu).alpha;
}
inline double alpha_t2(std::size_t K, std::size_t L, double nu) {
    return confidence_value(Theorem::T2, K, L, 0, nu).alpha;
}
inline double alpha_t3(std::size_t K, std::size_t W, double nu) {
    return confidence_value(Theorem::T3, K, 0, W, nu).alpha;
}
inline double alpha_t4(std::size_t K, std::size_t L, std::size_t W, double nu) {
    return confidence_value(Theorem::T4, K, L, W, nu).alpha;
}

// Exact rational evaluation of the same formulas; the slow path is the test
// oracle for the log-space fast path. nu is taken exactly (every double is a
// dyadic rational).
inline Rational alpha_exact(Theorem t, std::size_t K, std::size_t L, std::size_t W, double nu) {
    if (nu < 0.0 || nu >= 1.0) throw DomainError("nu must lie in [0,1)");
    auto sh = conf_detail::shape_of(t, K, L, W);
    std::size_t M = std::min(sh.limit, K);
    if (K > 20000 || M > 2000)
        throw DomainError("exact oracle supports K <= 20000 with at most 2000 tail terms");

    Rational nu_q = rational_from_double(nu);
    Rational one_m = Rational(1) - nu_q;
    Rational sum = 0;
    for (std::size_t i = 0; i <= M; ++i) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(K),
                     static_cast<unsigned long>(i));
        Rational p1, p2;
        mpz_pow_ui(p1.get_num_mpz_t(), one_m.get_num_mpz_t(), static_cast<unsigned long>(K - i));
        mpz_pow_ui(p1.get_den_mpz_t(), one_m.get_den_mpz_t(), static_cast<unsigned long>(K - i));
        mpz_pow_ui(p2.get_num_mpz_t(), nu_q.get_num_mpz_t(), static_cast<unsigned long>(i));
        mpz_pow_ui(p2.get_den_mpz_t(), nu_q.get_den_mpz_t(), static_cast<unsigned long>(i));
        p1.canonicalize();
        p2.canonicalize();
        sum += Rational(binom) * p1 * p2;
    }
    Rational coeff = 1;
    if (t == Theorem::T2) coeff = Rational(static_cast<long>(L + 1));
    if (t == Theorem::T4) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(L + W + 1),
                     static_cast<unsigned long>(L));
        coeff = Rational(binom);
    }
    Rational alpha = coeff * sum;
    if (alpha > 1) alpha = 1;
    return alpha;
}

// Automatic theorem choice: discarding and cost-parameter dimension decide.
inline Theorem choose_theorem(std::size_t L, std::size_t W) {
    if (W == 0) return L == 0 ? Theorem::T1 : Theorem::T2;
    return L == 0 ? Theorem::T3 : Theorem::T4;
}

// Smallest nu (to 1e-9) whose confidence probability is at most alpha_target,
// by bisection on the monotone tail.
inline double solve_nu(Theorem t, std::size_t K, std::size_t L, std::size_t W,
                       double alpha_target) {
    if (!(alpha_target > 0.0 && alpha_target < 1.0))
        throw DomainError("alpha target must lie in (0,1)");
    conf_detail::shape_of(t, K, L, W); // validate preconditions up front
    const double log_target = std::log(alpha_target);
    double lo = 0.0, hi = 1.0 - 1e-13;
    if (log_alpha_value(t, K, L, W, hi) > log_target)
        throw NumericError("no nu in (0,1) reaches the requested confidence");
    while (hi - lo > 1e-9) {
        double mid = 0.5 * (lo + hi);
        if (log_alpha_value(t, K, L, W, mid) <= log_target) hi = mid;
        else lo = mid;
    }
    return hi;
}

} // namespace scenv

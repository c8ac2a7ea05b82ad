#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "scenv/errors.hpp"

namespace scenv {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

// Sparse linear program in computational standard form:
//   minimize c'x  subject to  A x = b,  lo <= x <= up,
// with lo_i = -inf / up_i = +inf allowed (free variables too). Inequalities
// enter through explicit slack variables via add_le_row.
class LpProblem {
public:
    int add_var(double cost, double lo, double up) {
        c_.push_back(cost);
        lo_.push_back(lo);
        up_.push_back(up);
        return static_cast<int>(c_.size()) - 1;
    }

    void add_entry(int row, int col, double v) { entries_.emplace_back(row, col, v); }

    int add_eq_row(double rhs) {
        b_.push_back(rhs);
        return static_cast<int>(b_.size()) - 1;
    }

    void set_rhs(int row, double rhs) { b_.at(row) = rhs; }

    // sum coeffs . x <= rhs
    int add_le_row(const std::vector<std::pair<int, double>>& coeffs, double rhs) {
        int row = add_eq_row(rhs);
        for (auto& [j, v] : coeffs) add_entry(row, j, v);
        int slack = add_var(0.0, 0.0, kLpInfinity);
        add_entry(row, slack, 1.0);
        return row;
    }

    int num_vars() const { return static_cast<int>(c_.size()); }
    int num_rows() const { return static_cast<int>(b_.size()); }

    const std::vector<double>& costs() const { return c_; }
    const std::vector<double>& lower() const { return lo_; }
    const std::vector<double>& upper() const { return up_; }
    const std::vector<double>& rhs() const { return b_; }
    const std::vector<Eigen::Triplet<double>>& entries() const { return entries_; }

private:
    std::vector<double> c_, lo_, up_, b_;
    std::vector<Eigen::Triplet<double>> entries_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    std::vector<double> x;
    double objective = 0.0;
    double duality_gap = 0.0; // relative complementarity gap at the solution
};

// Mehrotra predictor-corrector interior-point method on the regularized
// augmented KKT system
//   [-(D + dp I)  A'] [dx]   [r_dual]
//   [ A           dd I] [dy] = [r_primal]
// which tolerates free variables and rank defects. Small and dependable on
// the LP shapes this toolkit produces (Bellman equality blocks plus a few
// coupling rows).
inline LpSolution solve_lp(const LpProblem& p, double tol = 1e-9, int max_iter = 200) {
    const int n = p.num_vars();
    const int m = p.num_rows();
    const auto& lo = p.lower();
    const auto& up = p.upper();

    Eigen::SparseMatrix<double> A(m, n);
    A.setFromTriplets(p.entries().begin(), p.entries().end());
    Eigen::SparseMatrix<double> At = A.transpose();
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(p.rhs().data(), m);
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(p.costs().data(), n);

    auto has_lo = [&](int i) { return std::isfinite(lo[i]); };
    auto has_up = [&](int i) { return std::isfinite(up[i]); };

    Eigen::VectorXd x(n), y = Eigen::VectorXd::Zero(m), zl(n), zu(n);
    int bound_count = 0;
    for (int i = 0; i < n; ++i) {
        double xi = 0.0;
        if (has_lo(i) && has_up(i)) xi = 0.5 * (lo[i] + up[i]);
        else if (has_lo(i)) xi = lo[i] + 1.0;
        else if (has_up(i)) xi = up[i] - 1.0;
        x[i] = xi;
        zl[i] = has_lo(i) ? 1.0 : 0.0;
        zu[i] = has_up(i) ? 1.0 : 0.0;
        bound_count += has_lo(i) + has_up(i);
    }
    if (bound_count == 0) bound_count = 1;

    const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
    const double cnorm = 1.0 + c.lpNorm<Eigen::Infinity>();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    LpSolution out;

    double best_primal_res = kLpInfinity;
    int stalled = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd f(n), g(n);
        for (int i = 0; i < n; ++i) {
            f[i] = has_lo(i) ? x[i] - lo[i] : 1.0;
            g[i] = has_up(i) ? up[i] - x[i] : 1.0;
        }

        Eigen::VectorXd rp = b - A * x;
        Eigen::VectorXd rd = c - At * y;
        double mu = 0.0;
        for (int i = 0; i < n; ++i) {
            if (has_lo(i)) { rd[i] -= zl[i]; mu += f[i] * zl[i]; }
            if (has_up(i)) { rd[i] += zu[i]; mu += g[i] * zu[i]; }
        }
        mu /= bound_count;

        double obj = c.dot(x);
        double dual_obj = b.dot(y);
        for (int i = 0; i < n; ++i) {
            if (has_lo(i)) dual_obj += lo[i] * zl[i];
            if (has_up(i)) dual_obj -= up[i] * zu[i];
        }
        double gap = std::abs(obj - dual_obj) / (1.0 + std::abs(obj));
        double pres = rp.lpNorm<Eigen::Infinity>() / bnorm;
        double dres = rd.lpNorm<Eigen::Infinity>() / cnorm;

        if (pres < tol && dres < tol && gap < tol) {
            out.x.assign(x.data(), x.data() + n);
            out.objective = obj;
            out.duality_gap = gap;
            return out;
        }

        auto bail = [&](LpStatus fallback) {
            out.status = !(pres <= 1e-6) ? LpStatus::Infeasible : fallback; // NaN counts as stuck
            out.x.assign(x.data(), x.data() + n);
            out.objective = c.dot(x);
            out.duality_gap = gap;
            return out;
        };
        if (!x.allFinite() || !y.allFinite()) return bail(LpStatus::Infeasible);
        if (pres < best_primal_res * 0.999) { best_primal_res = pres; stalled = 0; }
        else if (++stalled > 30) {
            // No progress on feasibility: the instance is either infeasible or
            // dual-degenerate beyond what this method resolves.
            return bail(LpStatus::Unbounded);
        }

        // Assemble the augmented system with regularization. The sparsity
        // pattern never changes, so the symbolic analysis is done once.
        const double dp = 1e-10, dd = 1e-10;
        std::vector<Eigen::Triplet<double>> kkt;
        kkt.reserve(p.entries().size() * 2 + n + m);
        for (int i = 0; i < n; ++i) {
            double d = dp;
            if (has_lo(i)) d += zl[i] / f[i];
            if (has_up(i)) d += zu[i] / g[i];
            kkt.emplace_back(i, i, -d);
        }
        for (const auto& t : p.entries()) {
            kkt.emplace_back(n + t.row(), t.col(), t.value());
            kkt.emplace_back(t.col(), n + t.row(), t.value());
        }
        for (int j = 0; j < m; ++j) kkt.emplace_back(n + j, n + j, dd);
        Eigen::SparseMatrix<double> K(n + m, n + m);
        K.setFromTriplets(kkt.begin(), kkt.end());
        if (iter == 0) lu.analyzePattern(K);
        lu.factorize(K);
        // The factorization only degenerates when complementarity products
        // blow up chasing an unreachable feasible set.
        if (lu.info() != Eigen::Success) return bail(LpStatus::Unbounded);

        auto solve_step = [&](const Eigen::VectorXd& rczl, const Eigen::VectorXd& rczu)
            -> std::tuple<Eigen::VectorXd, Eigen::VectorXd, Eigen::VectorXd, Eigen::VectorXd> {
            Eigen::VectorXd rhs(n + m);
            for (int i = 0; i < n; ++i) {
                double v = rd[i];
                if (has_lo(i)) v -= rczl[i] / f[i];
                if (has_up(i)) v += rczu[i] / g[i];
                rhs[i] = v;
            }
            rhs.tail(m) = rp;
            Eigen::VectorXd sol = lu.solve(rhs);
            Eigen::VectorXd dx = sol.head(n), dy = sol.tail(m);
            Eigen::VectorXd dzl = Eigen::VectorXd::Zero(n), dzu = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i) {
                if (has_lo(i)) dzl[i] = (rczl[i] - zl[i] * dx[i]) / f[i];
                if (has_up(i)) dzu[i] = (rczu[i] + zu[i] * dx[i]) / g[i];
            }
            return {dx, dy, dzl, dzu};
        };

        auto step_lengths = [&](const Eigen::VectorXd& dx, const Eigen::VectorXd& dzl,
                                const Eigen::VectorXd& dzu) {
            double ap = 1.0, ad = 1.0;
            for (int i = 0; i < n; ++i) {
                if (has_lo(i)) {
                    if (dx[i] < 0) ap = std::min(ap, -f[i] / dx[i]);
                    if (dzl[i] < 0) ad = std::min(ad, -zl[i] / dzl[i]);
                }
                if (has_up(i)) {
                    if (dx[i] > 0) ap = std::min(ap, g[i] / dx[i]);
                    if (dzu[i] < 0) ad = std::min(ad, -zu[i] / dzu[i]);
                }
            }
            return std::pair{ap, ad};
        };

        // Predictor.
        Eigen::VectorXd rczl(n), rczu(n);
        for (int i = 0; i < n; ++i) {
            rczl[i] = has_lo(i) ? -f[i] * zl[i] : 0.0;
            rczu[i] = has_up(i) ? -g[i] * zu[i] : 0.0;
        }
        auto [dxa, dya, dzla, dzua] = solve_step(rczl, rczu);
        auto [apa, ada] = step_lengths(dxa, dzla, dzua);
        double mu_aff = 0.0;
        for (int i = 0; i < n; ++i) {
            if (has_lo(i)) mu_aff += (f[i] + apa * dxa[i]) * (zl[i] + ada * dzla[i]);
            if (has_up(i)) mu_aff += (g[i] - apa * dxa[i]) * (zu[i] + ada * dzua[i]);
        }
        mu_aff /= bound_count;
        double sigma = mu > 0 ? std::pow(mu_aff / mu, 3.0) : 0.0;
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector.
        for (int i = 0; i < n; ++i) {
            if (has_lo(i)) rczl[i] = sigma * mu - f[i] * zl[i] - dxa[i] * dzla[i];
            if (has_up(i)) rczu[i] = sigma * mu - g[i] * zu[i] + dxa[i] * dzua[i];
        }
        auto [dx, dy, dzl, dzu] = solve_step(rczl, rczu);
        auto [ap, ad] = step_lengths(dx, dzl, dzu);
        ap = std::min(1.0, 0.9995 * ap);
        ad = std::min(1.0, 0.9995 * ad);

        x += ap * dx;
        y += ad * dy;
        for (int i = 0; i < n; ++i) {
            if (has_lo(i)) zl[i] = std::max(zl[i] + ad * dzl[i], 1e-300);
            if (has_up(i)) zu[i] = std::max(zu[i] + ad * dzu[i], 1e-300);
        }
    }
    throw NumericError("LP solver hit the iteration limit");
}

} // namespace scenv

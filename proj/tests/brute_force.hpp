// Brute-force reference implementations shared by the unit tests and the
// acceptance run.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gbas/lp_solver.hpp"

namespace oracle {

using gbas::lp::LinearProgram;

struct Brute {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
};

// Every vertex is the intersection of n active constraints taken from the rows
// and the 2n bounds; the optimum of a bounded LP sits on one of them.
inline Brute enumerate_vertices(const LinearProgram& lp)
{
    const int n = static_cast<int>(lp.num_vars());
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        a.push_back(lp.rows[i]);
        b.push_back(lp.rhs[i]);
    }
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(j)] = 1.0;
        a.push_back(e);
        b.push_back(lp.upper[static_cast<std::size_t>(j)]);
        e[static_cast<std::size_t>(j)] = -1.0;
        a.push_back(e);
        b.push_back(-lp.lower[static_cast<std::size_t>(j)]);
    }
    const int m = static_cast<int>(a.size());

    Brute best;
    std::vector<int> pick(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        Eigen::MatrixXd am(n, n);
        Eigen::VectorXd bm(n);
        for (int r = 0; r < n; ++r) {
            const auto k = static_cast<std::size_t>(pick[static_cast<std::size_t>(r)]);
            for (int c = 0; c < n; ++c) am(r, c) = a[k][static_cast<std::size_t>(c)];
            bm(r) = b[k];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(am);
        if (lu.isInvertible()) {
            const Eigen::VectorXd x = lu.solve(bm);
            bool ok = true;
            for (int k = 0; k < m && ok; ++k) {
                double lhs = 0.0;
                for (int c = 0; c < n; ++c) lhs += a[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] * x(c);
                ok = lhs <= b[static_cast<std::size_t>(k)] + 1e-9 * (1.0 + std::abs(b[static_cast<std::size_t>(k)]));
            }
            if (ok) {
                double obj = 0.0;
                for (int c = 0; c < n; ++c) obj += lp.objective[static_cast<std::size_t>(c)] * x(c);
                best.feasible = true;
                best.objective = std::min(best.objective, obj);
            }
        }
        // next combination
        int i = n - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - n + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

inline LinearProgram random_lp(std::mt19937& rng, bool make_infeasible)
{
    std::uniform_int_distribution<int> nv(1, 4), nr(0, 12), small(-3, 3);
    std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.5, 3.0);
    std::bernoulli_distribution integer_coeffs(0.3);
    LinearProgram lp;
    const int n = nv(rng);
    const int m = nr(rng);
    const bool ints = integer_coeffs(rng);  // integer data gives degenerate vertices
    std::vector<double> x0;
    for (int j = 0; j < n; ++j) {
        const double lo = ints ? small(rng) : u(rng);
        const double width = ints ? std::abs(small(rng)) + 1.0 : w(rng);
        lp.lower.push_back(lo);
        lp.upper.push_back(lo + width);
        lp.objective.push_back(ints ? small(rng) : u(rng));
        x0.push_back(lo + 0.5 * width);
    }
    for (int i = 0; i < m; ++i) {
        std::vector<double> row;
        double at_x0 = 0.0;
        for (int j = 0; j < n; ++j) {
            row.push_back(ints ? small(rng) : u(rng));
            at_x0 += row.back() * x0[static_cast<std::size_t>(j)];
        }
        // the box centre stays feasible, sometimes exactly on the row
        const double slack = ints ? (i % 3 == 0 ? 0.0 : 1.0) : std::abs(u(rng));
        lp.add_row(row, at_x0 + slack);
    }
    if (make_infeasible) {
        std::vector<double> row;
        double box_min = 0.0;
        for (int j = 0; j < n; ++j) {
            row.push_back(1.0 + j);
            box_min += row.back() * lp.lower[static_cast<std::size_t>(j)];
        }
        lp.add_row(row, box_min - 0.5);
    }
    return lp;
}

// Walks every error vector with at most two hit satellites, each hit being
// -c eps or +eps, and keeps the largest vertical error.
inline double corner_oracle(const std::vector<double>& s, const std::vector<double>& eps, double c)
{
    const std::size_t n = s.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    double worst = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        int hits = 0;
        double v = 0.0;
        bool first = true;
        for (std::size_t i = 0; i < n; ++i, rest /= 3) {
            const auto digit = rest % 3;
            if (digit == 0) continue;
            ++hits;
            const double term = (digit == 1 ? -c * eps[i] : eps[i]) * s[i];
            v = first ? term : v + term;
            first = false;
        }
        if (hits <= 2) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

}  // namespace oracle

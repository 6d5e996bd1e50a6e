#ifndef RESERVOIR_LP_ORACLE_HPP
#define RESERVOIR_LP_ORACLE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "reservoir/lp.hpp"

namespace reservoir::lp {

inline constexpr std::size_t kOracleMaxVariables = 12;

namespace detail {

struct Hyperplane {
    std::vector<double> a;
    double b = 0.0;
};

// Gaussian elimination with partial pivoting; false when (numerically) singular.
inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (std::abs(a[p][c]) < 1e-10) return false;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return true;
}

struct EnumerationResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> point;
};

inline EnumerationResult enumerate_vertices(const Problem& p, double box) {
    const std::size_t n = p.variables.size();
    std::vector<double> lo(n), up(n);
    std::vector<Hyperplane> planes;
    for (std::size_t j = 0; j < n; ++j) {
        lo[j] = std::isfinite(p.variables[j].lower) ? p.variables[j].lower : -box;
        up[j] = std::isfinite(p.variables[j].upper) ? p.variables[j].upper : box;
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        planes.push_back({e, lo[j]});
        if (up[j] != lo[j]) planes.push_back({e, up[j]});
    }
    for (const auto& c : p.constraints) {
        std::vector<double> a(n, 0.0);
        for (const auto& t : c.terms) a[t.var] += t.coef;
        planes.push_back({std::move(a), c.rhs});
    }

    auto feasible = [&](const std::vector<double>& x) {
        for (std::size_t j = 0; j < n; ++j) {
            double tol = 1e-9 * (1.0 + std::abs(x[j]));
            if (x[j] < lo[j] - tol || x[j] > up[j] + tol) return false;
        }
        for (const auto& c : p.constraints) {
            double lhs = 0.0, scale = 1.0 + std::abs(c.rhs);
            for (const auto& t : c.terms) lhs += t.coef * x[t.var], scale += std::abs(t.coef * x[t.var]);
            double d = lhs - c.rhs, tol = 1e-9 * scale;
            if (c.relation == Relation::less_equal && d > tol) return false;
            if (c.relation == Relation::greater_equal && d < -tol) return false;
            if (c.relation == Relation::equal && std::abs(d) > tol) return false;
        }
        return true;
    };

    EnumerationResult best;
    if (n == 0) {
        best.feasible = feasible({});
        return best;
    }
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    const std::size_t h = planes.size();
    if (h < n) return best;
    std::vector<std::vector<double>> a(n);
    std::vector<double> b(n), x;
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) a[i] = planes[pick[i]].a, b[i] = planes[pick[i]].b;
        if (solve_square(a, b, x) && feasible(x)) {
            double z = p.objective_at(x);
            if (!best.feasible || z > best.objective) best = {true, z, x};
        }
        // next combination
        std::size_t i = n;
        while (i-- > 0) {
            if (pick[i] != i + h - n) break;
            if (i == 0) return best;
        }
        if (pick[i] == i + h - n) return best;
        ++pick[i];
        for (std::size_t k = i + 1; k < n; ++k) pick[k] = pick[k - 1] + 1;
    }
}

}  // namespace detail

/**
 * Reference solver for small problems: enumerates every intersection of
 * `variables` many hyperplanes (constraints and finite bounds), keeps the
 * feasible ones and returns the best. Unboxed variables are clipped to a
 * large synthetic box; an optimum that moves when the box grows is reported
 * as unbounded.
 */
inline Solution oracle_solve(const Problem& p) {
    validate(p);
    if (p.variables.size() > kOracleMaxVariables)
        throw std::invalid_argument("oracle_solve: problem exceeds the variable cap");
    bool boxed = true;
    for (const auto& v : p.variables) boxed = boxed && std::isfinite(v.lower) && std::isfinite(v.upper);

    Solution out;
    auto r = detail::enumerate_vertices(p, 1e6);
    if (!r.feasible) {
        out.status = Status::infeasible;
        return out;
    }
    if (!boxed) {
        auto wider = detail::enumerate_vertices(p, 1e7);
        if (wider.objective > r.objective + 1e-6 * (1.0 + std::abs(r.objective))) {
            out.status = Status::unbounded;
            return out;
        }
    }
    out.status = Status::optimal;
    out.values = std::move(r.point);
    out.objective = r.objective;
    return out;
}

}  // namespace reservoir::lp

#endif  // RESERVOIR_LP_ORACLE_HPP

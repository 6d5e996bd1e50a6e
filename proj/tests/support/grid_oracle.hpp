#ifndef RESERVOIR_TESTS_GRID_ORACLE_HPP
#define RESERVOIR_TESTS_GRID_ORACLE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "reservoir/builtin.hpp"
#include "support/generators.hpp"

namespace reservoir::testing {

struct GridRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct GridResult {
    std::vector<double> point;
    double value = -std::numeric_limits<double>::infinity();
};

/**
 * Maximizes `f` over a box by exhaustive grid search: a coarse pass at
 * `coarse` spacing, then a pass at `fine` spacing over a window of one coarse
 * step around the coarse winner. `f` returns nullopt for infeasible points.
 * Exact for concave objectives up to the fine spacing.
 */
inline GridResult grid_search(const std::vector<GridRange>& box,
                              const std::function<std::optional<double>(const std::vector<double>&)>& f,
                              double coarse = 0.1, double fine = 1e-3) {
    auto pass = [&](const std::vector<GridRange>& b, double step) {
        GridResult best;
        std::vector<std::size_t> counts, idx(b.size(), 0);
        for (const auto& r : b) counts.push_back(static_cast<std::size_t>(std::floor((r.hi - r.lo) / step + 1e-9)) + 1);
        std::vector<double> x(b.size());
        for (;;) {
            for (std::size_t i = 0; i < b.size(); ++i) x[i] = std::min(b[i].hi, b[i].lo + step * static_cast<double>(idx[i]));
            if (auto v = f(x); v && *v > best.value) best = {x, *v};
            std::size_t i = 0;
            for (; i < b.size(); ++i) {
                if (++idx[i] < counts[i]) break;
                idx[i] = 0;
            }
            if (i == b.size()) break;
        }
        return best;
    };
    GridResult best = pass(box, coarse);
    if (best.point.empty()) return best;
    std::vector<GridRange> window;
    for (std::size_t i = 0; i < box.size(); ++i)
        window.push_back({std::max(box[i].lo, best.point[i] - coarse), std::min(box[i].hi, best.point[i] + coarse)});
    GridResult refined = pass(window, fine);
    return refined.value > best.value ? refined : best;
}

/// One reservoir, one period, inflow 2, v0 = 5, V = 0, M = 10, profit slope 1 capped at 10.
inline Scenario single_reservoir_example(DiscreteDistribution inflow = DiscreteDistribution::point_mass(2.0)) {
    Scenario s;
    s.name = "single";
    s.periods = 1;
    s.reservoirs = {{10.0, 5.0, 0.0, Provenance::user}};
    s.profit = {{capped_linear(1.0, 10.0)}};
    s.risk = {{hinge(1.0)}};
    s.transfer_cost = {{}};
    s.inflow = {{std::move(inflow)}};
    return s;
}

/// Two reservoirs, two periods, no inflow, v0 = (4, 0), demand only at reservoir 2, link 1 -> 2 of capacity 5.
inline Scenario two_reservoir_example() {
    Scenario s;
    s.name = "pair";
    s.periods = 2;
    s.reservoirs = {{10.0, 4.0, 0.0, Provenance::user}, {10.0, 0.0, 0.0, Provenance::user}};
    s.links = {{0, 1, 5.0, Provenance::user}};
    s.profit = make_grid(2, 2, PwlFunction());
    s.profit[0][1] = s.profit[1][1] = capped_linear(1.0, 10.0);
    s.risk = make_grid(2, 2, hinge(1.0));
    s.transfer_cost = make_grid(2, 1, linear_function(0.25));
    s.inflow = make_grid(2, 2, DiscreteDistribution::point_mass(0.0));
    return s;
}

/// Grid oracle for the single-reservoir example: searches the release.
inline GridResult single_reservoir_oracle(const Scenario& s, double big_f) {
    return grid_search({{0.0, 10.0}}, [&](const std::vector<double>& x) {
        Plan p = empty_plan(s);
        p.release[0][0] = x[0];
        p.inflow[0][0] = distribution_mean(s.inflow[0][0]);
        return direct_objective(s, p, big_f, false);
    });
}

/// Grid oracle for the two-reservoir example: searches (q_12 at t=1, g_2 at t=2).
inline GridResult two_reservoir_oracle(const Scenario& s, double big_f) {
    return grid_search({{0.0, 5.0}, {0.0, 10.0}}, [&](const std::vector<double>& x) {
        Plan p = empty_plan(s);
        p.transfer[0][0] = x[0];
        p.release[1][1] = x[1];
        return direct_objective(s, p, big_f, false);
    });
}

}  // namespace reservoir::testing

#endif  // RESERVOIR_TESTS_GRID_ORACLE_HPP

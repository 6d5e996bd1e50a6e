#ifndef RESERVOIR_BUILTIN_HPP
#define RESERVOIR_BUILTIN_HPP

// Built-in experiment networks.
//
// Quantities taken from the published experiment descriptions carry
// Provenance::published. The inflow distributions, demand caps, slopes of the
// two-reservoir cases, and the Ang-Puang topology/capacities/initial volumes
// were only published graphically, so the values below are reconstructions
// with the described qualitative structure and carry Provenance::reconstructed.

#include <stdexcept>
#include <string>
#include <vector>

#include "reservoir/model.hpp"
#include "reservoir/pwl.hpp"
#include "reservoir/scenario_io.hpp"

namespace reservoir {

namespace detail {

inline DiscreteDistribution dist(std::vector<SupportPoint> pts, Provenance p = Provenance::reconstructed) {
    return {std::move(pts), p};
}

inline void add_bidirectional(Scenario& s, std::size_t a, std::size_t b, double capacity, Provenance p) {
    s.links.push_back({a, b, capacity, p});
    s.links.push_back({b, a, capacity, p});
}

inline void fill_uniform_functions(Scenario& s, const PwlFunction& profit, const PwlFunction& risk,
                                   const PwlFunction& cost) {
    s.profit = make_grid(s.periods, s.reservoirs.size(), profit);
    s.risk = make_grid(s.periods, s.reservoirs.size(), risk);
    s.transfer_cost = make_grid(s.periods, s.links.size(), cost);
}

}  // namespace detail

/**
 * Two-reservoir network, T = 3, M = 10, Q12 = Q21 = 5, v0 = V = 1.
 *
 * Case 1 is the high-risk (conservative) regime, case 2 the low-risk,
 * cheap-transfer regime where reservoir 1 very likely receives a large
 * inflow in period 1. In both cases reservoir 2 surely gets no inflow in
 * period 2 and every other (n, t) shares one distribution.
 */
inline Scenario builtin_simple(int which) {
    if (which != 1 && which != 2) throw std::invalid_argument("builtin_simple: case must be 1 or 2");
    Scenario s;
    s.name = "simple" + std::to_string(which);
    s.periods = 3;
    s.reservoirs = {{10.0, 1.0, 1.0, Provenance::published}, {10.0, 1.0, 1.0, Provenance::published}};
    detail::add_bidirectional(s, 0, 1, 5.0, Provenance::published);

    DiscreteDistribution common, first;
    double profit_slope, demand_cap, risk_slope, cost_slope;
    if (which == 1) {
        profit_slope = 1.0, demand_cap = 2.5, risk_slope = 3.0, cost_slope = 0.25;
        common = detail::dist({{0.0, 0.25}, {1.0, 0.35}, {2.0, 0.25}, {4.0, 0.15}});
        first = detail::dist({{1.0, 0.2}, {4.0, 0.3}, {7.0, 0.5}});
    } else {
        profit_slope = 1.0, demand_cap = 2.5, risk_slope = 1.25, cost_slope = 0.1;
        common = detail::dist({{0.0, 0.25}, {1.0, 0.35}, {2.0, 0.25}, {4.0, 0.15}});
        first = detail::dist({{1.0, 0.15}, {8.0, 0.85}});
    }
    detail::fill_uniform_functions(s, capped_linear(profit_slope, demand_cap), hinge(risk_slope),
                                   linear_function(cost_slope));
    s.profit_provenance = s.risk_provenance = s.cost_provenance = Provenance::reconstructed;

    s.inflow = make_grid(s.periods, 2, common);
    s.inflow[0][0] = first;
    s.inflow[1][1] = DiscreteDistribution::point_mass(0.0, Provenance::published);
    return s;
}

/**
 * Ang-Puang network: N = 8, T = 6, Q = 2.5 on every link, profit slope 1,
 * transfer cost slope 0.25, risk slope 2.5. Reservoirs 1, 4 and 8 are the
 * big ones. Inflow is substantial in periods 1-2 and zero afterwards.
 */
inline Scenario builtin_angpuang() {
    constexpr std::size_t N = 8;
    Scenario s;
    s.name = "angpuang";
    s.periods = 6;
    const auto R = Provenance::reconstructed;

    const double capacity[N] = {30.0, 8.0, 6.0, 25.0, 7.0, 5.0, 6.0, 35.0};
    const bool big[N] = {true, false, false, true, false, false, false, true};
    for (std::size_t n = 0; n < N; ++n) {
        double v0 = big[n] ? 0.2 * capacity[n] : 0.1 * capacity[n];
        s.reservoirs.push_back({capacity[n], v0, v0, R});
    }

    // Each big reservoir feeds its neighbouring small ones; big ones are chained.
    const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {0, 2}, {3, 2}, {3, 4}, {3, 5},
                                                         {7, 5}, {7, 6}, {0, 3}, {3, 7}};
    for (auto [a, b] : pairs) detail::add_bidirectional(s, a, b, 2.5, R);

    // Demand caps per period: higher in the dry periods.
    const double cap_big[6] = {3.0, 3.0, 4.0, 4.0, 4.0, 3.0};
    const double cap_small[6] = {1.0, 1.0, 2.0, 2.0, 2.0, 1.5};
    s.profit.assign(s.periods, {});
    for (std::size_t t = 0; t < s.periods; ++t)
        for (std::size_t n = 0; n < N; ++n) s.profit[t].push_back(capped_linear(1.0, big[n] ? cap_big[t] : cap_small[t]));
    s.risk = make_grid(s.periods, N, hinge(2.5));
    s.transfer_cost = make_grid(s.periods, s.links.size(), linear_function(0.25));
    s.profit_provenance = R;  // slope quoted, caps reconstructed
    s.risk_provenance = Provenance::published;
    s.cost_provenance = Provenance::published;

    s.inflow.assign(s.periods, {});
    for (std::size_t t = 0; t < s.periods; ++t) {
        for (std::size_t n = 0; n < N; ++n) {
            if (t >= 2) {
                s.inflow[t].push_back(DiscreteDistribution::point_mass(0.0, Provenance::published));
                continue;
            }
            const double M = capacity[n];
            // Wet season: mostly large inflows, with a real chance of a poor season.
            DiscreteDistribution d =
                big[n] ? detail::dist({{0.1 * M, 0.15}, {0.3 * M, 0.2}, {0.5 * M, 0.35}, {0.7 * M, 0.3}})
                       : detail::dist({{0.1 * M, 0.2}, {0.4 * M, 0.3}, {0.7 * M, 0.5}});
            s.inflow[t].push_back(d);
        }
    }
    return s;
}

inline std::vector<std::string> builtin_names() { return {"simple1", "simple2", "angpuang"}; }

inline Scenario builtin_scenario(const std::string& name) {
    if (name == "simple1") return builtin_simple(1);
    if (name == "simple2") return builtin_simple(2);
    if (name == "angpuang") return builtin_angpuang();
    throw std::invalid_argument("unknown builtin scenario '" + name + "'");
}

/// Accepts "builtin:<name>" or a path to a scenario file.
inline Scenario resolve_scenario(const std::string& ref) {
    const std::string prefix = "builtin:";
    if (ref.rfind(prefix, 0) == 0) {
        Scenario s = builtin_scenario(ref.substr(prefix.size()));
        require_valid(s);
        return s;
    }
    return load_scenario(ref);
}

}  // namespace reservoir

#endif  // RESERVOIR_BUILTIN_HPP

#ifndef RESERVOIR_FORMULATION_HPP
#define RESERVOIR_FORMULATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reservoir/lp.hpp"
#include "reservoir/model.hpp"
#include "reservoir/pwl.hpp"

namespace reservoir {

enum class Method { proposed, deterministic };

inline const char* to_string(Method m) { return m == Method::proposed ? "proposed" : "deterministic"; }

inline Method parse_method(const std::string& s) {
    if (s == "proposed") return Method::proposed;
    if (s == "deterministic") return Method::deterministic;
    throw std::invalid_argument("unknown method '" + s + "' (expected proposed or deterministic)");
}

/// LP column of every semantic variable. Grids are [t][n] or [t][link].
struct VariableMap {
    PeriodGrid<std::size_t> transfer;
    PeriodGrid<std::size_t> release;
    PeriodGrid<std::size_t> inflow;
    PeriodGrid<std::size_t> volume;
    PeriodGrid<std::size_t> profit_hypograph;
    PeriodGrid<std::size_t> cost_epigraph;
    PeriodGrid<std::size_t> overflow;
    /// [t][n][k] per support point; empty for the deterministic build.
    std::vector<std::vector<std::vector<std::size_t>>> risk_epigraph;
    std::size_t variable_count = 0;
};

struct Formulation {
    lp::Problem problem;
    VariableMap map;
    Method method = Method::proposed;
};

inline constexpr double kDefaultPenaltyFactor = 1000.0;

/// Largest slope among the profit functions' supporting lines.
inline double max_profit_slope(const Scenario& s) {
    double m = 0.0;
    for (const auto& row : s.profit)
        for (const auto& g : row)
            for (const auto& c : cuts(g)) m = std::max(m, std::abs(c.slope));
    return m;
}

/// Overflow penalty per (t, n): the scenario's own grid, else 1000 x the largest profit slope.
inline PeriodGrid<double> effective_penalty(const Scenario& s, std::optional<double> override_value = std::nullopt) {
    if (override_value) {
        if (!(*override_value > 0.0)) throw std::invalid_argument("overflow penalty must be positive");
        return make_grid(s.periods, s.reservoirs.size(), *override_value);
    }
    if (s.penalty) return *s.penalty;
    double slope = max_profit_slope(s);
    double f = kDefaultPenaltyFactor * (slope > 0.0 ? slope : 1.0);
    return make_grid(s.periods, s.reservoirs.size(), f);
}

namespace detail {

inline std::string vname(const char* prefix, std::size_t t, std::size_t a) {
    return std::string(prefix) + "_t" + std::to_string(t + 1) + "_" + std::to_string(a + 1);
}

inline bool flat(double slope) { return std::abs(slope) <= kSlopeTolerance; }

inline Formulation build(const Scenario& s, Method method, std::optional<double> big_f) {
    require_valid(s);
    using lp::kInf;
    using lp::Relation;
    const std::size_t T = s.periods, N = s.reservoirs.size(), L = s.links.size();
    const auto penalty = effective_penalty(s, big_f);

    Formulation f;
    f.method = method;
    f.problem.name = method == Method::proposed ? "RESERVOIR_PROPOSED" : "RESERVOIR_DETERMINISTIC";
    auto& P = f.problem;
    auto& V = f.map;
    V.transfer = make_grid<std::size_t>(T, L, 0);
    V.cost_epigraph = V.transfer;
    V.release = make_grid<std::size_t>(T, N, 0);
    V.inflow = V.volume = V.profit_hypograph = V.overflow = V.release;

    // Variables.
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t l = 0; l < L; ++l) {
            const auto& k = s.links[l];
            V.transfer[t][l] = P.add_variable(
                "q_t" + std::to_string(t + 1) + "_" + std::to_string(k.from + 1) + "_" + std::to_string(k.to + 1), 0.0,
                k.capacity);
        }
        for (std::size_t n = 0; n < N; ++n) {
            V.release[t][n] = P.add_variable(vname("g", t, n), 0.0, kInf);
            const auto& d = s.inflow[t][n];
            double lo, hi;
            if (method == Method::proposed) {
                std::tie(lo, hi) = distribution_bounds(d);
            } else {
                lo = hi = distribution_mean(d);
            }
            V.inflow[t][n] = P.add_variable(vname("x", t, n), lo, hi);
            double vlo = (t + 1 == T) ? std::max(0.0, s.reservoirs[n].final_min_volume) : 0.0;
            V.volume[t][n] = P.add_variable(vname("v", t, n), vlo, kInf);
            V.overflow[t][n] = P.add_variable(vname("w", t, n), 0.0, kInf, -penalty[t][n]);
        }
    }

    // Hypograph of each concave profit: u <= slope*g + intercept; flat cuts become bounds.
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t n = 0; n < N; ++n) {
            double ub = kInf;
            std::vector<Cut> sloped;
            for (const auto& c : cuts(s.profit[t][n])) {
                if (flat(c.slope)) ub = std::min(ub, c.intercept);
                else sloped.push_back(c);
            }
            std::size_t u = P.add_variable(vname("u", t, n), -kInf, ub, 1.0);
            V.profit_hypograph[t][n] = u;
            for (std::size_t k = 0; k < sloped.size(); ++k)
                P.add_constraint(vname("hyp", t, n) + "_" + std::to_string(k + 1),
                                 {{u, 1.0}, {V.release[t][n], -sloped[k].slope}}, Relation::less_equal,
                                 sloped[k].intercept);
        }
        // Epigraph of each convex transfer cost: y >= slope*q + intercept.
        for (std::size_t l = 0; l < L; ++l) {
            double lb = -kInf;
            std::vector<Cut> sloped;
            for (const auto& c : cuts(s.transfer_cost[t][l])) {
                if (flat(c.slope)) lb = std::max(lb, c.intercept);
                else sloped.push_back(c);
            }
            std::size_t y = P.add_variable(vname("y", t, l), lb, kInf, -1.0);
            V.cost_epigraph[t][l] = y;
            for (std::size_t k = 0; k < sloped.size(); ++k)
                P.add_constraint(vname("epi", t, l) + "_" + std::to_string(k + 1),
                                 {{y, 1.0}, {V.transfer[t][l], -sloped[k].slope}}, Relation::greater_equal,
                                 sloped[k].intercept);
        }
    }

    // Expected risk over the discretized inflow: rho_k >= R(x - x_k) for every support point.
    if (method == Method::proposed) {
        V.risk_epigraph.assign(T, std::vector<std::vector<std::size_t>>(N));
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t n = 0; n < N; ++n) {
                const auto rc = cuts(s.risk[t][n]);
                const auto& d = s.inflow[t][n];
                for (std::size_t k = 0; k < d.support.size(); ++k) {
                    const double xk = d.support[k].value;
                    double lb = -kInf;
                    std::vector<Cut> sloped;
                    for (const auto& c : rc) {
                        // R(x - xk) >= slope*(x - xk) + intercept
                        if (flat(c.slope)) lb = std::max(lb, c.intercept);
                        else sloped.push_back(c);
                    }
                    std::string base = vname("rho", t, n) + "_" + std::to_string(k + 1);
                    std::size_t r = P.add_variable(base, lb, kInf, -d.support[k].probability);
                    V.risk_epigraph[t][n].push_back(r);
                    for (std::size_t c = 0; c < sloped.size(); ++c)
                        P.add_constraint(base + "_c" + std::to_string(c + 1), {{r, 1.0}, {V.inflow[t][n], -sloped[c].slope}},
                                         Relation::greater_equal, sloped[c].intercept - sloped[c].slope * xk);
                }
            }
        }
    }

    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t n = 0; n < N; ++n) {
            // State: v_t - v_{t-1} + g_t - x_t - sum_in q + sum_out q = 0 (v_0 is a constant).
            std::vector<lp::Term> state{{V.volume[t][n], 1.0}, {V.release[t][n], 1.0}, {V.inflow[t][n], -1.0}};
            std::vector<lp::Term> budget{{V.release[t][n], 1.0}};
            double state_rhs = 0.0, budget_rhs = 0.0;
            if (t == 0) {
                state_rhs = s.reservoirs[n].initial_volume;
                budget_rhs = s.reservoirs[n].initial_volume;
            } else {
                state.push_back({V.volume[t - 1][n], -1.0});
                budget.push_back({V.volume[t - 1][n], -1.0});
            }
            for (std::size_t l = 0; l < L; ++l) {
                if (s.links[l].to == n) state.push_back({V.transfer[t][l], -1.0});
                if (s.links[l].from == n) {
                    state.push_back({V.transfer[t][l], 1.0});
                    budget.push_back({V.transfer[t][l], 1.0});
                }
            }
            P.add_constraint(vname("state", t, n), std::move(state), Relation::equal, state_rhs);
            // Release plus outgoing transfers cannot exceed the previous volume.
            P.add_constraint(vname("budget", t, n), std::move(budget), Relation::less_equal, budget_rhs);
            // Overflow slack: w >= v - M.
            P.add_constraint(vname("spill", t, n), {{V.overflow[t][n], 1.0}, {V.volume[t][n], -1.0}},
                             Relation::greater_equal, -s.reservoirs[n].max_volume);
        }
    }
    V.variable_count = P.variables.size();
    return f;
}

}  // namespace detail

/// Risk-aware program: inflow predictions are decisions bounded by their support.
inline Formulation build_proposed(const Scenario& s, std::optional<double> big_f = std::nullopt) {
    return detail::build(s, Method::proposed, big_f);
}

/// Baseline program: inflows pinned to their means, no risk terms.
inline Formulation build_deterministic(const Scenario& s, std::optional<double> big_f = std::nullopt) {
    return detail::build(s, Method::deterministic, big_f);
}

inline Formulation build_formulation(const Scenario& s, Method m, std::optional<double> big_f = std::nullopt) {
    return detail::build(s, m, big_f);
}

class PlanError : public std::runtime_error {
public:
    explicit PlanError(lp::Status status)
        : std::runtime_error(std::string("no plan: solver status ") + lp::to_string(status)), status_(status) {}
    lp::Status status() const { return status_; }

private:
    lp::Status status_;
};

inline Plan extract_plan(const lp::Solution& sol, const VariableMap& map, const Scenario& s) {
    if (sol.status != lp::Status::optimal) throw PlanError(sol.status);
    Plan p = empty_plan(s);
    for (std::size_t t = 0; t < s.periods; ++t) {
        for (std::size_t l = 0; l < s.links.size(); ++l) p.transfer[t][l] = sol.values[map.transfer[t][l]];
        for (std::size_t n = 0; n < s.reservoirs.size(); ++n) {
            p.release[t][n] = sol.values[map.release[t][n]];
            p.inflow[t][n] = sol.values[map.inflow[t][n]];
            p.volume[t][n] = sol.values[map.volume[t][n]];
        }
    }
    p.planner_objective = sol.objective;
    return p;
}

/**
 * Replays a plan against the program's constraints: transfer capacities,
 * nonnegativity, budget, state equation, terminal volumes and the inflow
 * range of the given method. Returns every violation larger than `tol`.
 */
inline std::vector<std::string> check_plan(const Plan& p, const Scenario& s, Method method, double tol = 1e-6) {
    std::vector<std::string> out;
    if (!plan_matches(p, s)) return {"plan dimensions do not match the scenario"};
    const std::size_t T = s.periods, N = s.reservoirs.size(), L = s.links.size();
    auto where = [](const char* what, std::size_t t, std::size_t n) { return detail::vname(what, t, n); };
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t l = 0; l < L; ++l) {
            double q = p.transfer[t][l];
            if (q < -tol || q > s.links[l].capacity + tol) out.push_back(where("transfer capacity", t, l));
        }
        for (std::size_t n = 0; n < N; ++n) {
            double prev = t == 0 ? s.reservoirs[n].initial_volume : p.volume[t - 1][n];
            double in = 0.0, outq = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                if (s.links[l].to == n) in += p.transfer[t][l];
                if (s.links[l].from == n) outq += p.transfer[t][l];
            }
            if (p.release[t][n] < -tol) out.push_back(where("release sign", t, n));
            if (p.volume[t][n] < -tol) out.push_back(where("volume sign", t, n));
            if (p.release[t][n] + outq > prev + tol) out.push_back(where("budget", t, n));
            double state = prev - p.release[t][n] + p.inflow[t][n] + in - outq;
            if (std::abs(state - p.volume[t][n]) > tol) out.push_back(where("state", t, n));
            const auto& d = s.inflow[t][n];
            auto [lo, hi] = distribution_bounds(d);
            if (method == Method::deterministic) lo = hi = distribution_mean(d);
            if (p.inflow[t][n] < lo - tol || p.inflow[t][n] > hi + tol) out.push_back(where("inflow range", t, n));
        }
    }
    for (std::size_t n = 0; n < N; ++n)
        if (T > 0 && p.volume[T - 1][n] < s.reservoirs[n].final_min_volume - tol)
            out.push_back("terminal volume of reservoir " + std::to_string(n + 1));
    return out;
}

/// Total planned transfer volume over all links and periods.
inline double total_transfer(const Plan& p) {
    double s = 0.0;
    for (const auto& row : p.transfer)
        for (double q : row) s += q;
    return s;
}

struct PlanResult {
    Formulation formulation;
    lp::Solution solution;
    std::optional<Plan> plan;
};

/// Builds, solves and extracts in one step; `plan` is empty unless the solve is optimal.
inline PlanResult make_plan(const Scenario& s, Method m, std::optional<double> big_f = std::nullopt,
                            const lp::SimplexOptions& opt = {}) {
    PlanResult r{build_formulation(s, m, big_f), {}, std::nullopt};
    r.solution = lp::solve(r.formulation.problem, opt);
    if (r.solution.status == lp::Status::optimal) r.plan = extract_plan(r.solution, r.formulation.map, s);
    return r;
}

}  // namespace reservoir

#endif  // RESERVOIR_FORMULATION_HPP

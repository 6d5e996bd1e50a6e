#ifndef RESERVOIR_MODEL_HPP
#define RESERVOIR_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "reservoir/pwl.hpp"

namespace reservoir {

/// Values indexed [period][item], periods 0-based in memory (period t is index t-1).
template <class T>
using PeriodGrid = std::vector<std::vector<T>>;

template <class T>
PeriodGrid<T> make_grid(std::size_t periods, std::size_t items, const T& fill) {
    return PeriodGrid<T>(periods, std::vector<T>(items, fill));
}

/// Where a quantity came from: quoted figures, reconstructions of graphical data, or user input.
enum class Provenance { user, published, reconstructed };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::published: return "published";
        case Provenance::reconstructed: return "reconstructed";
        case Provenance::user: break;
    }
    return "user";
}

struct ReservoirSpec {
    double max_volume = 0.0;
    double initial_volume = 0.0;
    double final_min_volume = 0.0;
    Provenance provenance = Provenance::user;
    bool operator==(const ReservoirSpec&) const = default;
};

/// Directed pumping link; reservoir indices are 0-based.
struct LinkSpec {
    std::size_t from = 0;
    std::size_t to = 0;
    double capacity = 0.0;
    Provenance provenance = Provenance::user;
    bool operator==(const LinkSpec&) const = default;
};

struct SupportPoint {
    double value = 0.0;
    double probability = 0.0;
    bool operator==(const SupportPoint&) const = default;
};

/// Finite inflow distribution. Support sorted ascending with distinct values.
struct DiscreteDistribution {
    std::vector<SupportPoint> support;
    Provenance provenance = Provenance::user;

    static DiscreteDistribution point_mass(double value, Provenance p = Provenance::user) {
        return {{{value, 1.0}}, p};
    }

    bool is_point_mass() const { return support.size() == 1; }
    bool operator==(const DiscreteDistribution&) const = default;
};

inline double distribution_mean(const DiscreteDistribution& d) {
    double m = 0.0;
    for (const auto& s : d.support) m += s.probability * s.value;
    return m;
}

inline std::pair<double, double> distribution_bounds(const DiscreteDistribution& d) {
    return {d.support.front().value, d.support.back().value};
}

/// Inverse-CDF lookup for u in [0, 1).
inline double distribution_quantile(const DiscreteDistribution& d, double u) {
    double acc = 0.0;
    for (const auto& s : d.support) {
        acc += s.probability;
        if (u < acc) return s.value;
    }
    return d.support.back().value;
}

/**
 * A planning instance: network, horizon, economics and inflow statistics.
 *
 * Per-period grids are indexed [t][n] for reservoir quantities and
 * [t][link] for transfer costs. `penalty` holds the overflow constant per
 * (t, n); when absent the formulation derives a default from the profit slopes.
 */
struct Scenario {
    std::string name;
    std::size_t periods = 0;
    std::vector<ReservoirSpec> reservoirs;
    std::vector<LinkSpec> links;
    PeriodGrid<PwlFunction> profit;
    PeriodGrid<PwlFunction> risk;
    PeriodGrid<PwlFunction> transfer_cost;
    PeriodGrid<DiscreteDistribution> inflow;
    std::optional<PeriodGrid<double>> penalty;
    Provenance profit_provenance = Provenance::user;
    Provenance risk_provenance = Provenance::user;
    Provenance cost_provenance = Provenance::user;

    std::size_t reservoir_count() const { return reservoirs.size(); }
    bool operator==(const Scenario&) const = default;
};

/// Decision variables of a plan, sized to its scenario.
struct Plan {
    PeriodGrid<double> transfer;  // [t][link]
    PeriodGrid<double> release;   // [t][n]
    PeriodGrid<double> inflow;    // [t][n], the optimized inflow prediction
    PeriodGrid<double> volume;    // [t][n], planned end-of-period volume
    double planner_objective = 0.0;
    bool operator==(const Plan&) const = default;
};

inline constexpr Shape kProfitShape = Shape::concave | Shape::nondecreasing;
inline constexpr Shape kCostShape = Shape::convex | Shape::nondecreasing;
inline constexpr Shape kRiskShape = Shape::convex | Shape::nondecreasing;
inline constexpr double kProbabilityTolerance = 1e-9;

struct Violation {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    explicit operator bool() const { return ok(); }

    std::string summary() const {
        std::ostringstream os;
        for (const auto& v : violations) os << v.location << ": " << v.message << '\n';
        return os.str();
    }
    bool mentions(const std::string& needle) const {
        for (const auto& v : violations)
            if (v.message.find(needle) != std::string::npos) return true;
        return false;
    }
};

namespace detail {

inline std::string at(const char* what, std::size_t t, std::size_t n) {
    return std::string(what) + "(t=" + std::to_string(t + 1) + ", n=" + std::to_string(n + 1) + ")";
}

inline std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

inline void check_distribution(const DiscreteDistribution& d, const std::string& loc, std::vector<Violation>& out) {
    if (d.support.empty()) {
        out.push_back({loc, "distribution has empty support"});
        return;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
        const auto& s = d.support[k];
        if (!std::isfinite(s.value) || s.value < 0.0)
            out.push_back({loc, "support value " + fmt_num(s.value) + " must be finite and nonnegative"});
        if (!(s.probability > 0.0)) out.push_back({loc, "probability " + fmt_num(s.probability) + " must be positive"});
        if (k > 0 && !(s.value > d.support[k - 1].value))
            out.push_back({loc, "support values must be distinct and ascending"});
        total += s.probability;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance)
        out.push_back({loc, "distribution sums to " + fmt_num(total)});
}

inline void check_function(const PwlFunction& f, Shape required, const std::string& loc, std::vector<Violation>& out) {
    if (auto r = verify_shape(f, required); !r) out.push_back({loc, "requires " + to_string(required) + ": " + r.message});
}

template <class T>
bool grid_shape_ok(const PeriodGrid<T>& g, std::size_t periods, std::size_t items) {
    if (g.size() != periods) return false;
    for (const auto& row : g)
        if (row.size() != items) return false;
    return true;
}

}  // namespace detail

/// Scans the whole scenario and reports every violated invariant.
inline ValidationReport validate_scenario(const Scenario& s) {
    using detail::at;
    using detail::fmt_num;
    std::vector<Violation> out;
    const std::size_t N = s.reservoirs.size();
    const std::size_t T = s.periods;
    if (N == 0) out.push_back({"reservoirs", "scenario has no reservoirs"});
    if (T == 0) out.push_back({"horizon", "horizon must be at least one period"});

    for (std::size_t n = 0; n < N; ++n) {
        const auto& r = s.reservoirs[n];
        std::string loc = "reservoir " + std::to_string(n + 1);
        if (!(r.max_volume > 0.0) || !std::isfinite(r.max_volume))
            out.push_back({loc, "max volume must be positive and finite"});
        if (r.initial_volume < 0.0) out.push_back({loc, "initial volume is negative"});
        if (r.initial_volume > r.max_volume)
            out.push_back({loc, "initial volume exceeds capacity (" + fmt_num(r.initial_volume) + " > " +
                                    fmt_num(r.max_volume) + ")"});
        if (r.final_min_volume < 0.0) out.push_back({loc, "final minimum volume is negative"});
        if (r.final_min_volume > r.max_volume)
            out.push_back({loc, "final minimum volume exceeds capacity (" + fmt_num(r.final_min_volume) + " > " +
                                    fmt_num(r.max_volume) + ")"});
    }

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t l = 0; l < s.links.size(); ++l) {
        const auto& k = s.links[l];
        std::string loc = "link " + std::to_string(l + 1);
        if (k.from >= N || k.to >= N) out.push_back({loc, "endpoint out of range"});
        if (k.from == k.to) out.push_back({loc, "link connects a reservoir to itself"});
        if (!(k.capacity > 0.0) || !std::isfinite(k.capacity))
            out.push_back({loc, "capacity must be positive and finite"});
        if (!seen.insert({k.from, k.to}).second) out.push_back({loc, "duplicate link for ordered pair"});
    }

    const std::size_t L = s.links.size();
    bool grids_ok = true;
    auto check_grid = [&](bool ok, const char* what) {
        if (!ok) {
            out.push_back({what, "grid does not cover every (period, index) pair"});
            grids_ok = false;
        }
    };
    check_grid(detail::grid_shape_ok(s.profit, T, N), "profit");
    check_grid(detail::grid_shape_ok(s.risk, T, N), "risk");
    check_grid(detail::grid_shape_ok(s.inflow, T, N), "inflow");
    check_grid(detail::grid_shape_ok(s.transfer_cost, T, L), "transfer_cost");
    if (s.penalty) check_grid(detail::grid_shape_ok(*s.penalty, T, N), "penalty");
    if (!grids_ok) return {std::move(out)};

    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t n = 0; n < N; ++n) {
            detail::check_function(s.profit[t][n], kProfitShape, at("profit", t, n), out);
            detail::check_function(s.risk[t][n], kRiskShape, at("risk", t, n), out);
            if (!zero_on_nonpositive(s.risk[t][n]))
                out.push_back({at("risk", t, n), "risk must be zero for nonpositive deficits"});
            detail::check_distribution(s.inflow[t][n], at("inflow", t, n), out);
            if (s.penalty) {
                double f = (*s.penalty)[t][n];
                if (!(f > 0.0) || !std::isfinite(f))
                    out.push_back({at("penalty", t, n), "overflow penalty must be positive"});
            }
        }
        for (std::size_t l = 0; l < L; ++l)
            detail::check_function(s.transfer_cost[t][l], kCostShape,
                                   "transfer_cost(t=" + std::to_string(t + 1) + ", link=" + std::to_string(l + 1) + ")",
                                   out);
    }
    return {std::move(out)};
}

inline ValidationReport validate_distribution(const DiscreteDistribution& d) {
    std::vector<Violation> out;
    detail::check_distribution(d, "distribution", out);
    return {std::move(out)};
}

/// Thrown when a scenario fails validation; carries the full report.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(ValidationReport report)
        : std::runtime_error("invalid scenario:\n" + report.summary()), report_(std::move(report)) {}
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

inline void require_valid(const Scenario& s) {
    if (auto r = validate_scenario(s); !r.ok()) throw ScenarioError(std::move(r));
}

/// Plan with every entry zero, sized to the scenario.
inline Plan empty_plan(const Scenario& s) {
    Plan p;
    p.transfer = make_grid(s.periods, s.links.size(), 0.0);
    p.release = make_grid(s.periods, s.reservoirs.size(), 0.0);
    p.inflow = p.release;
    p.volume = p.release;
    return p;
}

inline bool plan_matches(const Plan& p, const Scenario& s) {
    const auto T = s.periods, N = s.reservoirs.size(), L = s.links.size();
    return detail::grid_shape_ok(p.transfer, T, L) && detail::grid_shape_ok(p.release, T, N) &&
           detail::grid_shape_ok(p.inflow, T, N) && detail::grid_shape_ok(p.volume, T, N);
}

}  // namespace reservoir

#endif  // RESERVOIR_MODEL_HPP

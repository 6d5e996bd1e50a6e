#ifndef RESERVOIR_SWEEP_HPP
#define RESERVOIR_SWEEP_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "reservoir/builtin.hpp"
#include "reservoir/model.hpp"
#include "reservoir/scenario_io.hpp"

namespace reservoir {

enum class SweepParameter { transfer_cost_slope, risk_slope, profit_slope, initial_volume_fraction };

inline const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::transfer_cost_slope: return "transfer-cost-slope";
        case SweepParameter::risk_slope: return "risk-slope";
        case SweepParameter::profit_slope: return "profit-slope";
        case SweepParameter::initial_volume_fraction: return "initial-volume-fraction";
    }
    return "?";
}

inline SweepParameter parse_sweep_parameter(const std::string& s) {
    for (auto p : {SweepParameter::transfer_cost_slope, SweepParameter::risk_slope, SweepParameter::profit_slope,
                   SweepParameter::initial_volume_fraction})
        if (s == to_string(p)) return p;
    throw std::invalid_argument("unknown sweep parameter '" + s + "'");
}

struct SweepConfig {
    std::string base;  // "builtin:<name>" or a scenario path
    SweepParameter parameter = SweepParameter::transfer_cost_slope;
    std::vector<double> grid;
    std::size_t replications = 100;
    std::uint64_t seed = 1;
};

class SweepError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void validate_sweep(const SweepConfig& c) {
    if (c.grid.empty()) throw SweepError("sweep grid is empty");
    if (c.replications == 0) throw SweepError("sweep needs at least one replication");
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        double v = c.grid[i];
        bool ok = std::isfinite(v) && v > 0.0;
        if (c.parameter == SweepParameter::initial_volume_fraction) ok = ok && v <= 1.0;
        if (!ok)
            throw SweepError("grid value " + std::to_string(v) + " at index " + std::to_string(i) +
                             " is not admissible for " + to_string(c.parameter));
    }
}

namespace detail {

// Rescales f so that its steepest slope becomes `slope`.
inline PwlFunction with_slope(const PwlFunction& f, double slope) {
    double ref = f.max_abs_slope();
    if (ref <= 0.0) throw SweepError("cannot set the slope of a constant function");
    return f.scaled(slope / ref);
}

}  // namespace detail

/// One scenario per grid value, each differing from `base` only in the swept parameter.
inline std::vector<Scenario> expand_sweep(const SweepConfig& c, const Scenario& base) {
    validate_sweep(c);
    std::vector<Scenario> out;
    for (double v : c.grid) {
        Scenario s = base;
        switch (c.parameter) {
            case SweepParameter::transfer_cost_slope:
                for (auto& row : s.transfer_cost)
                    for (auto& f : row) f = detail::with_slope(f, v);
                break;
            case SweepParameter::risk_slope:
                for (auto& row : s.risk)
                    for (auto& f : row) f = detail::with_slope(f, v);
                break;
            case SweepParameter::profit_slope:
                for (auto& row : s.profit)
                    for (auto& f : row) f = detail::with_slope(f, v);
                break;
            case SweepParameter::initial_volume_fraction:
                for (auto& r : s.reservoirs) r.initial_volume = r.final_min_volume = v * r.max_volume;
                break;
        }
        s.name = base.name + "[" + to_string(c.parameter) + "=" + detail::fmt_num(v) + "]";
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<Scenario> expand_sweep(const SweepConfig& c) { return expand_sweep(c, resolve_scenario(c.base)); }

inline SweepConfig sweep_from_json(const nlohmann::json& j) {
    using detail::need;
    SweepConfig c;
    const auto& base = need(j, "base", "sweep");
    if (!base.is_string()) throw ScenarioParseError("sweep: 'base' must be a string");
    c.base = base.get<std::string>();
    const auto& p = need(j, "parameter", "sweep");
    if (!p.is_string()) throw ScenarioParseError("sweep: 'parameter' must be a string");
    c.parameter = parse_sweep_parameter(p.get<std::string>());
    const auto& g = need(j, "grid", "sweep");
    if (!g.is_array()) throw ScenarioParseError("sweep: 'grid' must be an array");
    for (const auto& v : g) {
        if (!v.is_number()) throw ScenarioParseError("sweep: grid values must be numbers");
        c.grid.push_back(v.get<double>());
    }
    if (auto it = j.find("replications"); it != j.end()) {
        if (!it->is_number_unsigned()) throw ScenarioParseError("sweep: 'replications' must be a positive integer");
        c.replications = it->get<std::size_t>();
    }
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_unsigned()) throw ScenarioParseError("sweep: 'seed' must be a nonnegative integer");
        c.seed = it->get<std::uint64_t>();
    }
    validate_sweep(c);
    return c;
}

inline nlohmann::json sweep_to_json(const SweepConfig& c) {
    return {{"base", c.base},
            {"parameter", to_string(c.parameter)},
            {"grid", c.grid},
            {"replications", c.replications},
            {"seed", c.seed}};
}

inline SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sweep config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return sweep_from_json(nlohmann::json::parse(buf.str()));
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioParseError(std::string("sweep: ") + e.what());
    }
}

}  // namespace reservoir

#endif  // RESERVOIR_SWEEP_HPP

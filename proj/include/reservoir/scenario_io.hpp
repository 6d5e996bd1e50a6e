#ifndef RESERVOIR_SCENARIO_IO_HPP
#define RESERVOIR_SCENARIO_IO_HPP

// JSON scenario files. Key list:
//
//   name               string (optional)
//   horizon            integer T >= 1
//   reservoirs[]       {id, max_volume, initial_volume, final_min_volume, provenance?}
//                      ids run 1..N in order
//   links[]            {from, to, capacity, provenance?}
//   functions[]        {kind: profit|risk|transfer_cost, period?, reservoir? | from?/to?,
//                       breakpoints: [[arg, value], ...], left_slope, right_slope, shape?: [flags]}
//   function_provenance  {profit?, risk?, transfer_cost?}
//   distributions[]    {period?, reservoir?, support: [[value, probability], ...], provenance?}
//   penalty            null or [{period?, reservoir?, value}]
//
// An omitted period/reservoir/from/to selector applies the entry to every
// index. Entries are applied in order, so later entries override earlier ones.
// After expansion every (period, reservoir) and (period, link) must be covered.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "reservoir/model.hpp"
#include "reservoir/pwl.hpp"

namespace reservoir {

using json = nlohmann::json;

class ScenarioParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Provenance parse_provenance(const json& j, const std::string& ctx) {
    if (!j.is_string()) throw ScenarioParseError(ctx + ": provenance must be a string");
    auto s = j.get<std::string>();
    if (s == "published") return Provenance::published;
    if (s == "reconstructed") return Provenance::reconstructed;
    if (s == "user") return Provenance::user;
    throw ScenarioParseError(ctx + ": unknown provenance '" + s + "'");
}

inline const json& need(const json& obj, const char* key, const std::string& ctx) {
    if (!obj.is_object()) throw ScenarioParseError(ctx + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioParseError(ctx + ": missing key '" + key + "'");
    return *it;
}

inline double need_number(const json& obj, const char* key, const std::string& ctx) {
    const auto& v = need(obj, key, ctx);
    if (!v.is_number()) throw ScenarioParseError(ctx + ": key '" + key + "' must be a number");
    return v.get<double>();
}

inline std::size_t need_index(const json& v, const std::string& what, std::size_t count, const std::string& ctx) {
    if (!v.is_number_integer()) throw ScenarioParseError(ctx + ": '" + what + "' must be an integer");
    auto i = v.get<long long>();
    if (i < 1 || static_cast<std::size_t>(i) > count)
        throw ScenarioParseError(ctx + ": '" + what + "' = " + std::to_string(i) + " out of range 1.." +
                                 std::to_string(count));
    return static_cast<std::size_t>(i - 1);
}

// Indices selected by an optional 1-based key (all when absent).
inline std::vector<std::size_t> select(const json& obj, const char* key, std::size_t count, const std::string& ctx) {
    std::vector<std::size_t> out;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        for (std::size_t i = 0; i < count; ++i) out.push_back(i);
    } else {
        out.push_back(need_index(*it, key, count, ctx));
    }
    return out;
}

inline Shape parse_shape(const json& arr, const std::string& ctx) {
    if (!arr.is_array()) throw ScenarioParseError(ctx + ": 'shape' must be an array of flags");
    Shape s = Shape::none;
    for (const auto& f : arr) {
        auto name = f.is_string() ? f.get<std::string>() : std::string();
        if (name == "convex") s = s | Shape::convex;
        else if (name == "concave") s = s | Shape::concave;
        else if (name == "nondecreasing") s = s | Shape::nondecreasing;
        else throw ScenarioParseError(ctx + ": unknown shape flag '" + f.dump() + "'");
    }
    return s;
}

inline json shape_json(Shape s) {
    json a = json::array();
    if (has(s, Shape::convex)) a.push_back("convex");
    if (has(s, Shape::concave)) a.push_back("concave");
    if (has(s, Shape::nondecreasing)) a.push_back("nondecreasing");
    return a;
}

inline PwlFunction parse_function(const json& e, Shape required, const std::string& ctx) {
    const auto& bps = need(e, "breakpoints", ctx);
    if (!bps.is_array() || bps.empty()) throw ScenarioParseError(ctx + ": 'breakpoints' must be a nonempty array");
    std::vector<Breakpoint> pts;
    for (const auto& b : bps) {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
            throw ScenarioParseError(ctx + ": each breakpoint must be [argument, value]");
        pts.push_back({b[0].get<double>(), b[1].get<double>()});
    }
    PwlFunction f;
    try {
        f = PwlFunction(std::move(pts), need_number(e, "left_slope", ctx), need_number(e, "right_slope", ctx));
    } catch (const std::invalid_argument& ex) {
        throw ScenarioParseError(ctx + ": " + ex.what());
    }
    if (auto it = e.find("shape"); it != e.end()) {
        Shape declared = parse_shape(*it, ctx);
        if ((declared & required) != required)
            throw ScenarioParseError(ctx + ": declared shape '" + to_string(declared) + "' lacks required '" +
                                     to_string(required) + "'");
        if (auto r = verify_shape(f, declared); !r)
            throw ScenarioParseError(ctx + ": function does not satisfy its declared shape: " + r.message);
    }
    return f;
}

inline json function_json(const PwlFunction& f, Shape shape) {
    json bps = json::array();
    for (const auto& p : f.points()) bps.push_back({p.arg, p.value});
    return json{{"breakpoints", bps}, {"left_slope", f.left_slope()}, {"right_slope", f.right_slope()},
                {"shape", shape_json(shape)}};
}

template <class T>
bool all_equal(const PeriodGrid<T>& g) {
    for (const auto& row : g)
        for (const auto& v : row)
            if (!(v == g.front().front())) return false;
    return true;
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object()) throw ScenarioParseError("scenario: top level must be an object");
    Scenario s;
    if (auto it = j.find("name"); it != j.end() && it->is_string()) s.name = it->get<std::string>();
    const auto& h = need(j, "horizon", "scenario");
    if (!h.is_number_integer() || h.get<long long>() < 1)
        throw ScenarioParseError("scenario: 'horizon' must be a positive integer");
    s.periods = static_cast<std::size_t>(h.get<long long>());

    const auto& rs = need(j, "reservoirs", "scenario");
    if (!rs.is_array()) throw ScenarioParseError("scenario: 'reservoirs' must be an array");
    for (std::size_t i = 0; i < rs.size(); ++i) {
        std::string ctx = "reservoirs[" + std::to_string(i) + "]";
        const auto& r = rs[i];
        if (auto it = r.find("id"); it != r.end() && (!it->is_number_integer() || it->get<long long>() != static_cast<long long>(i + 1)))
            throw ScenarioParseError(ctx + ": ids must run 1..N in order");
        ReservoirSpec spec{need_number(r, "max_volume", ctx), need_number(r, "initial_volume", ctx),
                           need_number(r, "final_min_volume", ctx), Provenance::user};
        if (auto it = r.find("provenance"); it != r.end()) spec.provenance = parse_provenance(*it, ctx);
        s.reservoirs.push_back(spec);
    }
    const std::size_t N = s.reservoirs.size(), T = s.periods;

    if (auto it = j.find("links"); it != j.end()) {
        if (!it->is_array()) throw ScenarioParseError("scenario: 'links' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string ctx = "links[" + std::to_string(i) + "]";
            const auto& e = (*it)[i];
            LinkSpec k;
            k.from = need_index(need(e, "from", ctx), "from", N, ctx);
            k.to = need_index(need(e, "to", ctx), "to", N, ctx);
            k.capacity = need_number(e, "capacity", ctx);
            if (auto p = e.find("provenance"); p != e.end()) k.provenance = parse_provenance(*p, ctx);
            s.links.push_back(k);
        }
    }
    const std::size_t L = s.links.size();

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> link_of;
    for (std::size_t l = 0; l < L; ++l) link_of[{s.links[l].from, s.links[l].to}] = l;

    PeriodGrid<std::optional<PwlFunction>> profit(T, std::vector<std::optional<PwlFunction>>(N));
    auto risk = profit;
    PeriodGrid<std::optional<PwlFunction>> cost(T, std::vector<std::optional<PwlFunction>>(L));

    const auto& fs = need(j, "functions", "scenario");
    if (!fs.is_array()) throw ScenarioParseError("scenario: 'functions' must be an array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
        std::string ctx = "functions[" + std::to_string(i) + "]";
        const auto& e = fs[i];
        const auto& kind_j = need(e, "kind", ctx);
        std::string kind = kind_j.is_string() ? kind_j.get<std::string>() : "";
        auto periods = select(e, "period", T, ctx);
        if (kind == "profit" || kind == "risk") {
            auto f = parse_function(e, kind == "profit" ? kProfitShape : kRiskShape, ctx);
            auto& grid = kind == "profit" ? profit : risk;
            for (auto t : periods)
                for (auto n : select(e, "reservoir", N, ctx)) grid[t][n] = f;
        } else if (kind == "transfer_cost") {
            auto f = parse_function(e, kCostShape, ctx);
            auto froms = select(e, "from", N, ctx);
            auto tos = select(e, "to", N, ctx);
            std::size_t hits = 0;
            for (auto a : froms)
                for (auto b : tos) {
                    auto it = link_of.find({a, b});
                    if (it == link_of.end()) continue;
                    ++hits;
                    for (auto t : periods) cost[t][it->second] = f;
                }
            if (hits == 0 && L > 0) throw ScenarioParseError(ctx + ": transfer_cost entry matches no link");
        } else {
            throw ScenarioParseError(ctx + ": unknown function kind '" + kind_j.dump() + "'");
        }
    }

    auto settle = [&](PeriodGrid<std::optional<PwlFunction>>& g, const char* what, const char* idx) {
        PeriodGrid<PwlFunction> out(g.size());
        for (std::size_t t = 0; t < g.size(); ++t)
            for (std::size_t k = 0; k < g[t].size(); ++k) {
                if (!g[t][k])
                    throw ScenarioParseError(std::string("functions: ") + what + " not specified for (period=" +
                                             std::to_string(t + 1) + ", " + idx + "=" + std::to_string(k + 1) + ")");
                out[t].push_back(*g[t][k]);
            }
        return out;
    };
    s.profit = settle(profit, "profit", "reservoir");
    s.risk = settle(risk, "risk", "reservoir");
    s.transfer_cost = settle(cost, "transfer_cost", "link");

    if (auto it = j.find("function_provenance"); it != j.end()) {
        if (auto p = it->find("profit"); p != it->end()) s.profit_provenance = parse_provenance(*p, "function_provenance");
        if (auto p = it->find("risk"); p != it->end()) s.risk_provenance = parse_provenance(*p, "function_provenance");
        if (auto p = it->find("transfer_cost"); p != it->end())
            s.cost_provenance = parse_provenance(*p, "function_provenance");
    }

    PeriodGrid<std::optional<DiscreteDistribution>> dist(T, std::vector<std::optional<DiscreteDistribution>>(N));
    const auto& ds = need(j, "distributions", "scenario");
    if (!ds.is_array()) throw ScenarioParseError("scenario: 'distributions' must be an array");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::string ctx = "distributions[" + std::to_string(i) + "]";
        const auto& e = ds[i];
        DiscreteDistribution d;
        const auto& sup = need(e, "support", ctx);
        if (!sup.is_array()) throw ScenarioParseError(ctx + ": 'support' must be an array");
        for (const auto& p : sup) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ScenarioParseError(ctx + ": each support point must be [value, probability]");
            d.support.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        if (auto p = e.find("provenance"); p != e.end()) d.provenance = parse_provenance(*p, ctx);
        for (auto t : select(e, "period", T, ctx))
            for (auto n : select(e, "reservoir", N, ctx)) dist[t][n] = d;
    }
    s.inflow.assign(T, {});
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t n = 0; n < N; ++n) {
            if (!dist[t][n])
                throw ScenarioParseError("distributions: inflow not specified for (period=" + std::to_string(t + 1) +
                                         ", reservoir=" + std::to_string(n + 1) + ")");
            s.inflow[t].push_back(*dist[t][n]);
        }

    if (auto it = j.find("penalty"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw ScenarioParseError("scenario: 'penalty' must be null or an array");
        PeriodGrid<std::optional<double>> pen(T, std::vector<std::optional<double>>(N));
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string ctx = "penalty[" + std::to_string(i) + "]";
            const auto& e = (*it)[i];
            double v = need_number(e, "value", ctx);
            for (auto t : select(e, "period", T, ctx))
                for (auto n : select(e, "reservoir", N, ctx)) pen[t][n] = v;
        }
        PeriodGrid<double> grid = make_grid(T, N, 0.0);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t n = 0; n < N; ++n) {
                if (!pen[t][n])
                    throw ScenarioParseError("penalty: value not specified for (period=" + std::to_string(t + 1) +
                                             ", reservoir=" + std::to_string(n + 1) + ")");
                grid[t][n] = *pen[t][n];
            }
        s.penalty = std::move(grid);
    }
    return s;
}

inline json scenario_to_json(const Scenario& s) {
    using namespace detail;
    json j;
    j["name"] = s.name;
    j["horizon"] = s.periods;
    json rs = json::array();
    for (std::size_t n = 0; n < s.reservoirs.size(); ++n) {
        const auto& r = s.reservoirs[n];
        rs.push_back({{"id", n + 1},
                      {"max_volume", r.max_volume},
                      {"initial_volume", r.initial_volume},
                      {"final_min_volume", r.final_min_volume},
                      {"provenance", to_string(r.provenance)}});
    }
    j["reservoirs"] = rs;
    json ls = json::array();
    for (const auto& k : s.links)
        ls.push_back({{"from", k.from + 1}, {"to", k.to + 1}, {"capacity", k.capacity}, {"provenance", to_string(k.provenance)}});
    j["links"] = ls;

    json fs = json::array();
    auto emit = [&](const PeriodGrid<PwlFunction>& g, const char* kind, Shape shape, bool per_link) {
        if (g.empty() || g.front().empty()) return;
        if (all_equal(g)) {
            json e = function_json(g.front().front(), shape);
            e["kind"] = kind;
            fs.push_back(e);
            return;
        }
        for (std::size_t t = 0; t < g.size(); ++t)
            for (std::size_t k = 0; k < g[t].size(); ++k) {
                json e = function_json(g[t][k], shape);
                e["kind"] = kind;
                e["period"] = t + 1;
                if (per_link) {
                    e["from"] = s.links[k].from + 1;
                    e["to"] = s.links[k].to + 1;
                } else {
                    e["reservoir"] = k + 1;
                }
                fs.push_back(e);
            }
    };
    emit(s.profit, "profit", kProfitShape, false);
    emit(s.risk, "risk", kRiskShape, false);
    emit(s.transfer_cost, "transfer_cost", kCostShape, true);
    j["functions"] = fs;
    j["function_provenance"] = {{"profit", to_string(s.profit_provenance)},
                                {"risk", to_string(s.risk_provenance)},
                                {"transfer_cost", to_string(s.cost_provenance)}};

    json ds = json::array();
    auto dist_json = [](const DiscreteDistribution& d) {
        json sup = json::array();
        for (const auto& p : d.support) sup.push_back({p.value, p.probability});
        return json{{"support", sup}, {"provenance", to_string(d.provenance)}};
    };
    if (!s.inflow.empty() && !s.inflow.front().empty() && all_equal(s.inflow)) {
        ds.push_back(dist_json(s.inflow.front().front()));
    } else {
        for (std::size_t t = 0; t < s.inflow.size(); ++t)
            for (std::size_t n = 0; n < s.inflow[t].size(); ++n) {
                json e = dist_json(s.inflow[t][n]);
                e["period"] = t + 1;
                e["reservoir"] = n + 1;
                ds.push_back(e);
            }
    }
    j["distributions"] = ds;

    if (s.penalty) {
        json ps = json::array();
        for (std::size_t t = 0; t < s.penalty->size(); ++t)
            for (std::size_t n = 0; n < (*s.penalty)[t].size(); ++n)
                ps.push_back({{"period", t + 1}, {"reservoir", n + 1}, {"value", (*s.penalty)[t][n]}});
        j["penalty"] = ps;
    } else {
        j["penalty"] = nullptr;
    }
    return j;
}

/// Parses and validates a scenario document.
inline Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioParseError(std::string("scenario: ") + e.what());
    }
    Scenario s = scenario_from_json(j);
    require_valid(s);
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file '" + path + "'");
    out << scenario_to_json(s).dump(2) << '\n';
}

}  // namespace reservoir

#endif  // RESERVOIR_SCENARIO_IO_HPP

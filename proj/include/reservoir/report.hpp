#ifndef RESERVOIR_REPORT_HPP
#define RESERVOIR_REPORT_HPP

// CSV/JSON writers shared by the command-line front end.
//
// CSV files start with a single `# manifest: {...}` comment line, followed by
// a mandatory header row. Delimiter is `,`, decimal separator `.`, numbers use
// the shortest representation that round-trips.

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "reservoir/lp.hpp"
#include "reservoir/model.hpp"
#include "reservoir/simulation.hpp"

namespace reservoir {

/// Inputs that determine a command's outputs; embedded verbatim in every output file.
struct RunManifest {
    std::string command;
    std::string scenario;
    std::string method;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replications;
    std::optional<double> big_f;
    bool physical_sim = false;
    std::string format = "csv";
    std::optional<double> pivot_tolerance;
    std::optional<double> feasibility_tolerance;
    std::optional<double> optimality_tolerance;
    std::vector<std::string> outputs;
    std::string pairing;
    nlohmann::json extra = nlohmann::json::object();

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        if (!scenario.empty()) j["scenario"] = scenario;
        if (!method.empty()) j["method"] = method;
        if (seed) j["seed"] = *seed;
        if (replications) j["replications"] = *replications;
        j["big_f"] = big_f ? nlohmann::json(*big_f) : nlohmann::json(nullptr);
        j["physical_sim"] = physical_sim;
        j["format"] = format;
        nlohmann::json tol = nlohmann::json::object();
        if (pivot_tolerance) tol["pivot"] = *pivot_tolerance;
        if (feasibility_tolerance) tol["feasibility"] = *feasibility_tolerance;
        if (optimality_tolerance) tol["optimality"] = *optimality_tolerance;
        j["tolerance_overrides"] = tol;
        j["outputs"] = outputs;
        if (!pairing.empty()) j["pairing"] = pairing;
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        return j;
    }
};

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // no negative zero in reports
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const RunManifest& manifest, const std::vector<std::string>& header)
        : out_(path, std::ios::binary), columns_(header.size()) {
        if (!out_) throw std::runtime_error("cannot write '" + path + "'");
        out_ << "# manifest: " << manifest.to_json().dump() << '\n';
        write_cells(header);
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        std::vector<std::string> v{cell(cells)...};
        if (v.size() != columns_) throw std::logic_error("CSV row width mismatch");
        write_cells(v);
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double d) { return format_number(d); }
    static std::string cell(std::size_t n) { return std::to_string(n); }
    static std::string cell(int n) { return std::to_string(n); }

    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t columns_;
};

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

inline nlohmann::json plan_to_json(const Plan& p, const Scenario& s) {
    nlohmann::json transfers = nlohmann::json::array(), releases = nlohmann::json::array();
    for (std::size_t t = 0; t < s.periods; ++t) {
        for (std::size_t l = 0; l < s.links.size(); ++l)
            transfers.push_back({{"t", t + 1}, {"from", s.links[l].from + 1}, {"to", s.links[l].to + 1}, {"q", p.transfer[t][l]}});
        for (std::size_t n = 0; n < s.reservoirs.size(); ++n)
            releases.push_back({{"t", t + 1},
                                {"n", n + 1},
                                {"g", p.release[t][n]},
                                {"x", p.inflow[t][n]},
                                {"v", p.volume[t][n]}});
    }
    return {{"planner_objective", p.planner_objective},
            {"periods", s.periods},
            {"reservoirs", s.reservoirs.size()},
            {"transfers", transfers},
            {"releases", releases}};
}

/// Reads a plan written by plan_to_json (or a whole plan output document) against its scenario.
inline Plan plan_from_json(const nlohmann::json& doc, const Scenario& s) {
    const nlohmann::json& j = doc.contains("plan") ? doc.at("plan") : doc;
    if (!j.contains("transfers") || !j.contains("releases")) throw std::runtime_error("plan file lacks transfers/releases");
    if (j.value("periods", std::size_t{0}) != s.periods || j.value("reservoirs", std::size_t{0}) != s.reservoirs.size())
        throw std::runtime_error("plan dimensions do not match the scenario (periods/reservoirs)");
    Plan p = empty_plan(s);
    p.planner_objective = j.value("planner_objective", 0.0);
    std::vector<std::vector<bool>> seen_r = std::vector<std::vector<bool>>(s.periods, std::vector<bool>(s.reservoirs.size()));
    for (const auto& r : j.at("releases")) {
        std::size_t t = r.at("t").get<std::size_t>(), n = r.at("n").get<std::size_t>();
        if (t < 1 || t > s.periods || n < 1 || n > s.reservoirs.size())
            throw std::runtime_error("plan release entry out of range");
        p.release[t - 1][n - 1] = r.at("g").get<double>();
        p.inflow[t - 1][n - 1] = r.at("x").get<double>();
        p.volume[t - 1][n - 1] = r.at("v").get<double>();
        seen_r[t - 1][n - 1] = true;
    }
    for (const auto& row : seen_r)
        for (bool b : row)
            if (!b) throw std::runtime_error("plan dimensions do not match the scenario (missing release entries)");
    for (const auto& q : j.at("transfers")) {
        std::size_t t = q.at("t").get<std::size_t>(), a = q.at("from").get<std::size_t>(), b = q.at("to").get<std::size_t>();
        if (t < 1 || t > s.periods) throw std::runtime_error("plan transfer entry out of range");
        bool found = false;
        for (std::size_t l = 0; l < s.links.size(); ++l)
            if (s.links[l].from + 1 == a && s.links[l].to + 1 == b) {
                p.transfer[t - 1][l] = q.at("q").get<double>();
                found = true;
            }
        if (!found) throw std::runtime_error("plan transfer uses a link the scenario does not have");
    }
    return p;
}

inline nlohmann::json stats_json(const SampleStats& s) {
    return {{"mean", s.mean}, {"std", s.std_dev}, {"standard_error", s.standard_error()}, {"count", s.count}};
}

}  // namespace reservoir

#endif  // RESERVOIR_REPORT_HPP

#ifndef RESERVOIR_CLI_HPP
#define RESERVOIR_CLI_HPP

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reservoir/builtin.hpp"
#include "reservoir/formulation.hpp"
#include "reservoir/lp.hpp"
#include "reservoir/mps.hpp"
#include "reservoir/report.hpp"
#include "reservoir/scenario_io.hpp"
#include "reservoir/simulation.hpp"
#include "reservoir/sweep.hpp"

namespace reservoir::cli {

namespace fs = std::filesystem;

enum ExitCode : int { ok = 0, usage_error = 1, infeasible = 2, unbounded = 3, iteration_limit = 4 };

inline int exit_code(lp::Status s) {
    switch (s) {
        case lp::Status::optimal: return ok;
        case lp::Status::infeasible: return infeasible;
        case lp::Status::unbounded: return unbounded;
        case lp::Status::iteration_limit: return iteration_limit;
    }
    return usage_error;
}

struct Common {
    std::string scenario;
    std::string out = ".";
    std::string format = "csv";
    std::uint64_t seed = 1;
    std::size_t reps = 100;
    std::optional<double> big_f;
    bool physical = false;
    unsigned threads = 0;
    std::optional<double> pivot_tol, feas_tol, opt_tol;
    std::optional<std::size_t> iteration_limit;

    lp::SimplexOptions simplex() const {
        lp::SimplexOptions o;
        if (pivot_tol) o.pivot_tolerance = *pivot_tol;
        if (feas_tol) o.feasibility_tolerance = *feas_tol;
        if (opt_tol) o.optimality_tolerance = *opt_tol;
        if (iteration_limit) o.iteration_limit = *iteration_limit;
        return o;
    }

    SimulationOptions simulation() const {
        SimulationOptions o;
        o.replications = reps;
        o.seed = seed;
        o.mode = physical ? RealizationMode::physical : RealizationMode::literal;
        o.threads = threads;
        return o;
    }

    RunManifest manifest(std::string command) const {
        RunManifest m;
        m.command = std::move(command);
        m.scenario = scenario;
        m.big_f = big_f;
        m.physical_sim = physical;
        m.format = format;
        m.pivot_tolerance = pivot_tol;
        m.feasibility_tolerance = feas_tol;
        m.optimality_tolerance = opt_tol;
        if (iteration_limit) m.extra["iteration_limit"] = *iteration_limit;
        return m;
    }
};

namespace detail {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// Wall-clock time varies run to run, so it goes to a side file instead of the reproducible outputs.
inline void write_timing(const fs::path& dir, const RunManifest& m, double seconds) {
    write_json_file((dir / "timing.json").string(), {{"manifest", m.to_json()}, {"wall_clock_seconds", seconds}});
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

inline void check_format(const std::string& f) {
    if (f != "csv" && f != "json") throw std::invalid_argument("--format must be csv or json");
}

inline void report_failure(std::ostream& err, const RunManifest& m, const std::string& what) {
    err << "error: " << what << "\nmanifest: " << m.to_json().dump() << '\n';
}

}  // namespace detail

// ---------------------------------------------------------------- plan

struct PlanArgs {
    Common common;
    std::string method = "proposed";
    std::string dump_lp;
};

inline int cmd_plan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
    detail::Timer timer;
    RunManifest m = a.common.manifest("plan");
    m.method = a.method;
    m.outputs = {"plan_transfers.csv", "plan_releases.csv", "plan.json"};
    Scenario s = resolve_scenario(a.common.scenario);
    Method method = parse_method(a.method);
    auto r = make_plan(s, method, a.common.big_f, a.common.simplex());
    if (!a.dump_lp.empty()) {
        std::ofstream f(a.dump_lp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + a.dump_lp + "'");
        lp::write_mps(f, r.formulation.problem);
    }
    if (!r.plan) {
        detail::report_failure(err, m, std::string("solver status ") + lp::to_string(r.solution.status));
        return exit_code(r.solution.status);
    }
    const Plan& p = *r.plan;
    fs::path dir(a.common.out);
    detail::ensure_dir(dir);
    {
        CsvWriter w((dir / "plan_transfers.csv").string(), m, {"t", "from", "to", "q"});
        for (std::size_t t = 0; t < s.periods; ++t)
            for (std::size_t l = 0; l < s.links.size(); ++l)
                w.row(t + 1, s.links[l].from + 1, s.links[l].to + 1, p.transfer[t][l]);
    }
    {
        CsvWriter w((dir / "plan_releases.csv").string(), m, {"t", "n", "g", "x", "v"});
        for (std::size_t t = 0; t < s.periods; ++t)
            for (std::size_t n = 0; n < s.reservoirs.size(); ++n)
                w.row(t + 1, n + 1, p.release[t][n], p.inflow[t][n], p.volume[t][n]);
    }
    write_json_file((dir / "plan.json").string(), {{"manifest", m.to_json()},
                                                   {"method", a.method},
                                                   {"status", lp::to_string(r.solution.status)},
                                                   {"iterations", r.solution.iterations},
                                                   {"plan", plan_to_json(p, s)}});
    detail::write_timing(dir, m, timer.seconds());
    out << "status optimal\nobjective " << format_number(p.planner_objective) << "\niterations "
        << r.solution.iterations << '\n';
    return ok;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    Common common;
    std::string plan;
};

inline void write_evaluation(const fs::path& dir, const RunManifest& m, const std::string& format,
                             const SimulationReport& rep) {
    if (format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t r = 0; r < rep.replications.size(); ++r) {
            const auto& b = rep.replications[r];
            rows.push_back({{"rep", r + 1}, {"release", b.release_profit}, {"transfer", b.transfer_cost},
                            {"risk", b.risk}, {"total", b.total}});
        }
        write_json_file((dir / "evaluation.json").string(),
                        {{"manifest", m.to_json()},
                         {"replications", rows},
                         {"aggregate",
                          {{"release", stats_json(rep.release_profit)},
                           {"transfer", stats_json(rep.transfer_cost)},
                           {"risk", stats_json(rep.risk)},
                           {"total", stats_json(rep.total)}}}});
        return;
    }
    CsvWriter w((dir / "evaluation.csv").string(), m, {"rep", "release", "transfer", "risk", "total"});
    for (std::size_t r = 0; r < rep.replications.size(); ++r) {
        const auto& b = rep.replications[r];
        w.row(r + 1, b.release_profit, b.transfer_cost, b.risk, b.total);
    }
    w.row("mean", rep.release_profit.mean, rep.transfer_cost.mean, rep.risk.mean, rep.total.mean);
    w.row("std", rep.release_profit.std_dev, rep.transfer_cost.std_dev, rep.risk.std_dev, rep.total.std_dev);
}

inline int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    detail::Timer timer;
    detail::check_format(a.common.format);
    RunManifest m = a.common.manifest("evaluate");
    m.seed = a.common.seed;
    m.replications = a.common.reps;
    m.extra["plan"] = a.plan;
    m.outputs = {a.common.format == "json" ? "evaluation.json" : "evaluation.csv"};
    Scenario s = resolve_scenario(a.common.scenario);
    std::ifstream in(a.plan);
    if (!in) throw std::runtime_error("cannot open plan file '" + a.plan + "'");
    Plan p;
    try {
        p = plan_from_json(nlohmann::json::parse(in), s);
    } catch (const std::exception& e) {
        detail::report_failure(err, m, e.what());
        return usage_error;
    }
    auto rep = run_monte_carlo(p, s, a.common.simulation());
    fs::path dir(a.common.out);
    detail::ensure_dir(dir);
    write_evaluation(dir, m, a.common.format, rep);
    detail::write_timing(dir, m, timer.seconds());
    out << "mean_total " << format_number(rep.total.mean) << "\nstd_total " << format_number(rep.total.std_dev)
        << "\nmean_risk " << format_number(rep.risk.mean) << '\n';
    return ok;
}

// ---------------------------------------------------------------- compare

struct Comparison {
    PlanResult proposed, deterministic;
    SimulationReport proposed_report, deterministic_report;
    SampleStats difference;  // paired proposed - deterministic
};

/// Plans with both methods and scores them on the same inflow samples.
inline Comparison compare_methods(const Scenario& s, const Common& c) {
    Comparison out{make_plan(s, Method::proposed, c.big_f, c.simplex()),
                   make_plan(s, Method::deterministic, c.big_f, c.simplex()),
                   {}, {}, {}};
    if (!out.proposed.plan || !out.deterministic.plan) return out;
    auto opt = c.simulation();
    out.proposed_report = run_monte_carlo(*out.proposed.plan, s, opt);
    out.deterministic_report = run_monte_carlo(*out.deterministic.plan, s, opt);
    std::vector<double> d;
    for (std::size_t r = 0; r < opt.replications; ++r)
        d.push_back(out.proposed_report.replications[r].total - out.deterministic_report.replications[r].total);
    out.difference = summarize(d);
    return out;
}

inline int cmd_compare(const Common& c, std::ostream& out, std::ostream& err) {
    detail::Timer timer;
    detail::check_format(c.format);
    RunManifest m = c.manifest("compare");
    m.seed = c.seed;
    m.replications = c.reps;
    m.pairing = "paired: both methods scored on identical inflow samples";
    m.outputs = c.format == "json" ? std::vector<std::string>{"compare.json"}
                                   : std::vector<std::string>{"compare.csv", "compare_replications.csv"};
    Scenario s = resolve_scenario(c.scenario);
    auto cmp = compare_methods(s, c);
    for (const auto* r : {&cmp.proposed, &cmp.deterministic})
        if (!r->plan) {
            detail::report_failure(err, m, std::string(to_string(r->formulation.method)) + " solver status " +
                                               lp::to_string(r->solution.status));
            return exit_code(r->solution.status);
        }
    fs::path dir(c.out);
    detail::ensure_dir(dir);
    const auto& P = cmp.proposed_report;
    const auto& D = cmp.deterministic_report;
    if (c.format == "json") {
        write_json_file((dir / "compare.json").string(),
                        {{"manifest", m.to_json()},
                         {"proposed", {{"objective", cmp.proposed.solution.objective},
                                       {"total", stats_json(P.total)}, {"risk", stats_json(P.risk)}}},
                         {"deterministic", {{"objective", cmp.deterministic.solution.objective},
                                            {"total", stats_json(D.total)}, {"risk", stats_json(D.risk)}}},
                         {"paired_difference", stats_json(cmp.difference)}});
    } else {
        {
            CsvWriter w((dir / "compare.csv").string(), m, {"quantity", "mean", "std", "standard_error"});
            w.row("proposed_total", P.total.mean, P.total.std_dev, P.total.standard_error());
            w.row("proposed_risk", P.risk.mean, P.risk.std_dev, P.risk.standard_error());
            w.row("deterministic_total", D.total.mean, D.total.std_dev, D.total.standard_error());
            w.row("deterministic_risk", D.risk.mean, D.risk.std_dev, D.risk.standard_error());
            w.row("paired_difference", cmp.difference.mean, cmp.difference.std_dev, cmp.difference.standard_error());
        }
        CsvWriter w((dir / "compare_replications.csv").string(), m,
                    {"rep", "proposed_total", "deterministic_total", "difference", "proposed_risk", "deterministic_risk"});
        for (std::size_t r = 0; r < c.reps; ++r)
            w.row(r + 1, P.replications[r].total, D.replications[r].total,
                  P.replications[r].total - D.replications[r].total, P.replications[r].risk, D.replications[r].risk);
    }
    detail::write_timing(dir, m, timer.seconds());
    out << "proposed_mean_total " << format_number(P.total.mean) << "\ndeterministic_mean_total "
        << format_number(D.total.mean) << "\npaired_difference " << format_number(cmp.difference.mean)
        << "\npaired_standard_error " << format_number(cmp.difference.standard_error()) << '\n';
    return ok;
}

// ---------------------------------------------------------------- sweep

struct SweepRow {
    double value = 0.0;
    Method method = Method::proposed;
    lp::Status status = lp::Status::optimal;
    double objective = 0.0;
    double transfer_volume = 0.0;
    SimulationReport report;
};

/// Runs both methods at every grid value; rows come back in (grid, method) order whatever `threads` is.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const Common& c) {
    auto scenarios = expand_sweep(cfg);
    std::vector<SweepRow> rows(scenarios.size() * 2);
    auto job = [&](std::size_t i) {
        const Scenario& s = scenarios[i / 2];
        SweepRow& row = rows[i];
        row.value = cfg.grid[i / 2];
        row.method = i % 2 == 0 ? Method::proposed : Method::deterministic;
        auto r = make_plan(s, row.method, c.big_f, c.simplex());
        row.status = r.solution.status;
        if (!r.plan) return;
        row.objective = r.solution.objective;
        row.transfer_volume = total_transfer(*r.plan);
        SimulationOptions opt = c.simulation();
        opt.replications = cfg.replications;
        opt.seed = cfg.seed;
        opt.threads = 1;
        row.report = run_monte_carlo(*r.plan, s, opt);
    };
    unsigned threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) job(i);
    } else {
        std::vector<std::future<void>> pending;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            pending.push_back(std::async(std::launch::async, job, i));
            if (pending.size() >= threads) {
                for (auto& f : pending) f.get();
                pending.clear();
            }
        }
        for (auto& f : pending) f.get();
    }
    return rows;
}

struct SweepArgs {
    Common common;
    std::string config;
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    detail::Timer timer;
    detail::check_format(a.common.format);
    SweepConfig cfg = load_sweep_config(a.config);
    RunManifest m = a.common.manifest("sweep");
    m.scenario = cfg.base;
    m.seed = cfg.seed;
    m.replications = cfg.replications;
    m.pairing = "paired: both methods scored on identical inflow samples";
    m.extra["sweep"] = sweep_to_json(cfg);
    m.outputs = {a.common.format == "json" ? "sweep.json" : "sweep.csv"};
    auto rows = run_sweep(cfg, a.common);
    fs::path dir(a.common.out);
    detail::ensure_dir(dir);
    int code = ok;
    const std::string param = to_string(cfg.parameter);
    if (a.common.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"parameter", param}, {"value", r.value}, {"method", to_string(r.method)},
                           {"status", lp::to_string(r.status)}, {"mean", r.report.total.mean},
                           {"std", r.report.total.std_dev}, {"risk_mean", r.report.risk.mean},
                           {"transfer_volume", r.transfer_volume}, {"objective", r.objective}});
        write_json_file((dir / "sweep.json").string(), {{"manifest", m.to_json()}, {"rows", arr}});
    } else {
        CsvWriter w((dir / "sweep.csv").string(), m,
                    {"parameter", "value", "method", "status", "mean", "std", "risk_mean", "transfer_volume", "objective"});
        for (const auto& r : rows) {
            bool solved = r.status == lp::Status::optimal;
            double nan = std::nan("");
            w.row(param, r.value, to_string(r.method), lp::to_string(r.status), solved ? r.report.total.mean : nan,
                  solved ? r.report.total.std_dev : nan, solved ? r.report.risk.mean : nan,
                  solved ? r.transfer_volume : nan, solved ? r.objective : nan);
        }
    }
    for (const auto& r : rows)
        if (r.status != lp::Status::optimal) {
            err << "warning: " << to_string(r.method) << " at " << param << "=" << format_number(r.value)
                << " has solver status " << lp::to_string(r.status) << '\n';
            if (code == ok) code = exit_code(r.status);
        }
    detail::write_timing(dir, m, timer.seconds());
    out << "rows " << rows.size() << '\n';
    return code;
}

// ---------------------------------------------------------------- solve-lp

inline int cmd_solve_lp(const std::string& path, const Common& c, std::ostream& out, std::ostream& err) {
    std::ifstream in(path);
    if (!in) {
        err << "error: cannot open LP file '" << path << "'\n";
        return usage_error;
    }
    lp::Problem p;
    try {
        p = lp::read_mps(in);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    auto sol = lp::solve(p, c.simplex());
    out << "status " << lp::to_string(sol.status) << '\n';
    if (sol.status == lp::Status::optimal) {
        out << "objective " << format_number(sol.objective) << "\niterations " << sol.iterations << '\n';
        for (std::size_t j = 0; j < p.variables.size(); ++j)
            if (std::abs(sol.values[j]) > 1e-12) out << p.variables[j].name << ' ' << format_number(sol.values[j]) << '\n';
    }
    return exit_code(sol.status);
}

// ---------------------------------------------------------------- front end

inline void add_common(CLI::App* sub, Common& c, bool scenario_required = true) {
    auto* opt = sub->add_option("--scenario", c.scenario, "Scenario file or builtin:<simple1|simple2|angpuang>");
    if (scenario_required) opt->required();
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("--big-f", c.big_f, "Overflow penalty constant for every (t, n)");
    sub->add_option("--pivot-tol", c.pivot_tol, "Simplex pivot tolerance override");
    sub->add_option("--feasibility-tol", c.feas_tol, "Simplex feasibility tolerance override");
    sub->add_option("--optimality-tol", c.opt_tol, "Simplex reduced-cost tolerance override");
    sub->add_option("--iteration-limit", c.iteration_limit, "Simplex iteration cap override");
}

inline void add_simulation(CLI::App* sub, Common& c) {
    sub->add_option("--reps", c.reps, "Monte Carlo replications")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    sub->add_option("--format", c.format, "Report format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--physical-sim", c.physical, "Cap actual volumes at capacity and floor realized releases at zero");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores); does not change results");
}

/// Parses argv and dispatches; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Demand-supply planning for multi-connection reservoir networks"};
    app.require_subcommand(1);

    PlanArgs plan;
    auto* plan_cmd = app.add_subcommand("plan", "Compute a plan and write it as CSV and JSON");
    add_common(plan_cmd, plan.common);
    plan_cmd->add_option("--method", plan.method, "proposed or deterministic")
        ->capture_default_str()
        ->check(CLI::IsMember({"proposed", "deterministic"}));
    plan_cmd->add_option("--dump-lp", plan.dump_lp, "Also write the compiled LP in MPS form");

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Monte Carlo evaluation of a plan file");
    add_common(eval_cmd, eval.common);
    add_simulation(eval_cmd, eval.common);
    eval_cmd->add_option("--plan", eval.plan, "plan.json written by `plan`")->required();

    Common compare;
    auto* cmp_cmd = app.add_subcommand("compare", "Plan with both methods and compare them on paired samples");
    add_common(cmp_cmd, compare);
    add_simulation(cmp_cmd, compare);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sensitivity sweep over one parameter");
    add_common(sweep_cmd, sweep.common, false);
    add_simulation(sweep_cmd, sweep.common);
    sweep_cmd->add_option("--config", sweep.config, "Sweep config JSON")->required();

    std::string lp_path;
    Common lp_common;
    auto* lp_cmd = app.add_subcommand("solve-lp", "Solve an LP dump (MPS) and print the solution");
    lp_cmd->add_option("lp", lp_path, "MPS file")->required();
    lp_cmd->add_option("--pivot-tol", lp_common.pivot_tol);
    lp_cmd->add_option("--feasibility-tol", lp_common.feas_tol);
    lp_cmd->add_option("--optimality-tol", lp_common.opt_tol);
    lp_cmd->add_option("--iteration-limit", lp_common.iteration_limit);

    std::string export_name, export_path;
    auto* export_cmd = app.add_subcommand("export", "Write a scenario (e.g. a builtin) to a scenario file");
    export_cmd->add_option("--scenario", export_name, "Scenario file or builtin:<name>")->required();
    export_cmd->add_option("--to", export_path, "Destination file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? ok : usage_error;
    }

    try {
        if (*plan_cmd) return cmd_plan(plan, out, err);
        if (*eval_cmd) return cmd_evaluate(eval, out, err);
        if (*cmp_cmd) return cmd_compare(compare, out, err);
        if (*sweep_cmd) return cmd_sweep(sweep, out, err);
        if (*lp_cmd) return cmd_solve_lp(lp_path, lp_common, out, err);
        if (*export_cmd) {
            save_scenario(resolve_scenario(export_name), export_path);
            return ok;
        }
    } catch (const ScenarioError& e) {
        err << "error: " << e.what();
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    return usage_error;
}

}  // namespace reservoir::cli

#endif  // RESERVOIR_CLI_HPP

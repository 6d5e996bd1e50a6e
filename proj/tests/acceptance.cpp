// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Every tolerance is pinned below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "reservoir/builtin.hpp"
#include "reservoir/cli.hpp"
#include "reservoir/formulation.hpp"
#include "reservoir/lp.hpp"
#include "reservoir/lp_oracle.hpp"
#include "reservoir/simulation.hpp"
#include "reservoir/sweep.hpp"
#include "support/generators.hpp"
#include "support/grid_oracle.hpp"

namespace {

using namespace reservoir;
namespace fs = std::filesystem;

constexpr double kLpObjectiveTol = 1e-7;
constexpr double kLpRuntimeLimit = 5.0;          // seconds for all random LPs
constexpr double kDegenerationRelTol = 1e-6;
constexpr double kGridTol = 1e-3;
constexpr double kCapacityTol = 1e-6;
constexpr double kSignificanceFactor = 2.0;      // paired difference must exceed this many standard errors
constexpr double kCompareRuntimeLimit = 120.0;   // seconds per scenario
constexpr double kFlatnessFactor = 3.0;          // standard errors of Monte Carlo noise
constexpr double kFlatnessFloor = 1e-6;
constexpr double kTransferZeroTol = 1e-9;
constexpr double kDeviationTol = 1e-9;
constexpr double kRiskStandardErrors = 3.0;
constexpr double kScaleRuntimeLimit = 60.0;      // seconds

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) { return format_number(v); }

Outcome solver_oracle_equivalence() {
    testing::Rng rng(20240601);
    auto t0 = std::chrono::steady_clock::now();
    int mismatches = 0, optimal = 0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        lp::Problem p = testing::random_lp(rng, 6, 8);
        auto s = lp::solve(p);
        auto o = lp::oracle_solve(p);
        if (s.status != o.status) {
            ++mismatches;
            continue;
        }
        if (s.status != lp::Status::optimal) continue;
        ++optimal;
        double d = std::abs(s.objective - o.objective);
        worst = std::max(worst, d);
        if (d > kLpObjectiveTol) ++mismatches;
    }
    double elapsed = seconds_since(t0);
    return {mismatches == 0 && elapsed < kLpRuntimeLimit,
            "200 LPs, " + std::to_string(optimal) + " optimal, " + std::to_string(mismatches) +
                " mismatches, max |dz| " + num(worst) + ", " + num(elapsed) + " s"};
}

Outcome degeneration() {
    testing::Rng rng(5150);
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < 50; ++i) {
        Scenario s = testing::random_scenario(rng, {4, 4, true});
        auto a = make_plan(s, Method::proposed), b = make_plan(s, Method::deterministic);
        if (!a.plan || !b.plan) {
            ok = false;
            continue;
        }
        double d = std::abs(a.solution.objective - b.solution.objective);
        double rel = d / (1.0 + std::abs(a.solution.objective));
        worst = std::max(worst, rel);
        ok = ok && d <= kDegenerationRelTol * (1.0 + std::abs(a.solution.objective));
    }
    return {ok, "50 point-mass scenarios, max relative gap " + num(worst)};
}

Outcome brute_force_formulation() {
    Scenario one = testing::single_reservoir_example();
    Scenario two = testing::two_reservoir_example();
    auto g1 = testing::single_reservoir_oracle(one, effective_penalty(one)[0][0]);
    auto g2 = testing::two_reservoir_oracle(two, effective_penalty(two)[0][0]);
    auto p1 = make_plan(one, Method::proposed), d1 = make_plan(one, Method::deterministic);
    auto p2 = make_plan(two, Method::proposed);
    if (!p1.plan || !d1.plan || !p2.plan) return {false, "a worked example did not solve"};
    double e = 0.0;
    e = std::max(e, std::abs(p1.solution.objective - g1.value));
    e = std::max(e, std::abs(p1.plan->release[0][0] - g1.point[0]));
    e = std::max(e, std::abs(d1.solution.objective - g1.value));
    e = std::max(e, std::abs(p2.solution.objective - g2.value));
    e = std::max(e, std::abs(p2.plan->transfer[0][0] - g2.point[0]));
    e = std::max(e, std::abs(p2.plan->release[1][1] - g2.point[1]));
    return {e <= kGridTol, "single: z=" + num(p1.solution.objective) + " grid " + num(g1.value) +
                               "; pair: z=" + num(p2.solution.objective) + " grid " + num(g2.value) +
                               "; max error " + num(e)};
}

Outcome big_f_guarantee() {
    double worst = -1e300;
    bool ok = true;
    for (const auto& name : builtin_names())
        for (Method m : {Method::proposed, Method::deterministic}) {
            Scenario s = builtin_scenario(name);
            auto r = make_plan(s, m);
            if (!r.plan) {
                ok = false;
                continue;
            }
            for (std::size_t t = 0; t < s.periods; ++t)
                for (std::size_t n = 0; n < s.reservoirs.size(); ++n)
                    worst = std::max(worst, r.plan->volume[t][n] - s.reservoirs[n].max_volume);
        }
    return {ok && worst <= kCapacityTol, "max (v - M) over built-in plans " + num(worst)};
}

Outcome directional_outperformance() {
    bool ok = true;
    std::string detail;
    for (const auto& name : builtin_names()) {
        auto t0 = std::chrono::steady_clock::now();
        cli::Common c;
        c.scenario = "builtin:" + name;
        c.reps = 100;
        c.seed = 1;
        auto cmp = cli::compare_methods(resolve_scenario(c.scenario), c);
        double elapsed = seconds_since(t0);
        if (!cmp.proposed.plan || !cmp.deterministic.plan) {
            ok = false;
            detail += name + ": solve failed; ";
            continue;
        }
        double p = cmp.proposed_report.total.mean, d = cmp.deterministic_report.total.mean;
        double diff = cmp.difference.mean, se = cmp.difference.standard_error();
        bool pass = p >= d && diff > kSignificanceFactor * se && elapsed < kCompareRuntimeLimit;
        ok = ok && pass;
        detail += name + ": " + num(p) + " vs " + num(d) + ", diff " + num(diff) + " (se " + num(se) + ", " +
                  num(elapsed) + " s); ";
    }
    return {ok, detail};
}

std::vector<cli::SweepRow> sweep(SweepParameter param, std::vector<double> grid) {
    SweepConfig cfg{"builtin:angpuang", param, std::move(grid), 100, 1};
    cli::Common c;
    return cli::run_sweep(cfg, c);
}

Outcome transfer_shutoff() {
    const std::vector<double> grid{0.25, 0.5, 1.0, 1.5, 2.0};
    auto rows = sweep(SweepParameter::transfer_cost_slope, grid);
    bool ok = true;
    std::string detail;
    for (Method m : {Method::proposed, Method::deterministic}) {
        const cli::SweepRow* ref = nullptr;
        double worst_shift = 0.0, worst_transfer = 0.0;
        for (const auto& r : rows) {
            if (r.method != m) continue;
            if (r.status != lp::Status::optimal) {
                ok = false;
                continue;
            }
            if (r.value <= 1.0) continue;
            worst_transfer = std::max(worst_transfer, r.transfer_volume);
            if (!ref) {
                ref = &r;
                continue;
            }
            std::vector<double> d;
            for (std::size_t k = 0; k < r.report.replications.size(); ++k)
                d.push_back(r.report.replications[k].total - ref->report.replications[k].total);
            auto st = summarize(d);
            double shift = std::abs(r.report.total.mean - ref->report.total.mean);
            worst_shift = std::max(worst_shift, shift);
            ok = ok && shift <= std::max(kFlatnessFactor * st.standard_error(), kFlatnessFloor);
        }
        ok = ok && worst_transfer <= kTransferZeroTol;
        detail += std::string(to_string(m)) + ": transfer beyond C=1 " + num(worst_transfer) + ", max mean shift " +
                  num(worst_shift) + "; ";
    }
    return {ok, detail};
}

Outcome risk_sensitivity() {
    auto rows = sweep(SweepParameter::risk_slope, {1.0, 2.5, 5.0, 10.0});
    double first[2] = {0, 0}, last[2] = {0, 0};
    bool ok = true;
    for (const auto& r : rows) {
        ok = ok && r.status == lp::Status::optimal;
        int i = r.method == Method::proposed ? 0 : 1;
        if (r.value == 1.0) first[i] = r.report.total.mean;
        if (r.value == 10.0) last[i] = r.report.total.mean;
    }
    double dp = first[0] - last[0], dd = first[1] - last[1];
    return {ok && dp <= dd, "decline over R in [1, 10]: proposed " + num(dp) + ", deterministic " + num(dd)};
}

Outcome deviation_identity() {
    testing::Rng rng(777);
    double worst = 0.0;
    bool first_exact = true;
    for (int i = 0; i < 1000; ++i) {
        Scenario s = testing::random_scenario(rng);
        Plan p = testing::random_plan(rng, s);
        testing::follow_state_equation(p, s);
        auto x = sample_inflows(s, 99, static_cast<std::uint64_t>(i));
        auto tr = realize(p, x, s);
        for (std::size_t n = 0; n < s.reservoirs.size(); ++n) first_exact = first_exact && tr.release[0][n] == p.release[0][n];
        for (std::size_t t = 0; t < s.periods; ++t)
            for (std::size_t n = 0; n < s.reservoirs.size(); ++n)
                worst = std::max(worst, std::abs((tr.volume[t][n] - p.volume[t][n]) - (x[t][n] - p.inflow[t][n])));
    }
    return {first_exact && worst <= kDeviationTol,
            "1000 pairs, max identity error " + num(worst) + (first_exact ? ", first-period release exact" : ", first-period release differs")};
}

Outcome expected_risk_consistency() {
    testing::Rng rng(4242);
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        Scenario s = testing::random_scenario(rng);
        auto r = make_plan(s, Method::proposed);
        if (!r.plan) {
            ok = false;
            continue;
        }
        auto rep = run_monte_carlo(*r.plan, s, {10000, static_cast<std::uint64_t>(100 + i), RealizationMode::literal, 0});
        double exact = expected_realized_risk(*r.plan, s);
        double se = rep.risk.standard_error();
        double z = se > 0.0 ? std::abs(rep.risk.mean - exact) / se : (std::abs(rep.risk.mean - exact) <= 1e-9 ? 0.0 : 1e300);
        worst = std::max(worst, z);
        ok = ok && z <= kRiskStandardErrors;
    }
    return {ok, "10 scenarios x 10000 replications, max |MC - closed form| = " + num(worst) + " standard errors"};
}

Outcome scale_runtime() {
    Scenario s = builtin_angpuang();
    auto t0 = std::chrono::steady_clock::now();
    auto r = make_plan(s, Method::proposed);
    double elapsed = seconds_since(t0);
    return {r.plan.has_value() && elapsed < kScaleRuntimeLimit,
            std::to_string(r.formulation.problem.variables.size()) + " variables, " +
                std::to_string(r.formulation.problem.constraints.size()) + " rows, " +
                std::to_string(r.solution.iterations) + " iterations, " + num(elapsed) + " s"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "reservoir");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome reproducibility() {
    const fs::path root = fs::temp_directory_path() / "reservoir_acceptance_repro";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream(root / "sweep.json")
        << R"({"base": "builtin:simple1", "parameter": "transfer-cost-slope", "grid": [0.25, 1.0, 2.0], "replications": 50, "seed": 3})";

    // One batch of every command writing into `dir`. Every batch evaluates the same plan file so the
    // evaluate inputs (and hence manifests) are identical across batches.
    const std::string shared_plan = (root / "sequential" / "plan" / "plan.json").string();
    auto batch = [&](const fs::path& dir, const std::string& threads) {
        int rc = run_cli({"plan", "--scenario", "builtin:angpuang", "--out", (dir / "plan").string()});
        rc |= run_cli({"evaluate", "--scenario", "builtin:angpuang", "--plan", shared_plan,
                       "--reps", "100", "--seed", "4", "--threads", threads, "--out", (dir / "evaluate").string()});
        rc |= run_cli({"compare", "--scenario", "builtin:simple2", "--reps", "100", "--seed", "4", "--threads", threads,
                       "--out", (dir / "compare").string()});
        rc |= run_cli({"sweep", "--config", (root / "sweep.json").string(), "--threads", threads, "--out",
                       (dir / "sweep").string()});
        return rc;
    };
    int rc = batch(root / "sequential", "1");
    auto a = std::async(std::launch::async, batch, root / "concurrent_a", "4");
    auto b = std::async(std::launch::async, batch, root / "concurrent_b", "0");
    rc |= a.get() | b.get();
    if (rc != 0) return {false, "a command failed"};

    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "sequential")) {
        if (!entry.is_regular_file() || entry.path().filename() == "timing.json") continue;
        auto rel = fs::relative(entry.path(), root / "sequential");
        std::string ref = slurp(entry.path());
        for (const char* other : {"concurrent_a", "concurrent_b"}) {
            ++compared;
            if (slurp(root / other / rel) != ref) ++differing;
        }
    }
    return {compared > 0 && differing == 0,
            std::to_string(compared) + " file comparisons across sequential and concurrent runs, " +
                std::to_string(differing) + " differ (wall-clock timing.json excluded)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"solver matches vertex-enumeration oracle on 200 random LPs", solver_oracle_equivalence},
        {"point-mass scenarios: proposed objective equals deterministic objective", degeneration},
        {"worked examples match grid-search oracles", brute_force_formulation},
        {"default overflow penalty keeps planned volumes within capacity", big_f_guarantee},
        {"proposed method outperforms deterministic baseline on paired replications", directional_outperformance},
        {"no transfers and flat profits once transfer cost slope exceeds profit slope", transfer_shutoff},
        {"proposed profit declines no faster than baseline as risk slope grows", risk_sensitivity},
        {"realized-volume deviation identity and exact first-period release", deviation_identity},
        {"Monte Carlo risk matches closed-form expected risk", expected_risk_consistency},
        {"eight-reservoir network plans within the runtime budget", scale_runtime},
        {"identical inputs give byte-identical outputs, including concurrent runs", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " ["
                  << o.detail << "]" << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}

#ifndef RESERVOIR_SIMULATION_HPP
#define RESERVOIR_SIMULATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <thread>
#include <vector>

#include "reservoir/model.hpp"

namespace reservoir {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform draw in [0, 1) that depends only on (seed, rep, n, t).
inline double stream_uniform(std::uint64_t seed, std::uint64_t rep, std::uint64_t n, std::uint64_t t) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ rep);
    h = mix64(h ^ (n << 32 | (t & 0xffffffffULL)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Sampled inflows x~[t][n] for one replication.
inline PeriodGrid<double> sample_inflows(const Scenario& s, std::uint64_t seed, std::uint64_t rep) {
    auto x = make_grid(s.periods, s.reservoirs.size(), 0.0);
    for (std::size_t t = 0; t < s.periods; ++t)
        for (std::size_t n = 0; n < s.reservoirs.size(); ++n)
            x[t][n] = distribution_quantile(s.inflow[t][n], stream_uniform(seed, rep, n, t));
    return x;
}

enum class RealizationMode {
    /// Actual volume follows the recursion as written; no cap, releases may go negative.
    literal,
    /// Actual volume capped at capacity (excess spilled); realized release floored at zero.
    physical,
};

struct RealizedTrajectory {
    PeriodGrid<double> inflow;   // x~
    PeriodGrid<double> release;  // g~
    PeriodGrid<double> volume;   // v~ at the end of each period
    PeriodGrid<double> deficit;  // amount the target release was short (argument of R)
    PeriodGrid<double> spill;    // zero in literal mode
};

/**
 * Applies a static plan to one inflow sequence. The realized release at t is
 * the target corrected by the gap between actual and planned volume at t-1;
 * transfers are executed exactly as planned.
 */
inline RealizedTrajectory realize(const Plan& p, const PeriodGrid<double>& inflow, const Scenario& s,
                                  RealizationMode mode = RealizationMode::literal) {
    if (!plan_matches(p, s)) throw std::invalid_argument("realize: plan dimensions do not match the scenario");
    const std::size_t T = s.periods, N = s.reservoirs.size(), L = s.links.size();
    RealizedTrajectory r;
    r.inflow = inflow;
    r.release = make_grid(T, N, 0.0);
    r.volume = r.release;
    r.deficit = r.release;
    r.spill = r.release;
    for (std::size_t n = 0; n < N; ++n) {
        double actual_prev = s.reservoirs[n].initial_volume;
        double planned_prev = s.reservoirs[n].initial_volume;
        for (std::size_t t = 0; t < T; ++t) {
            double in = 0.0, out = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                if (s.links[l].to == n) in += p.transfer[t][l];
                if (s.links[l].from == n) out += p.transfer[t][l];
            }
            const double g = p.release[t][n];
            const double gap = actual_prev - planned_prev;  // exactly 0 when the plan is on track
            double g_real = g + gap;
            if (mode == RealizationMode::physical) g_real = std::max(0.0, g_real);
            double v_real = actual_prev - g_real + inflow[t][n] + in - out;
            r.deficit[t][n] = g - g_real;
            r.release[t][n] = g_real;
            if (mode == RealizationMode::physical) {
                double cap = s.reservoirs[n].max_volume;
                if (v_real > cap) {
                    r.spill[t][n] = v_real - cap;
                    v_real = cap;
                }
            }
            r.volume[t][n] = v_real;
            actual_prev = v_real;
            planned_prev = p.volume[t][n];
        }
    }
    return r;
}

struct ProfitBreakdown {
    double release_profit = 0.0;
    double transfer_cost = 0.0;
    double risk = 0.0;
    double total = 0.0;
};

/// Release profit on targets, transfer cost on planned transfers, risk on realized deficits.
inline ProfitBreakdown score(const Plan& p, const RealizedTrajectory& traj, const Scenario& s) {
    ProfitBreakdown b;
    for (std::size_t t = 0; t < s.periods; ++t) {
        for (std::size_t n = 0; n < s.reservoirs.size(); ++n) {
            b.release_profit += s.profit[t][n](p.release[t][n]);
            b.risk += s.risk[t][n](traj.deficit[t][n]);
        }
        for (std::size_t l = 0; l < s.links.size(); ++l) b.transfer_cost += s.transfer_cost[t][l](p.transfer[t][l]);
    }
    b.total = b.release_profit - b.transfer_cost - b.risk;
    return b;
}

struct SampleStats {
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation (divisor count - 1)
    std::size_t count = 0;
    double standard_error() const { return count > 0 ? std_dev / std::sqrt(static_cast<double>(count)) : 0.0; }
};

inline SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.count = xs.size();
    if (xs.empty()) return s;
    // Welford's update: constant samples give exactly zero spread.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double d = xs[k] - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (xs[k] - mean);
    }
    s.mean = mean;
    if (xs.size() > 1) s.std_dev = std::sqrt(m2 / static_cast<double>(xs.size() - 1));
    return s;
}

struct SimulationOptions {
    std::size_t replications = 100;
    std::uint64_t seed = 1;
    RealizationMode mode = RealizationMode::literal;
    /// 0 picks the hardware concurrency.
    unsigned threads = 1;
};

struct SimulationReport {
    std::vector<ProfitBreakdown> replications;
    SampleStats total;
    SampleStats risk;
    SampleStats release_profit;
    SampleStats transfer_cost;
};

/// Scores `replications` independent inflow sequences. Output is independent of `threads`.
inline SimulationReport run_monte_carlo(const Plan& p, const Scenario& s, const SimulationOptions& opt = {}) {
    if (opt.replications == 0) throw std::invalid_argument("run_monte_carlo: need at least one replication");
    if (!plan_matches(p, s)) throw std::invalid_argument("run_monte_carlo: plan dimensions do not match the scenario");
    SimulationReport rep;
    rep.replications.resize(opt.replications);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            auto x = sample_inflows(s, opt.seed, r);
            rep.replications[r] = score(p, realize(p, x, s, opt.mode), s);
        }
    };
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, opt.replications));
    if (threads <= 1) {
        work(0, opt.replications);
    } else {
        std::vector<std::future<void>> jobs;
        std::size_t chunk = (opt.replications + threads - 1) / threads;
        for (std::size_t b = 0; b < opt.replications; b += chunk)
            jobs.push_back(std::async(std::launch::async, work, b, std::min(opt.replications, b + chunk)));
        for (auto& j : jobs) j.get();
    }
    std::vector<double> total, risk, rel, cost;
    for (const auto& b : rep.replications) {
        total.push_back(b.total);
        risk.push_back(b.risk);
        rel.push_back(b.release_profit);
        cost.push_back(b.transfer_cost);
    }
    rep.total = summarize(total);
    rep.risk = summarize(risk);
    rep.release_profit = summarize(rel);
    rep.transfer_cost = summarize(cost);
    return rep;
}

/**
 * Closed-form expected realized risk of a plan in literal mode. The deficit
 * at period t equals the inflow prediction error of period t-1, so period 1
 * carries no risk and the last period's prediction error is never charged.
 */
inline double expected_realized_risk(const Plan& p, const Scenario& s) {
    double total = 0.0;
    for (std::size_t t = 1; t < s.periods; ++t)
        for (std::size_t n = 0; n < s.reservoirs.size(); ++n)
            for (const auto& sp : s.inflow[t - 1][n].support)
                total += sp.probability * s.risk[t][n](p.inflow[t - 1][n] - sp.value);
    return total;
}

}  // namespace reservoir

#endif  // RESERVOIR_SIMULATION_HPP

#ifndef RESERVOIR_LP_HPP
#define RESERVOIR_LP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reservoir::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double objective = 0.0;
};

struct Term {
    std::size_t var = 0;
    double coef = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
};

/// Linear program in maximization form with bounded variables.
struct Problem {
    std::string name = "LP";
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;

    std::size_t add_variable(std::string name, double lower, double upper, double objective = 0.0) {
        variables.push_back({std::move(name), lower, upper, objective});
        return variables.size() - 1;
    }

    std::size_t add_constraint(std::string name, std::vector<Term> terms, Relation rel, double rhs) {
        constraints.push_back({std::move(name), std::move(terms), rel, rhs});
        return constraints.size() - 1;
    }

    double objective_at(const std::vector<double>& x) const {
        double z = 0.0;
        for (std::size_t j = 0; j < variables.size(); ++j) z += variables[j].objective * x[j];
        return z;
    }

    /// Largest bound or constraint violation of x (0 when feasible).
    double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (std::size_t j = 0; j < variables.size(); ++j) {
            worst = std::max(worst, variables[j].lower - x[j]);
            worst = std::max(worst, x[j] - variables[j].upper);
        }
        for (const auto& c : constraints) {
            double lhs = 0.0;
            for (const auto& t : c.terms) lhs += t.coef * x[t.var];
            double d = lhs - c.rhs;
            switch (c.relation) {
                case Relation::less_equal: worst = std::max(worst, d); break;
                case Relation::greater_equal: worst = std::max(worst, -d); break;
                case Relation::equal: worst = std::max(worst, std::abs(d)); break;
            }
        }
        return worst;
    }
};

inline void validate(const Problem& p) {
    for (std::size_t j = 0; j < p.variables.size(); ++j) {
        const auto& v = p.variables[j];
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInf || v.upper == -kInf)
            throw std::invalid_argument("variable '" + v.name + "' has inconsistent bounds");
        if (!std::isfinite(v.objective)) throw std::invalid_argument("variable '" + v.name + "' has non-finite cost");
    }
    for (const auto& c : p.constraints) {
        if (!std::isfinite(c.rhs)) throw std::invalid_argument("constraint '" + c.name + "' has non-finite rhs");
        for (const auto& t : c.terms) {
            if (t.var >= p.variables.size())
                throw std::invalid_argument("constraint '" + c.name + "' references unknown variable");
            if (!std::isfinite(t.coef)) throw std::invalid_argument("constraint '" + c.name + "' has non-finite coefficient");
        }
    }
}

enum class Status { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

struct Solution {
    Status status = Status::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    std::size_t iterations = 0;
};

struct SimplexOptions {
    double pivot_tolerance = 1e-9;
    double feasibility_tolerance = 1e-7;
    double optimality_tolerance = 1e-8;
    std::size_t bland_after_degenerate = 1000;
    /// 0 selects 50 * (variables + constraints).
    std::size_t iteration_limit = 0;
};

namespace detail {

/**
 * Dense-tableau primal simplex over bounded variables.
 *
 * Column layout: structural variables, then one logical per row (coefficient
 * +1; bounds encode the row relation), then artificials for rows whose
 * starting residual the logical cannot absorb. The tableau stores B^-1 A, so
 * the logical block of the tableau is B^-1 itself.
 */
class BoundedSimplex {
public:
    BoundedSimplex(const Problem& p, const SimplexOptions& opt) : prob_(p), opt_(opt) {
        n_ = p.variables.size();
        m_ = p.constraints.size();
        limit_ = opt.iteration_limit ? opt.iteration_limit : 50 * (n_ + m_);
        setup();
    }

    Solution run() {
        Solution out;
        if (art_count_ > 0) {
            set_phase_costs(true);
            Status s = iterate(true);
            if (s == Status::iteration_limit) return finish(s);
            refresh_basic_values();
            double infeas = 0.0;
            for (std::size_t c = n_ + m_; c < cols_; ++c) infeas += std::abs(x_[c]);
            if (infeas > opt_.feasibility_tolerance) return finish(Status::infeasible);
            for (std::size_t c = n_ + m_; c < cols_; ++c) {
                lo_[c] = up_[c] = 0.0;
                if (pos_[c] < 0) x_[c] = 0.0, state_[c] = State::at_lower;
            }
            drive_out_artificials();
        }
        set_phase_costs(false);
        Status s = iterate(false);
        refresh_basic_values();
        return finish(s);
    }

private:
    enum class State : std::uint8_t { basic, at_lower, at_upper, free_zero };

    double& tab(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }
    double tab(std::size_t i, std::size_t j) const { return tab_[i * cols_ + j]; }

    void setup() {
        std::vector<double> residual(m_);
        x_.assign(n_ + m_, 0.0);
        lo_.assign(n_ + m_, 0.0);
        up_.assign(n_ + m_, 0.0);
        state_.assign(n_ + m_, State::at_lower);
        for (std::size_t j = 0; j < n_; ++j) {
            const auto& v = prob_.variables[j];
            lo_[j] = v.lower;
            up_[j] = v.upper;
            if (std::isfinite(v.lower)) {
                x_[j] = v.lower;
                state_[j] = State::at_lower;
            } else if (std::isfinite(v.upper)) {
                x_[j] = v.upper;
                state_[j] = State::at_upper;
            } else {
                x_[j] = 0.0;
                state_[j] = State::free_zero;
            }
        }
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& c = prob_.constraints[i];
            double r = c.rhs;
            for (const auto& t : c.terms) r -= t.coef * x_[t.var];
            residual[i] = r;
            std::size_t s = n_ + i;
            switch (c.relation) {
                case Relation::less_equal: lo_[s] = 0.0, up_[s] = kInf; break;
                case Relation::greater_equal: lo_[s] = -kInf, up_[s] = 0.0; break;
                case Relation::equal: lo_[s] = 0.0, up_[s] = 0.0; break;
            }
        }
        // Decide which rows need an artificial.
        std::vector<int> art_sign(m_, 0);
        art_count_ = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            std::size_t s = n_ + i;
            double r = residual[i];
            if (r >= lo_[s] && r <= up_[s]) continue;
            art_sign[i] = (r > up_[s]) ? 1 : -1;
            ++art_count_;
        }
        cols_ = n_ + m_ + art_count_;
        x_.resize(cols_, 0.0);
        lo_.resize(cols_, 0.0);
        up_.resize(cols_, kInf);
        state_.resize(cols_, State::basic);
        pos_.assign(cols_, -1);
        basis_.assign(m_, 0);
        tab_.assign(m_ * cols_, 0.0);
        b_.resize(m_);

        std::size_t next_art = n_ + m_;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& c = prob_.constraints[i];
            b_[i] = c.rhs;
            double sign = art_sign[i] == 0 ? 1.0 : static_cast<double>(art_sign[i]);
            for (const auto& t : c.terms) tab(i, t.var) += t.coef / sign;
            std::size_t s = n_ + i;
            tab(i, s) = 1.0 / sign;
            if (art_sign[i] == 0) {
                basis_[i] = s;
                pos_[s] = static_cast<std::ptrdiff_t>(i);
                state_[s] = State::basic;
                x_[s] = residual[i];
            } else {
                // Logical parks at the bound nearest the residual; artificial absorbs the rest.
                double park = residual[i] > up_[s] ? up_[s] : lo_[s];
                x_[s] = park;
                state_[s] = (park == lo_[s]) ? State::at_lower : State::at_upper;
                std::size_t a = next_art++;
                tab(i, a) = 1.0;
                basis_[i] = a;
                pos_[a] = static_cast<std::ptrdiff_t>(i);
                state_[a] = State::basic;
                lo_[a] = 0.0;
                up_[a] = kInf;
                x_[a] = std::abs(residual[i] - park);
            }
        }
    }

    void set_phase_costs(bool phase_one) {
        cost_.assign(cols_, 0.0);
        if (phase_one) {
            for (std::size_t c = n_ + m_; c < cols_; ++c) cost_[c] = 1.0;
        } else {
            for (std::size_t j = 0; j < n_; ++j) cost_[j] = -prob_.variables[j].objective;
        }
        d_ = cost_;
        for (std::size_t i = 0; i < m_; ++i) {
            double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &tab_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
        }
        for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
    }

    bool can_enter(std::size_t j, bool phase_one, int& dir) const {
        if (!phase_one && j >= n_ + m_) return false;
        if (lo_[j] == up_[j]) return false;
        const double tol = opt_.optimality_tolerance;
        switch (state_[j]) {
            case State::basic: return false;
            case State::at_lower:
                if (d_[j] < -tol) return dir = 1, true;
                return false;
            case State::at_upper:
                if (d_[j] > tol) return dir = -1, true;
                return false;
            case State::free_zero:
                if (d_[j] < -tol) return dir = 1, true;
                if (d_[j] > tol) return dir = -1, true;
                return false;
        }
        return false;
    }

    Status iterate(bool phase_one) {
        std::size_t degenerate_run = 0;
        bool bland = false;
        for (;;) {
            if (iterations_ >= limit_) return Status::iteration_limit;

            std::size_t enter = cols_;
            int dir = 0;
            double best = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                int dj = 0;
                if (!can_enter(j, phase_one, dj)) continue;
                if (bland) {
                    enter = j, dir = dj;
                    break;
                }
                if (std::abs(d_[j]) > best) best = std::abs(d_[j]), enter = j, dir = dj;
            }
            if (enter == cols_) return Status::optimal;

            // Ratio test (two-pass with a small bound relaxation, strict in Bland mode).
            const double relax = bland ? 0.0 : 1e-9;
            double theta_limit = (std::isfinite(lo_[enter]) && std::isfinite(up_[enter])) ? up_[enter] - lo_[enter] : kInf;
            double relaxed_min = kInf;
            for (std::size_t i = 0; i < m_; ++i) {
                double a = tab(i, enter);
                if (std::abs(a) <= opt_.pivot_tolerance) continue;
                std::size_t b = basis_[i];
                double rate = -a * dir;
                double room = rate < 0 ? x_[b] - lo_[b] + relax : up_[b] - x_[b] + relax;
                if (!std::isfinite(room)) continue;
                relaxed_min = std::min(relaxed_min, std::max(room, 0.0) / std::abs(rate));
            }
            std::size_t leave_row = m_;
            double theta = kInf;
            double best_pivot = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                double a = tab(i, enter);
                if (std::abs(a) <= opt_.pivot_tolerance) continue;
                std::size_t b = basis_[i];
                double rate = -a * dir;
                double room = rate < 0 ? x_[b] - lo_[b] : up_[b] - x_[b];
                if (!std::isfinite(room)) continue;
                double ratio = std::max(room, 0.0) / std::abs(rate);
                if (ratio > relaxed_min) continue;
                bool take;
                if (bland) {
                    take = leave_row == m_ || ratio < theta ||
                           (ratio == theta && basis_[i] < basis_[leave_row]);
                } else {
                    take = std::abs(a) > best_pivot;
                }
                if (take) leave_row = i, theta = ratio, best_pivot = std::abs(a);
            }

            if (leave_row == m_ || theta_limit <= theta) {
                if (!std::isfinite(theta_limit)) {
                    if (leave_row == m_) return Status::unbounded;
                } else {
                    // Bound flip of the entering variable.
                    ++iterations_;
                    shift(enter, dir, theta_limit);
                    state_[enter] = dir > 0 ? State::at_upper : State::at_lower;
                    x_[enter] = dir > 0 ? up_[enter] : lo_[enter];
                    degenerate_run = 0, bland = false;
                    continue;
                }
            }

            ++iterations_;
            if (theta <= 1e-12) {
                if (++degenerate_run >= opt_.bland_after_degenerate) bland = true;
            } else {
                degenerate_run = 0, bland = false;
            }
            shift(enter, dir, theta);
            std::size_t leave = basis_[leave_row];
            double rate = -tab(leave_row, enter) * dir;
            bool to_lower = rate < 0;
            x_[leave] = to_lower ? lo_[leave] : up_[leave];
            state_[leave] = to_lower ? State::at_lower : State::at_upper;
            double entered_value = x_[enter];
            pivot(leave_row, enter);
            pos_[leave] = -1;
            basis_[leave_row] = enter;
            pos_[enter] = static_cast<std::ptrdiff_t>(leave_row);
            state_[enter] = State::basic;
            x_[enter] = entered_value;
        }
    }

    void shift(std::size_t enter, int dir, double theta) {
        if (theta == 0.0) return;
        x_[enter] += dir * theta;
        for (std::size_t i = 0; i < m_; ++i) {
            double a = tab(i, enter);
            if (a != 0.0) x_[basis_[i]] -= a * dir * theta;
        }
    }

    void pivot(std::size_t r, std::size_t j) {
        double* prow = &tab_[r * cols_];
        const double inv = 1.0 / prow[j];
        nz_.clear();
        for (std::size_t k = 0; k < cols_; ++k) {
            if (prow[k] == 0.0) continue;
            prow[k] *= inv;
            if (std::abs(prow[k]) < 1e-14) {
                prow[k] = 0.0;
                continue;
            }
            nz_.push_back(k);
        }
        prow[j] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &tab_[i * cols_];
            double f = row[j];
            if (f == 0.0) continue;
            for (std::size_t k : nz_) row[k] -= f * prow[k];
            row[j] = 0.0;
        }
        double f = d_[j];
        if (f != 0.0) {
            for (std::size_t k : nz_) d_[k] -= f * prow[k];
        }
        d_[j] = 0.0;
    }

    // Replaces a zero-level artificial in the basis by any usable column of its row.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_ + m_) continue;
            std::size_t best = cols_;
            double best_abs = opt_.pivot_tolerance * 1e3;
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                if (state_[j] == State::basic) continue;
                double a = std::abs(tab(i, j));
                if (a > best_abs) best_abs = a, best = j;
            }
            if (best == cols_) continue;
            std::size_t art = basis_[i];
            double value = x_[best];
            pivot(i, best);
            pos_[art] = -1;
            state_[art] = State::at_lower;
            x_[art] = 0.0;
            basis_[i] = best;
            pos_[best] = static_cast<std::ptrdiff_t>(i);
            state_[best] = State::basic;
            x_[best] = value;
        }
    }

    // Recomputes basic values as B^-1 (b - N x_N) from the original rows.
    void refresh_basic_values() {
        std::vector<double> rhs(b_);
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& c = prob_.constraints[i];
            for (const auto& t : c.terms)
                if (state_[t.var] != State::basic) rhs[i] -= t.coef * x_[t.var];
            std::size_t s = n_ + i;
            if (state_[s] != State::basic) rhs[i] -= x_[s];
        }
        // Nonbasic artificials sit at zero; basic artificials are unknowns like any basic column.
        // Row i of the tableau's logical block is row i of B^-1 (up to the sign used at setup,
        // which is already folded into the tableau).
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < m_; ++k) v += tab(i, n_ + k) * rhs[k];
            x_[basis_[i]] = v;
        }
    }

    Solution finish(Status s) {
        Solution out;
        out.status = s;
        out.iterations = iterations_;
        out.values.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        for (std::size_t j = 0; j < n_; ++j) {
            // Snap values that drifted within tolerance of a bound.
            double& v = out.values[j];
            if (std::abs(v - lo_[j]) < 1e-11) v = lo_[j];
            if (std::abs(v - up_[j]) < 1e-11) v = up_[j];
        }
        out.objective = prob_.objective_at(out.values);
        return out;
    }

    const Problem& prob_;
    SimplexOptions opt_;
    std::size_t n_ = 0, m_ = 0, cols_ = 0, art_count_ = 0;
    std::size_t iterations_ = 0, limit_ = 0;
    std::vector<double> tab_, b_, x_, lo_, up_, cost_, d_;
    std::vector<State> state_;
    std::vector<std::size_t> basis_;
    std::vector<std::ptrdiff_t> pos_;
    std::vector<std::size_t> nz_;
};

}  // namespace detail

/**
 * Solves a bounded-variable LP with the two-phase primal simplex.
 *
 * Status `optimal` means the returned point is feasible within the
 * feasibility tolerance; `infeasible` means phase one could not drive the
 * artificial sum below it; `unbounded` means an improving ray was found.
 */
inline Solution solve(const Problem& p, const SimplexOptions& opt = {}) {
    validate(p);
    for (const auto& v : p.variables)
        if (v.lower > v.upper) return {};  // empty box
    detail::BoundedSimplex s(p, opt);
    return s.run();
}

}  // namespace reservoir::lp

#endif  // RESERVOIR_LP_HPP

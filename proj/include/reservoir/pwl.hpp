#ifndef RESERVOIR_PWL_HPP
#define RESERVOIR_PWL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reservoir {

/// Shape requirements for a piecewise-linear function. Combine with `|`.
enum class Shape : unsigned {
    none = 0,
    convex = 1u << 0,
    concave = 1u << 1,
    nondecreasing = 1u << 2,
};

constexpr Shape operator|(Shape a, Shape b) {
    return static_cast<Shape>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr Shape operator&(Shape a, Shape b) {
    return static_cast<Shape>(static_cast<unsigned>(a) & static_cast<unsigned>(b));
}
constexpr bool has(Shape flags, Shape bit) { return (flags & bit) != Shape::none; }

inline std::string to_string(Shape flags) {
    std::string out;
    auto add = [&](const char* s) {
        if (!out.empty()) out += '+';
        out += s;
    };
    if (has(flags, Shape::convex)) add("convex");
    if (has(flags, Shape::concave)) add("concave");
    if (has(flags, Shape::nondecreasing)) add("nondecreasing");
    return out.empty() ? "none" : out;
}

inline constexpr double kSlopeTolerance = 1e-12;

struct Breakpoint {
    double arg = 0.0;
    double value = 0.0;
    bool operator==(const Breakpoint&) const = default;
};

/// Supporting line `slope * x + intercept`.
struct Cut {
    double slope = 0.0;
    double intercept = 0.0;
    double operator()(double x) const { return slope * x + intercept; }
    bool operator==(const Cut&) const = default;
};

/// Outcome of a shape check. `segment` indexes the slope sequence returned by
/// PwlFunction::slopes() (0 is the left extension).
struct ShapeCheck {
    bool ok = true;
    Shape failed = Shape::none;
    std::size_t segment = 0;
    std::string message;
    explicit operator bool() const { return ok; }
};

/**
 * Piecewise-linear function of one variable.
 *
 * Defined by strictly increasing breakpoints plus slopes that continue the
 * function linearly to the left of the first and the right of the last
 * breakpoint, so it is total on the reals.
 */
class PwlFunction {
public:
    /// The zero function.
    PwlFunction() : points_{{0.0, 0.0}} {}

    PwlFunction(std::vector<Breakpoint> points, double left_slope, double right_slope)
        : points_(std::move(points)), left_slope_(left_slope), right_slope_(right_slope) {
        if (points_.empty()) throw std::invalid_argument("piecewise-linear function needs at least one breakpoint");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!std::isfinite(points_[i].arg) || !std::isfinite(points_[i].value))
                throw std::invalid_argument("breakpoint " + std::to_string(i) + " is not finite");
            if (i > 0 && !(points_[i].arg > points_[i - 1].arg))
                throw std::invalid_argument("breakpoint arguments must be strictly increasing (index " +
                                            std::to_string(i) + ")");
        }
        if (!std::isfinite(left_slope_) || !std::isfinite(right_slope_))
            throw std::invalid_argument("extension slopes must be finite");
    }

    const std::vector<Breakpoint>& points() const { return points_; }
    double left_slope() const { return left_slope_; }
    double right_slope() const { return right_slope_; }

    double operator()(double x) const {
        const auto& first = points_.front();
        const auto& last = points_.back();
        if (x <= first.arg) return first.value + left_slope_ * (x - first.arg);
        if (x >= last.arg) return last.value + right_slope_ * (x - last.arg);
        auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const Breakpoint& b) { return v < b.arg; });
        auto lo = hi - 1;
        double w = (x - lo->arg) / (hi->arg - lo->arg);
        return lo->value + w * (hi->value - lo->value);
    }

    /// Slope sequence: left extension, each interior segment, right extension.
    std::vector<double> slopes() const {
        std::vector<double> s;
        s.reserve(points_.size() + 1);
        s.push_back(left_slope_);
        for (std::size_t i = 1; i < points_.size(); ++i)
            s.push_back((points_[i].value - points_[i - 1].value) / (points_[i].arg - points_[i - 1].arg));
        s.push_back(right_slope_);
        return s;
    }

    double max_abs_slope() const {
        double m = 0.0;
        for (double s : slopes()) m = std::max(m, std::abs(s));
        return m;
    }

    /// Pointwise product with a positive factor; preserves every shape flag.
    PwlFunction scaled(double factor) const {
        if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("scale factor must be positive");
        auto pts = points_;
        for (auto& p : pts) p.value *= factor;
        return PwlFunction(std::move(pts), left_slope_ * factor, right_slope_ * factor);
    }

    bool operator==(const PwlFunction&) const = default;

private:
    std::vector<Breakpoint> points_;
    double left_slope_ = 0.0;
    double right_slope_ = 0.0;
};

inline double evaluate(const PwlFunction& f, double x) { return f(x); }

inline ShapeCheck verify_shape(const PwlFunction& f, Shape required) {
    const auto s = f.slopes();
    auto fail = [](Shape which, std::size_t seg, std::string msg) {
        return ShapeCheck{false, which, seg, std::move(msg)};
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (has(required, Shape::nondecreasing) && s[i] < -kSlopeTolerance)
            return fail(Shape::nondecreasing, i, "slope " + std::to_string(s[i]) + " at segment " + std::to_string(i) + " is negative");
        if (i == 0) continue;
        double step = s[i] - s[i - 1];
        if (has(required, Shape::convex) && step < -kSlopeTolerance)
            return fail(Shape::convex, i, "slope decreases at segment " + std::to_string(i) + " (not convex)");
        if (has(required, Shape::concave) && step > kSlopeTolerance)
            return fail(Shape::concave, i, "slope increases at segment " + std::to_string(i) + " (not concave)");
    }
    return {};
}

/**
 * Supporting lines of a convex or concave function, one per distinct slope
 * (extensions included). For convex f, f(x) = max over cuts; for concave f,
 * f(x) = min over cuts.
 */
inline std::vector<Cut> cuts(const PwlFunction& f) {
    if (!verify_shape(f, Shape::convex) && !verify_shape(f, Shape::concave))
        throw std::invalid_argument("cuts: function is neither convex nor concave");
    const auto& pts = f.points();
    const auto s = f.slopes();
    std::vector<Cut> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!out.empty() && std::abs(s[i] - out.back().slope) <= kSlopeTolerance) continue;
        // Segment i touches breakpoint i (left end) for i >= 1, and breakpoint 0 for the left extension.
        const Breakpoint& anchor = (i == 0) ? pts.front() : pts[i - 1];
        out.push_back({s[i], anchor.value - s[i] * anchor.arg});
    }
    return out;
}

inline double max_of_cuts(const std::vector<Cut>& cs, double x) {
    double best = -INFINITY;
    for (const auto& c : cs) best = std::max(best, c(x));
    return best;
}

inline double min_of_cuts(const std::vector<Cut>& cs, double x) {
    double best = INFINITY;
    for (const auto& c : cs) best = std::min(best, c(x));
    return best;
}

// Shapes used by the experiment scenarios.

inline PwlFunction linear_function(double slope) { return PwlFunction({{0.0, 0.0}}, slope, slope); }

/// slope * min(x, cap): linear up to the demand cap, flat afterwards.
inline PwlFunction capped_linear(double slope, double cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("capped_linear: cap must be positive");
    return PwlFunction({{0.0, 0.0}, {cap, slope * cap}}, slope, 0.0);
}

/// slope * max(x, 0).
inline PwlFunction hinge(double slope) { return PwlFunction({{0.0, 0.0}}, 0.0, slope); }

/// True when f vanishes on (-inf, 0].
inline bool zero_on_nonpositive(const PwlFunction& f) {
    if (std::abs(f(0.0)) > kSlopeTolerance) return false;
    for (const auto& p : f.points())
        if (p.arg < 0.0 && std::abs(p.value) > kSlopeTolerance) return false;
    return std::abs(f.left_slope()) <= kSlopeTolerance;
}

}  // namespace reservoir

#endif  // RESERVOIR_PWL_HPP

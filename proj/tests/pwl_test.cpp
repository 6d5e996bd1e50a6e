#include <gtest/gtest.h>

#include <random>

#include "reservoir/pwl.hpp"

namespace reservoir {
namespace {

TEST(PwlEvaluate, CappedLinearIsConstantPastTheCap) { EXPECT_DOUBLE_EQ(capped_linear(1.0, 2.0)(3.0), 2.0); }

TEST(PwlEvaluate, HingeIsZeroOnNegativeArguments) { EXPECT_DOUBLE_EQ(hinge(2.5)(-1.0), 0.0); }

TEST(PwlEvaluate, HingeLinearSegment) { EXPECT_DOUBLE_EQ(evaluate(hinge(2.5), 2.0), 5.0); }

TEST(PwlEvaluate, InterpolatesBetweenBreakpoints) {
    PwlFunction f({{0.0, 0.0}, {2.0, 4.0}, {4.0, 5.0}}, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(f(1.0), 2.0);
    EXPECT_DOUBLE_EQ(f(3.0), 4.5);
    EXPECT_DOUBLE_EQ(f(-2.0), -2.0);
    EXPECT_DOUBLE_EQ(f(10.0), 5.0);
}

TEST(PwlConstruct, RejectsUnsortedBreakpoints) {
    EXPECT_THROW(PwlFunction({{1.0, 0.0}, {1.0, 1.0}}, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(PwlFunction({}, 0.0, 0.0), std::invalid_argument);
}

TEST(PwlShape, LinearFunctionHasEveryShape) {
    PwlFunction f({{0.0, 0.0}, {1.0, 1.0}}, 1.0, 1.0);
    EXPECT_TRUE(verify_shape(f, Shape::convex | Shape::concave | Shape::nondecreasing).ok);
}

TEST(PwlShape, DecreasingSlopesAreNotConvex) {
    PwlFunction f({{0.0, 0.0}}, 2.0, 1.0);
    auto r = verify_shape(f, Shape::convex);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.segment, 1u);
    EXPECT_TRUE(has(r.failed, Shape::convex));
}

TEST(PwlShape, HingeIsConvexNondecreasing) {
    EXPECT_TRUE(verify_shape(PwlFunction({{0.0, 0.0}}, 0.0, 2.5), Shape::convex | Shape::nondecreasing).ok);
}

TEST(PwlShape, NegativeSlopeFailsMonotonicity) {
    auto r = verify_shape(linear_function(-1.0), Shape::nondecreasing);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.failed, Shape::nondecreasing);
}

TEST(PwlCuts, CappedLinearHypograph) {
    auto cs = cuts(capped_linear(1.0, 2.0));
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0], (Cut{1.0, 0.0}));
    EXPECT_EQ(cs[1], (Cut{0.0, 2.0}));
    EXPECT_DOUBLE_EQ(min_of_cuts(cs, 1.0), 1.0);
}

TEST(PwlCuts, HingeEpigraph) {
    auto cs = cuts(hinge(2.5));
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0], (Cut{0.0, 0.0}));
    EXPECT_EQ(cs[1], (Cut{2.5, 0.0}));
    EXPECT_DOUBLE_EQ(max_of_cuts(cs, 2.0), 5.0);
}

TEST(PwlCuts, NeitherConvexNorConcaveIsRejected) {
    PwlFunction zigzag({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}}, 0.0, 1.0);
    EXPECT_THROW(cuts(zigzag), std::invalid_argument);
}

TEST(PwlCuts, RandomConvexMaxOfCutsMatchesEvaluate) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Breakpoint> pts;
        double x = -3.0 + u(rng), y = u(rng), slope = -2.0 + u(rng);
        const double left = slope;
        pts.push_back({x, y});
        for (int i = 0; i < 3; ++i) {
            slope += u(rng);
            double dx = 0.5 + 2.0 * u(rng);
            x += dx;
            y += slope * dx;
            pts.push_back({x, y});
        }
        PwlFunction f(pts, left, slope + u(rng));
        ASSERT_TRUE(verify_shape(f, Shape::convex).ok);
        auto cs = cuts(f);
        for (int k = 0; k < 100; ++k) {
            double at = -10.0 + 20.0 * u(rng);
            EXPECT_NEAR(max_of_cuts(cs, at), f(at), 1e-9);
        }
    }
}

TEST(PwlScale, ScalesValuesAndSlopes) {
    auto f = capped_linear(1.0, 2.0).scaled(3.0);
    EXPECT_DOUBLE_EQ(f(1.0), 3.0);
    EXPECT_DOUBLE_EQ(f.max_abs_slope(), 3.0);
    EXPECT_THROW(f.scaled(0.0), std::invalid_argument);
}

TEST(PwlZero, HingeVanishesOnNonpositive) {
    EXPECT_TRUE(zero_on_nonpositive(hinge(1.0)));
    EXPECT_FALSE(zero_on_nonpositive(linear_function(1.0)));
}

}  // namespace
}  // namespace reservoir

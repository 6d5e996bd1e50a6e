#include <gtest/gtest.h>

#include <filesystem>

#include "reservoir/builtin.hpp"
#include "reservoir/scenario_io.hpp"
#include "reservoir/sweep.hpp"
#include "support/generators.hpp"

namespace reservoir {
namespace {

const char* kMinimal = R"({
  "name": "mini",
  "horizon": 2,
  "reservoirs": [{"id": 1, "max_volume": 10, "initial_volume": 2, "final_min_volume": 1},
                 {"id": 2, "max_volume": 8, "initial_volume": 1, "final_min_volume": 0}],
  "links": [{"from": 1, "to": 2, "capacity": 3}],
  "functions": [
    {"kind": "profit", "breakpoints": [[0, 0], [2, 2]], "left_slope": 1, "right_slope": 0},
    {"kind": "profit", "period": 2, "reservoir": 2, "breakpoints": [[0, 0], [3, 6]], "left_slope": 2, "right_slope": 0},
    {"kind": "risk", "breakpoints": [[0, 0]], "left_slope": 0, "right_slope": 2.5},
    {"kind": "transfer_cost", "breakpoints": [[0, 0]], "left_slope": 0.25, "right_slope": 0.25}
  ],
  "distributions": [
    {"support": [[0, 0.5], [4, 0.5]]},
    {"period": 2, "reservoir": 1, "support": [[1, 1.0]], "provenance": "published"}
  ]
})";

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "reservoir_scenarios_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

TEST(ScenarioParse, SelectorsAndOverrides) {
    Scenario s = parse_scenario(kMinimal);
    EXPECT_EQ(s.periods, 2u);
    ASSERT_EQ(s.links.size(), 1u);
    EXPECT_EQ(s.links[0].from, 0u);
    EXPECT_EQ(s.links[0].to, 1u);
    EXPECT_DOUBLE_EQ(s.profit[0][1](5.0), 2.0);
    EXPECT_DOUBLE_EQ(s.profit[1][1](5.0), 6.0);
    EXPECT_TRUE(s.inflow[1][0].is_point_mass());
    EXPECT_EQ(s.inflow[1][0].provenance, Provenance::published);
    EXPECT_EQ(s.inflow[0][0].support.size(), 2u);
    EXPECT_FALSE(s.penalty.has_value());
}

TEST(ScenarioParse, MissingHorizonNamesTheKey) {
    auto j = nlohmann::json::parse(kMinimal);
    j.erase("horizon");
    try {
        parse_scenario(j.dump());
        FAIL() << "expected a parse error";
    } catch (const ScenarioParseError& e) {
        EXPECT_NE(std::string(e.what()).find("horizon"), std::string::npos) << e.what();
    }
}

TEST(ScenarioParse, ProbabilityDeficitIsForwardedFromValidation) {
    auto j = nlohmann::json::parse(kMinimal);
    j["distributions"][0]["support"] = {{0, 0.5}, {1, 0.4}};
    try {
        parse_scenario(j.dump());
        FAIL() << "expected a validation failure";
    } catch (const ScenarioError& e) {
        EXPECT_TRUE(e.report().mentions("distribution sums to 0.9")) << e.what();
    }
}

TEST(ScenarioParse, RejectsUncoveredGridsAndBadShapes) {
    auto j = nlohmann::json::parse(kMinimal);
    j["distributions"].erase(0);
    EXPECT_THROW(parse_scenario(j.dump()), ScenarioParseError);
    auto k = nlohmann::json::parse(kMinimal);
    k["functions"][2]["right_slope"] = -1;
    EXPECT_ANY_THROW(parse_scenario(k.dump()));
    EXPECT_THROW(parse_scenario("{not json"), ScenarioParseError);
}

TEST(ScenarioRoundTrip, BuiltinsSurviveSaveAndLoad) {
    for (const auto& name : builtin_names()) {
        Scenario s = builtin_scenario(name);
        auto path = temp_file(name + ".json");
        save_scenario(s, path.string());
        EXPECT_EQ(load_scenario(path.string()), s) << name;
    }
}

TEST(ScenarioRoundTrip, RandomScenariosAndPenalties) {
    testing::Rng rng(21);
    for (int i = 0; i < 30; ++i) {
        Scenario s = testing::random_scenario(rng);
        if (i % 3 == 0) s.penalty = make_grid(s.periods, s.reservoirs.size(), 17.5);
        if (i % 3 == 1) {
            s.penalty = make_grid(s.periods, s.reservoirs.size(), 5.0);
            (*s.penalty)[0][0] = 9.0;
        }
        EXPECT_EQ(parse_scenario(scenario_to_json(s).dump()), s) << i;
    }
}

TEST(Builtin, SimpleCases) {
    for (int c : {1, 2}) {
        Scenario s = builtin_simple(c);
        EXPECT_TRUE(validate_scenario(s).ok());
        EXPECT_EQ(s.periods, 3u);
        ASSERT_EQ(s.reservoirs.size(), 2u);
        for (const auto& r : s.reservoirs) {
            EXPECT_EQ(r.max_volume, 10.0);
            EXPECT_EQ(r.initial_volume, 1.0);
            EXPECT_EQ(r.final_min_volume, 1.0);
        }
        for (const auto& l : s.links) EXPECT_EQ(l.capacity, 5.0);
        EXPECT_EQ(s.inflow[1][1], DiscreteDistribution::point_mass(0.0, Provenance::published));
    }
}

TEST(Builtin, AngPuang) {
    Scenario s = builtin_angpuang();
    EXPECT_TRUE(validate_scenario(s).ok());
    EXPECT_EQ(s.periods, 6u);
    EXPECT_EQ(s.reservoirs.size(), 8u);
    for (const auto& l : s.links) EXPECT_EQ(l.capacity, 2.5);
    for (const auto& row : s.risk)
        for (const auto& r : row) EXPECT_EQ(r.max_abs_slope(), 2.5);
    for (std::size_t t = 2; t < 6; ++t)
        for (const auto& d : s.inflow[t]) {
            EXPECT_TRUE(d.is_point_mass());
            EXPECT_EQ(d.support[0].value, 0.0);
        }
    EXPECT_THROW(builtin_scenario("nowhere"), std::invalid_argument);
    EXPECT_EQ(resolve_scenario("builtin:simple2"), builtin_simple(2));
}

TEST(Sweep, TransferCostGridChangesOnlyCosts) {
    SweepConfig c{"builtin:simple1", SweepParameter::transfer_cost_slope, {0.25, 0.5, 1.0, 2.0}};
    auto out = expand_sweep(c);
    ASSERT_EQ(out.size(), 4u);
    Scenario base = builtin_simple(1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(out[i].transfer_cost[0][0].max_abs_slope(), c.grid[i]);
        Scenario same = out[i];
        same.transfer_cost = base.transfer_cost;
        same.name = base.name;
        EXPECT_EQ(same, base);
    }
}

TEST(Sweep, FullFractionFillsEveryReservoir) {
    SweepConfig c{"builtin:angpuang", SweepParameter::initial_volume_fraction, {1.0}};
    auto out = expand_sweep(c);
    for (const auto& r : out.front().reservoirs) {
        EXPECT_EQ(r.initial_volume, r.max_volume);
        EXPECT_EQ(r.final_min_volume, r.max_volume);
    }
}

TEST(Sweep, RejectsEmptyAndInadmissibleGrids) {
    EXPECT_THROW(validate_sweep({"builtin:simple1", SweepParameter::risk_slope, {}}), SweepError);
    try {
        validate_sweep({"builtin:simple1", SweepParameter::initial_volume_fraction, {0.5, 1.5}});
        FAIL();
    } catch (const SweepError& e) {
        EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos);
    }
}

TEST(Sweep, ConfigJsonRoundTrip) {
    SweepConfig c{"builtin:angpuang", SweepParameter::profit_slope, {0.5, 1.0, 2.0}, 40, 11};
    auto back = sweep_from_json(sweep_to_json(c));
    EXPECT_EQ(back.base, c.base);
    EXPECT_EQ(back.parameter, c.parameter);
    EXPECT_EQ(back.grid, c.grid);
    EXPECT_EQ(back.replications, 40u);
    EXPECT_EQ(back.seed, 11u);
    EXPECT_THROW(sweep_from_json({{"base", "x"}, {"grid", {1.0}}}), ScenarioParseError);
}

}  // namespace
}  // namespace reservoir

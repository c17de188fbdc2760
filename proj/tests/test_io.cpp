#include <charconv>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "samdamp/io/csv.hpp"
#include "samdamp/io/scenario.hpp"

using namespace samdamp;
using namespace samdamp::io;

TEST(Csv, FormatRoundTrips) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 2000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(back, v) << s;
    ++checked;
  }
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(Csv, TableShapeAndSave) {
  CsvTable t({"a", "b"});
  t.add_row({1.5, -2.0});
  EXPECT_EQ(t.str(), "a,b\n1.5,-2\n");
  EXPECT_THROW(t.add_row({1.0}), StructuralError);
  EXPECT_THROW(t.save("/nonexistent-dir/x.csv"), IoError);
}

TEST(Csv, TrajectoryHeaders) {
  const auto planar = trajectory_columns(PlanarPlant{PendulumParams{}});
  std::string joined = "t";
  for (const auto& c : planar) joined += "," + c;
  EXPECT_EQ(joined, "t,q1,q2,q1dot,q2dot,theta,wb,wb_lp,vb,F,T,energy");
  const auto spatial = trajectory_columns(SpatialPlant{PendulumParams{}});
  EXPECT_EQ(spatial.front(), "phi1x");
  EXPECT_EQ(spatial.back(), "energy");
}

TEST(Scenario, DefaultsResolveHardwareCutoff) {
  const Scenario s = parse_scenario("{}");
  EXPECT_EQ(s.model, ModelKind::planar);
  EXPECT_NEAR(s.controller.tau, 1.0 / (2 * std::numbers::pi * 0.76), 1e-15);
  EXPECT_EQ(s.sim.seed, 0u);
}

TEST(Scenario, MidpointCutoffFromModel) {
  const Scenario s = parse_scenario(R"({"controller": {"tau": "midpoint"}})");
  EXPECT_NEAR(s.cutoff_hz, 0.471, 1e-3);
  EXPECT_NEAR(s.controller.tau, 0.338, 1e-3);
  const Scenario t = parse_scenario(R"({"controller": {"tau": 0.5}})");
  EXPECT_EQ(t.controller.tau, 0.5);
}

TEST(Scenario, DegreesConverted) {
  const Scenario s = parse_scenario(R"({"initial": {"q1": 90, "q2": 45, "q1dot": 180}})");
  EXPECT_NEAR(s.planar_initial.q1, std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(s.planar_initial.q2, std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(s.planar_initial.q1dot, std::numbers::pi, 1e-15);
}

namespace {

std::string error_field(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST(Scenario, ErrorsNameTheField) {
  EXPECT_EQ(error_field(R"({"params": {"l1": -6}})"), "params.l1");
  EXPECT_EQ(error_field(R"({"params": {"mass": 3}})"), "params.mass");
  EXPECT_EQ(error_field(R"({"colour": 1})"), "colour");
  EXPECT_EQ(error_field(R"({"controller": {"kv": -1}})"), "controller.kv");
  EXPECT_EQ(error_field(R"({"controller": {"tau": 0.2, "cutoff_hz": 1}})"), "controller.tau");
  EXPECT_EQ(error_field(R"({"controller": {"tau": "fast"}})"), "controller.tau");
  EXPECT_EQ(error_field(R"({"initial": {"q2": 95}})"), "initial.q2");
  EXPECT_EQ(error_field(R"({"disturbances": [{"start": 1}]})"), "disturbances[0].type");
  EXPECT_EQ(error_field(R"({"weights": {"q": [1, 2]}})"), "weights.q");
  EXPECT_EQ(error_field(R"({"synthesis": {"xi_init": "zero"}})"), "synthesis.xi_init");
  EXPECT_EQ(error_field(R"({"compare": {"controllers": ["ideal", "ideal"]}})"), "compare.controllers");
  EXPECT_EQ(error_field("{not json"), "config");
  const std::string msg = [] {
    try {
      parse_scenario(R"({"params": {"l1": -6}})");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  }();
  EXPECT_NE(msg.find("l1"), std::string::npos);
}

TEST(Scenario, MissingFileIsIoError) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), IoError);
}

TEST(Scenario, BundledConfigsValidate) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SAMDAMP_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_EQ(count, 5);
  const Scenario fig8 = load_scenario(std::string(SAMDAMP_CONFIG_DIR) + "/fig8_compare.json");
  EXPECT_EQ(fig8.model, ModelKind::spatial);
  ASSERT_EQ(fig8.disturbances.size(), 1u);
  EXPECT_EQ(fig8.disturbances[0].kind, DisturbanceKind::jerk);
  const Scenario grid = load_scenario(std::string(SAMDAMP_CONFIG_DIR) + "/grid_3e.json");
  EXPECT_EQ(grid.grid.cells(), 147u);
}

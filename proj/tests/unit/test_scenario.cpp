#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "qmem/scenario.hpp"

using namespace qmem;
using nlohmann::json;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "qmem_scenario_test";
  std::filesystem::create_directories(d);
  return d / name;
}

std::string error_of(const json& j) {
  try {
    scenario_from_json(j).validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, RoundTrip) {
  ScenarioConfig c;
  c.master_seed = 0xfedcba9876543210ULL;
  c.protocol.T1_nuc_ms.reset();
  c.protocol.M = 77;
  c.signal.mode = "statistical";
  c.analysis.B_test_gauss = 0.5;
  c.initialization.nuclear_populations = {0.2, 0.3, 0.5};
  const auto path = tmp_file("round.json");
  save_scenario(c, path);
  const auto d = load_scenario(path);
  EXPECT_EQ(to_json(c), to_json(d));
  EXPECT_EQ(d.master_seed, c.master_seed);
  EXPECT_FALSE(d.protocol.T1_nuc_ms.has_value());
  EXPECT_EQ(d.analysis.B_test_gauss, 0.5);
}

TEST(Scenario, UnitConversions) {
  ScenarioConfig c;
  const auto p = c.protocol_config();
  EXPECT_DOUBLE_EQ(p.T, 15.063e-6);
  EXPECT_DOUBLE_EQ(p.T_init, 101.57e-6);
  EXPECT_DOUBLE_EQ(p.t_laser, 200e-9);
  EXPECT_DOUBLE_EQ(p.T1_nuc, 0.7);
  EXPECT_DOUBLE_EQ(p.T1_nuc_laser, 210e-6);
  c.protocol.T1_nuc_laser_us.reset();
  EXPECT_TRUE(std::isinf(c.protocol_config().T1_nuc_laser));
  const auto s = c.spin_params();
  EXPECT_NEAR(s.D, 2 * M_PI * 2870e6, 1e-3);
  EXPECT_NEAR(s.gamma_n, 2 * M_PI * 308.0, 1e-9);
  EXPECT_EQ(c.signal_config().n_sensors, c.protocol.N);
}

TEST(Scenario, PartialSectionsUseDefaults) {
  const auto c = scenario_from_json(json{{"protocol", {{"M", 10}}}});
  EXPECT_EQ(c.protocol.M, 10);
  EXPECT_EQ(c.protocol.N, ScenarioConfig{}.protocol.N);
  EXPECT_EQ(c.readout.noise, "two-stage");
}

TEST(Scenario, UnknownKeyNamesField) {
  const auto e = error_of(json{{"protocol", {{"Mx", 10}}}});
  EXPECT_NE(e.find("protocol"), std::string::npos);
  EXPECT_NE(e.find("Mx"), std::string::npos);
  EXPECT_NE(error_of(json{{"extra", 1}}), "");
}

TEST(Scenario, TypeMismatchNamesField) {
  const auto e = error_of(json{{"protocol", {{"M", "many"}}}});
  EXPECT_NE(e.find("protocol.M"), std::string::npos);
}

TEST(Scenario, ValidationErrors) {
  EXPECT_NE(error_of(json{{"protocol", {{"N", 0}}}}).find("protocol.N"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 99}}).find("schema_version"), std::string::npos);
  EXPECT_NE(error_of(json{{"protocol", {{"protocol", "ramsey"}}}}), "");
  EXPECT_NE(error_of(json{{"readout", {{"noise", "loud"}}}}), "");
  EXPECT_NE(error_of(json{{"signal", {{"mode", "quantum"}}}}), "");
  EXPECT_NE(error_of(json{{"initialization", {{"nuclear_populations", {0.5, 0.6, 0.1}}}}}), "");
  EXPECT_NE(error_of(json{{"analysis", {{"pad_factor", 0}}}}), "");
  EXPECT_NE(error_of(json{{"analysis", {{"window", "kaiser"}}}}), "");
  EXPECT_EQ(error_of(json::object()), "");
}

TEST(Scenario, BadFiles) {
  EXPECT_ANY_THROW(load_scenario(tmp_file("does_not_exist.json")));
  const auto p = tmp_file("broken.json");
  std::ofstream(p) << "{ not json";
  EXPECT_THROW(load_scenario(p), std::invalid_argument);
}

TEST(Scenario, ShippedConfigsLoad) {
  for (const char* name : {"mcs_recovery.json", "compare_statistical.json", "qdyne_classical.json"}) {
    SCOPED_TRACE(name);
    EXPECT_NO_THROW(load_scenario(std::filesystem::path(QMEM_CONFIG_DIR) / name).validate());
  }
}

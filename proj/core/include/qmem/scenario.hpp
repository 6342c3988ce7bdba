#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qmem/protocol_engine.hpp"
#include "qmem/readout_model.hpp"
#include "qmem/signal_model.hpp"
#include "qmem/spin_system.hpp"

namespace qmem {

inline constexpr int kSchemaVersion = 1;

// Scenario fields are kept in file units (unit in the key name) so that
// serialization round-trips exactly; conversion to internal SI/angular
// units happens in the accessors.
struct SpinSection {
  double D_MHz = 2870.0;
  double A_par_MHz = -2.166;
  double P_quad_MHz = -4.945;
  double gamma_nv_MHz_per_G = 2.803;
  double gamma_n_kHz_per_G = 0.308;
  double B_gauss = 2043.763;
};

struct SignalSection {
  std::string mode = "classical";
  double nu_s_Hz = 1.0e6;
  double B_gauss = 0.041;
};

struct GateSection {
  double strong_rabi_MHz = 50.0;
  double selective_mw_fraction = 0.01;
  double selective_rf_fraction = 0.01;
  double detuning_mw_MHz = 0.0;
  double detuning_rf_MHz = 0.0;
};

struct ProtocolSection {
  std::string protocol = "mcs";
  int M = 1991;
  int N = 100;
  double T_us = 15.063;
  double T_init_us = 101.57;
  double t_DD_us = 4.0;
  int xy8_repeats = 1;
  double t_laser_ns = 200.0;
  std::optional<double> T1_nuc_ms = 700.0;      // null = no intrinsic decay
  std::optional<double> T1_nuc_laser_us = 210.0;  // null = no laser decay
  double init_fidelity = 1.0;
  double t_wait_us = 0.0;
  int lasers_per_acquisition = 1;
  bool decay = true;
  std::string mode = "ideal";
  GateSection gates;
};

struct InitSection {
  std::string mode = "ideal";  // "ideal" (pure |1>) or "sequence"
  std::array<double, 3> nuclear_populations{0.606, 0.285, 0.109};
  bool second_step = false;
};

struct ReadoutSection {
  double eta0 = 0.03;
  double eta1 = 0.02;
  std::string noise = "two-stage";
};

struct AnalysisSection {
  int pad_factor = 4;
  std::string window = "rectangular";
  double lorentzian_window_Hz = 0.0;  // 0 = automatic
  bool fit_time_domain = true;
  std::optional<double> B_test_gauss;  // defaults to the signal field
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  SpinSection spin_system;
  SignalSection signal;
  ProtocolSection protocol;
  InitSection initialization;
  ReadoutSection readout;
  AnalysisSection analysis;

  SpinSystemParams spin_params() const;
  SignalConfig signal_config() const;
  ProtocolConfig protocol_config() const;
  ReadoutParams readout_params() const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const ScenarioConfig& cfg);
// Unknown keys and type mismatches are rejected with the field path.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

}  // namespace qmem

#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/density_matrix.hpp"
#include "qmem/pulse_gates.hpp"
#include "qmem/signal_model.hpp"
#include "qmem/spin_system.hpp"
#include "qmem/units.hpp"

namespace qmem {

enum class Protocol { MCS, CS, QDyne };
enum class EvolutionMode { Ideal, Physical };

std::string_view to_string(Protocol p);
std::string_view to_string(EvolutionMode m);
Protocol protocol_from_string(std::string_view s);
EvolutionMode evolution_mode_from_string(std::string_view s);

inline constexpr double kForever = std::numeric_limits<double>::infinity();

// Physical-mode pulse parameters. Selective Rabi frequencies are given as a
// fraction of |A_par|.
struct GateConfig {
  double strong_rabi = units::two_pi * 50e6;
  double selective_mw_fraction = 0.01;
  double selective_rf_fraction = 0.01;
  double detuning_mw = 0.0;  // rad/s
  double detuning_rf = 0.0;  // rad/s
};

struct ProtocolConfig {
  Protocol protocol = Protocol::MCS;
  int M = 100;
  int N = 1;
  double T = 15.063e-6;       // s, acquisition period
  double T_init = 101.57e-6;  // s
  double t_DD = 4e-6;         // s
  int xy8_repeats = 1;
  double t_laser = 200e-9;          // s
  double T1_nuc = kForever;         // s
  double T1_nuc_laser = kForever;   // s
  double init_fidelity = 1.0;
  double t_wait = 0.0;              // s, extra idle per MCS cycle
  int lasers_per_acquisition = 1;
  bool decay = true;
  EvolutionMode mode = EvolutionMode::Ideal;
  GateConfig gates;

  double period() const { return T + t_wait; }
  void validate() const;
};

struct PopulationRecord {
  int k = 0;
  double p0_e = 0.5;
  double memory_polarization = 0.0;
};

struct GateSet {
  Propagator4 pi2_x;
  Propagator4 pi2_y;
  Propagator4 pi2_my;  // readout pulse for the memory-free protocol
  Propagator4 cnnote;
  Propagator4 cenotn;
  EvolutionMode mode = EvolutionMode::Ideal;
};

GateSet build_gate_set(const ProtocolConfig& cfg, const SpinSystemParams& params);
GateSet ideal_gate_set();

// Starting state of one run. Weight outside the 4-state subspace (m_I = -1)
// is a spectator: it only sees electron reinit and the strong pulses.
struct InitialState {
  DensityMatrix4 rho = DensityMatrix4::pure(BasisState::E0_N0);
  double subspace_weight = 1.0;
};

// Six populations over (m_s, m_I) in order
// |0,+1>, |0,0>, |0,-1>, |-1,+1>, |-1,0>, |-1,-1>.
struct InitLedgerEntry {
  std::string step;
  std::array<double, 6> populations{};
};

struct InitializationResult {
  InitialState state;
  std::vector<InitLedgerEntry> ledger;
  double p_nuclear_zero_after_step3 = 0.0;
};

// Steps 1-4 of the nuclear preparation. initial_nuclear_populations is
// ordered (m_I = +1, 0, -1). second_step also pumps m_I = -1.
InitializationResult initialize_system(const SpinSystemParams& params, double init_fidelity,
                                       const std::array<double, 3>& initial_nuclear_populations,
                                       const GateSet& gates, bool second_step = false);
InitializationResult initialize_system(const SpinSystemParams& params, double init_fidelity,
                                       const std::array<double, 3>& initial_nuclear_populations);

// Electron repump: rho -> f |0><0| (x) Tr_e rho + (1 - f) I/2 (x) Tr_e rho.
DensityMatrix4 electron_reinit_channel(const DensityMatrix4& rho, double fidelity);

// Nuclear relaxation toward the unpolarized mixture; polarization is scaled
// by exp(-dt_free/T1_nuc) exp(-n_lasers t_laser/T1_nuc_laser).
double memory_decay_factor(double dt_free, int n_lasers, const ProtocolConfig& cfg);
DensityMatrix4 memory_decay_channel(const DensityMatrix4& rho, double dt_free, int n_lasers,
                                    const ProtocolConfig& cfg);

// rho_13, rho_24 (and the cross coherences) pick up e^{-i phi}.
void inject_phase(DensityMatrix4& rho, double phi);

struct McsStepStates {
  DensityMatrix4 II_1, II_2, II_3, II_4;
  DensityMatrix4 III_1, III_2, III_3;
};

// Intermediate states of one MCS cycle from |1>, no decay, perfect reinit.
McsStepStates mcs_step_states(double phi0, double phik, const GateSet& gates);

// Phase accumulated in acquisition k (k = 0 is the stored one).
double acquisition_phase(const ProtocolConfig& cfg, const SpinSystemParams& params,
                         const SignalConfig& sig, const SignalRealization& r, int k);

// Gate pipeline with explicit phases; phik[k-1] is the phase of acquisition k.
std::vector<PopulationRecord> mcs_run_phases(const ProtocolConfig& cfg, const GateSet& gates,
                                             const InitialState& init, double phi0,
                                             std::span<const double> phik);

std::vector<PopulationRecord> mcs_run(const ProtocolConfig& cfg, const SpinSystemParams& params,
                                      const SignalConfig& sig, const SignalRealization& r,
                                      const GateSet& gates, const InitialState& init = {});

PopulationRecord cs_run_phases(const ProtocolConfig& cfg, const GateSet& gates,
                               const InitialState& init, double phi0, double phik, int k);

PopulationRecord cs_run(const ProtocolConfig& cfg, const SpinSystemParams& params,
                        const SignalConfig& sig, const SignalRealization& r, int k,
                        const GateSet& gates, const InitialState& init = {});

double cs_wall_time(const ProtocolConfig& cfg, int k);
double cs_total_wall_time(const ProtocolConfig& cfg);
double mcs_total_wall_time(const ProtocolConfig& cfg);

// Sensor-only readout of the phase averaged over all sensors.
PopulationRecord qdyne_step(const ProtocolConfig& cfg, const GateSet& gates, double phi_mean, int k);

// Records k = 1..M for an ensemble read out simultaneously.
std::vector<PopulationRecord> qdyne_run(const ProtocolConfig& cfg, const SpinSystemParams& params,
                                        const SignalConfig& sig,
                                        std::span<const SignalRealization> sensors,
                                        const GateSet& gates);

struct OdmrSpectrum {
  std::vector<double> freq_hz;
  std::vector<double> signal;
};

// Baseline 1 minus three Gaussian dips (sigma = linewidth_hz) at the MW
// lines; dip amplitude contrast * population so areas follow populations.
OdmrSpectrum simulate_odmr(const SpinSystemParams& params,
                           const std::array<double, 3>& nuclear_populations, double contrast,
                           double linewidth_hz, std::span<const double> freq_grid_hz);

}  // namespace qmem

#include "qmem/protocol_engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmem {

namespace {

using Matrix6c = Eigen::Matrix<cplx, 6, 6>;
constexpr cplx I1{0.0, 1.0};

// 4-state index -> 6-state index (3*e + n_idx, n_idx: 0n, +1n, -1n)
constexpr std::array<int, 4> kSub = {0, 1, 3, 4};
// ledger order |0,+1>, |0,0>, |0,-1>, |-1,+1>, |-1,0>, |-1,-1>
constexpr std::array<int, 6> kLedger = {1, 0, 2, 4, 3, 5};

Matrix6c embed(const Matrix4c& U) {
  Matrix6c V = Matrix6c::Identity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) V(kSub[i], kSub[j]) = U(i, j);
  return V;
}

Matrix6c swap6(int a, int b) {
  Matrix6c V = Matrix6c::Identity();
  V(a, a) = 0.0;
  V(b, b) = 0.0;
  V(a, b) = -I1;
  V(b, a) = -I1;
  return V;
}

Matrix6c reinit6(const Matrix6c& rho, double f) {
  Eigen::Matrix<cplx, 3, 3> rn = rho.block<3, 3>(0, 0) + rho.block<3, 3>(3, 3);
  Matrix6c out = Matrix6c::Zero();
  out.block<3, 3>(0, 0) = (f + 0.5 * (1.0 - f)) * rn;
  out.block<3, 3>(3, 3) = (0.5 * (1.0 - f)) * rn;
  return out;
}

InitLedgerEntry ledger_entry(std::string name, const Matrix6c& rho) {
  InitLedgerEntry e;
  e.step = std::move(name);
  for (int i = 0; i < 6; ++i) e.populations[i] = rho(kLedger[i], kLedger[i]).real();
  return e;
}

void check_simplex(const std::array<double, 3>& p, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !(x <= 1.0)) {
      throw std::invalid_argument(std::string(what) + ": populations must lie in [0, 1]");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) + ": populations must sum to 1 (got " +
                                std::to_string(sum) + ")");
  }
}

void spectator_mix(PopulationRecord& rec, const InitialState& init, double fidelity, double phik) {
  const double w = init.subspace_weight;
  if (w >= 1.0) return;
  const double p_spec = fidelity * 0.5 * (1.0 - std::sin(phik)) + 0.5 * (1.0 - fidelity);
  rec.p0_e = w * rec.p0_e + (1.0 - w) * p_spec;
  rec.memory_polarization *= w;
}

void acquisition(DensityMatrix4& rho, const GateSet& g, double phi, const Propagator4& readout) {
  rho.apply_inplace(g.pi2_x);
  inject_phase(rho, phi);
  rho.apply_inplace(g.pi2_y);
  rho.apply_inplace(readout);
}

}  // namespace

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::MCS: return "mcs";
    case Protocol::CS: return "cs";
    case Protocol::QDyne: return "qdyne";
  }
  return "?";
}

std::string_view to_string(EvolutionMode m) {
  return m == EvolutionMode::Ideal ? "ideal" : "physical";
}

Protocol protocol_from_string(std::string_view s) {
  if (s == "mcs" || s == "MCS") return Protocol::MCS;
  if (s == "cs" || s == "CS") return Protocol::CS;
  if (s == "qdyne" || s == "QDyne") return Protocol::QDyne;
  throw std::invalid_argument("protocol must be one of mcs, cs, qdyne; got '" + std::string(s) +
                              "'");
}

EvolutionMode evolution_mode_from_string(std::string_view s) {
  if (s == "ideal") return EvolutionMode::Ideal;
  if (s == "physical") return EvolutionMode::Physical;
  throw std::invalid_argument("mode must be 'ideal' or 'physical'; got '" + std::string(s) + "'");
}

void ProtocolConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("protocol." + m); };
  if (M < 1) fail("M must be >= 1");
  if (N < 1) fail("N must be >= 1");
  if (!(T > 0.0)) fail("T_us must be > 0");
  if (!(t_DD >= 0.0)) fail("t_DD_us must be >= 0");
  if (!(T >= t_DD)) fail("T_us must be >= t_DD_us");
  if (!(T_init >= 0.0)) fail("T_init_us must be >= 0");
  if (!(t_laser >= 0.0)) fail("t_laser_ns must be >= 0");
  if (!(t_wait >= 0.0)) fail("t_wait_us must be >= 0");
  if (!(T1_nuc > 0.0)) fail("T1_nuc_ms must be > 0");
  if (!(T1_nuc_laser > 0.0)) fail("T1_nuc_laser_us must be > 0");
  if (!(init_fidelity >= 0.0 && init_fidelity <= 1.0)) fail("init_fidelity must be in [0, 1]");
  if (lasers_per_acquisition < 0) fail("lasers_per_acquisition must be >= 0");
  if (xy8_repeats < 1) fail("xy8_repeats must be >= 1");
  if (!(gates.strong_rabi > 0.0)) fail("gates.strong_rabi must be > 0");
  if (!(gates.selective_mw_fraction > 0.0) || !(gates.selective_rf_fraction > 0.0)) {
    fail("gates selective fractions must be > 0");
  }
}

GateSet ideal_gate_set() {
  GateSet g;
  g.pi2_x = strong_mw_propagator(units::pi / 2, 0.0);
  g.pi2_y = strong_mw_propagator(units::pi / 2, units::pi / 2);
  g.pi2_my = strong_mw_propagator(units::pi / 2, -units::pi / 2);
  g.cnnote = cnnote_propagator();
  g.cenotn = cenotn_propagator();
  g.mode = EvolutionMode::Ideal;
  return g;
}

GateSet build_gate_set(const ProtocolConfig& cfg, const SpinSystemParams& params) {
  if (cfg.mode == EvolutionMode::Ideal) return ideal_gate_set();
  const GateConfig& gc = cfg.gates;
  auto strong = [&](double phase) {
    PulseSpec s{PulseKind::StrongMW, gc.strong_rabi, phase, units::pi / 2, gc.detuning_mw,
                gc.detuning_rf};
    return finite_duration_propagator(s, params);
  };
  const double a = std::abs(params.A_par);
  GateSet g;
  g.pi2_x = strong(0.0);
  g.pi2_y = strong(units::pi / 2);
  g.pi2_my = strong(-units::pi / 2);
  g.cnnote = finite_duration_propagator(
      PulseSpec{PulseKind::SelectiveMW_CnNOTe, gc.selective_mw_fraction * a, 0.0, units::pi,
                gc.detuning_mw, gc.detuning_rf},
      params);
  g.cenotn = finite_duration_propagator(
      PulseSpec{PulseKind::SelectiveRF_CeNOTn, gc.selective_rf_fraction * a, 0.0, units::pi,
                gc.detuning_mw, gc.detuning_rf},
      params);
  g.mode = EvolutionMode::Physical;
  return g;
}

InitializationResult initialize_system(const SpinSystemParams& params, double f,
                                       const std::array<double, 3>& pops, const GateSet& gates,
                                       bool second_step) {
  params.validate();
  check_simplex(pops, "initial_nuclear_populations");
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("init_fidelity must be in [0, 1]");

  InitializationResult res;
  Matrix6c rho = Matrix6c::Zero();
  rho(1, 1) = pops[0];  // |0,+1>
  rho(0, 0) = pops[1];  // |0,0>
  rho(2, 2) = pops[2];  // |0,-1>
  res.ledger.push_back(ledger_entry("step1_input", rho));

  Matrix6c U = embed(gates.cnnote);
  rho = U * rho * U.adjoint();
  res.ledger.push_back(ledger_entry("step2_cnnote", rho));

  U = embed(gates.cenotn);
  rho = U * rho * U.adjoint();
  res.ledger.push_back(ledger_entry("step3_cenotn", rho));
  res.p_nuclear_zero_after_step3 = rho(0, 0).real() + rho(3, 3).real();

  rho = reinit6(rho, f);
  res.ledger.push_back(ledger_entry("step4_repump", rho));

  if (second_step) {
    U = swap6(2, 5);
    rho = U * rho * U.adjoint();
    res.ledger.push_back(ledger_entry("step5_mw_minus1", rho));
    U = swap6(5, 3);
    rho = U * rho * U.adjoint();
    res.ledger.push_back(ledger_entry("step6_rf_minus1", rho));
    rho = reinit6(rho, f);
    res.ledger.push_back(ledger_entry("step7_repump", rho));
  }

  Matrix4c sub;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sub(i, j) = rho(kSub[i], kSub[j]);
  const double w = sub.trace().real();
  if (!(w > 0.0)) throw std::runtime_error("initialization left no weight in the working subspace");
  res.state.rho = DensityMatrix4(sub / w);
  res.state.subspace_weight = w;
  return res;
}

InitializationResult initialize_system(const SpinSystemParams& params, double f,
                                       const std::array<double, 3>& pops) {
  return initialize_system(params, f, pops, ideal_gate_set(), false);
}

DensityMatrix4 electron_reinit_channel(const DensityMatrix4& rho, double f) {
  const Matrix2c rn = rho.nuclear_reduced();
  Matrix4c out = Matrix4c::Zero();
  out.block<2, 2>(0, 0) = (f + 0.5 * (1.0 - f)) * rn;
  out.block<2, 2>(2, 2) = (0.5 * (1.0 - f)) * rn;
  return DensityMatrix4(out);
}

double memory_decay_factor(double dt_free, int n_lasers, const ProtocolConfig& cfg) {
  if (dt_free < 0.0) throw std::invalid_argument("dt_free must be >= 0");
  double lam = 1.0;
  if (std::isfinite(cfg.T1_nuc)) lam *= std::exp(-dt_free / cfg.T1_nuc);
  if (std::isfinite(cfg.T1_nuc_laser)) lam *= std::exp(-n_lasers * cfg.t_laser / cfg.T1_nuc_laser);
  return lam;
}

DensityMatrix4 memory_decay_channel(const DensityMatrix4& rho, double dt_free, int n_lasers,
                                    const ProtocolConfig& cfg) {
  const double lam = memory_decay_factor(dt_free, n_lasers, cfg);
  if (lam == 1.0) return rho;
  const Matrix2c re = rho.electron_reduced();
  Matrix4c mixed = Matrix4c::Zero();
  for (int e = 0; e < 2; ++e)
    for (int f = 0; f < 2; ++f)
      for (int n = 0; n < 2; ++n) mixed(2 * e + n, 2 * f + n) = 0.5 * re(e, f);
  return DensityMatrix4(lam * rho.matrix() + (1.0 - lam) * mixed);
}

void inject_phase(DensityMatrix4& rho, double phi) {
  const cplx e = std::exp(I1 * phi);
  const cplx ec = std::conj(e);
  Matrix4c& m = rho.matrix();
  for (int i = 0; i < 2; ++i)
    for (int j = 2; j < 4; ++j) {
      m(i, j) *= ec;
      m(j, i) *= e;
    }
}

McsStepStates mcs_step_states(double phi0, double phik, const GateSet& g) {
  McsStepStates s;
  DensityMatrix4 rho = DensityMatrix4::pure(BasisState::E0_N0);
  rho.apply_inplace(g.pi2_x);
  s.II_1 = rho;
  inject_phase(rho, phi0);
  s.II_2 = rho;
  rho.apply_inplace(g.pi2_y);
  s.II_3 = rho;
  rho.apply_inplace(g.cenotn);
  s.II_4 = rho;
  rho = electron_reinit_channel(rho, 1.0);
  s.III_1 = rho;
  rho.apply_inplace(g.pi2_x);
  inject_phase(rho, phik);
  rho.apply_inplace(g.pi2_y);
  s.III_2 = rho;
  rho.apply_inplace(g.cnnote);
  s.III_3 = rho;
  return s;
}

double acquisition_phase(const ProtocolConfig& cfg, const SpinSystemParams& params,
                         const SignalConfig& sig, const SignalRealization& r, int k) {
  const double xi = phase_at(r, sig.nu_s, k * cfg.period());
  return phase_per_gauss(params, cfg.t_DD) * r.B * std::cos(xi);
}

std::vector<PopulationRecord> mcs_run_phases(const ProtocolConfig& cfg, const GateSet& g,
                                             const InitialState& init, double phi0,
                                             std::span<const double> phik) {
  DensityMatrix4 rho = init.rho;
  acquisition(rho, g, phi0, g.cenotn);

  const double lam = cfg.decay ? memory_decay_factor(cfg.period(), cfg.lasers_per_acquisition, cfg)
                               : 1.0;
  std::vector<PopulationRecord> out;
  out.reserve(phik.size());
  for (std::size_t i = 0; i < phik.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    if (lam != 1.0) {
      rho = memory_decay_channel(rho, cfg.period(), cfg.lasers_per_acquisition, cfg);
    }
    rho = electron_reinit_channel(rho, cfg.init_fidelity);
    acquisition(rho, g, phik[i], g.cnnote);
    rho.check_cheap(1e-10);

    PopulationRecord rec{k, rho.p0_electron(), rho.memory_polarization()};
    spectator_mix(rec, init, cfg.init_fidelity, phik[i]);
    out.push_back(rec);
  }
  rho.validate(1e-10);
  return out;
}

std::vector<PopulationRecord> mcs_run(const ProtocolConfig& cfg, const SpinSystemParams& params,
                                      const SignalConfig& sig, const SignalRealization& r,
                                      const GateSet& g, const InitialState& init) {
  std::vector<double> phik(cfg.M);
  for (int k = 1; k <= cfg.M; ++k) phik[k - 1] = acquisition_phase(cfg, params, sig, r, k);
  return mcs_run_phases(cfg, g, init, acquisition_phase(cfg, params, sig, r, 0), phik);
}

PopulationRecord cs_run_phases(const ProtocolConfig& cfg, const GateSet& g,
                               const InitialState& init, double phi0, double phik, int k) {
  if (k < 1 || k > cfg.M) throw std::invalid_argument("cs_run: k must be in 1..M");
  DensityMatrix4 rho = init.rho;
  acquisition(rho, g, phi0, g.cenotn);
  if (cfg.decay) rho = memory_decay_channel(rho, k * cfg.period(), 0, cfg);
  rho = electron_reinit_channel(rho, cfg.init_fidelity);
  acquisition(rho, g, phik, g.cnnote);
  rho.check_cheap(1e-10);
  PopulationRecord rec{k, rho.p0_electron(), rho.memory_polarization()};
  spectator_mix(rec, init, cfg.init_fidelity, phik);
  return rec;
}

PopulationRecord cs_run(const ProtocolConfig& cfg, const SpinSystemParams& params,
                        const SignalConfig& sig, const SignalRealization& r, int k,
                        const GateSet& g, const InitialState& init) {
  return cs_run_phases(cfg, g, init, acquisition_phase(cfg, params, sig, r, 0),
                       acquisition_phase(cfg, params, sig, r, k), k);
}

double cs_wall_time(const ProtocolConfig& cfg, int k) { return cfg.T_init + k * cfg.period(); }

double cs_total_wall_time(const ProtocolConfig& cfg) {
  const double M = cfg.M;
  return M * cfg.T_init + 0.5 * M * (M + 1.0) * cfg.period();
}

double mcs_total_wall_time(const ProtocolConfig& cfg) { return cfg.T_init + cfg.M * cfg.period(); }

PopulationRecord qdyne_step(const ProtocolConfig& cfg, const GateSet& g, double phi_mean, int k) {
  DensityMatrix4 rho = electron_reinit_channel(DensityMatrix4::pure(BasisState::E0_N0),
                                               cfg.init_fidelity);
  rho.apply_inplace(g.pi2_x);
  inject_phase(rho, phi_mean);
  rho.apply_inplace(g.pi2_my);
  return PopulationRecord{k, rho.p0_electron(), rho.memory_polarization()};
}

std::vector<PopulationRecord> qdyne_run(const ProtocolConfig& cfg, const SpinSystemParams& params,
                                        const SignalConfig& sig,
                                        std::span<const SignalRealization> sensors,
                                        const GateSet& g) {
  if (sensors.empty()) throw std::invalid_argument("qdyne_run needs at least one sensor");
  // mean over sensors of B_j cos(xi_j + theta) = Re(Z e^{i theta})
  cplx Z = 0.0;
  for (const auto& s : sensors) Z += s.B * std::exp(I1 * s.xi0);
  Z /= static_cast<double>(sensors.size());
  const double kappa = phase_per_gauss(params, cfg.t_DD);

  std::vector<PopulationRecord> out;
  out.reserve(cfg.M);
  const SignalRealization unit{1.0, 0.0, 0};
  for (int k = 1; k <= cfg.M; ++k) {
    const double theta = phase_at(unit, sig.nu_s, k * cfg.period());
    const double phi = kappa * (Z * std::exp(I1 * theta)).real();
    out.push_back(qdyne_step(cfg, g, phi, k));
  }
  return out;
}

OdmrSpectrum simulate_odmr(const SpinSystemParams& params,
                           const std::array<double, 3>& pops, double contrast,
                           double linewidth_hz, std::span<const double> grid) {
  check_simplex(pops, "odmr populations");
  if (!(linewidth_hz > 0.0)) throw std::invalid_argument("odmr linewidth must be > 0");
  const std::array<int, 3> mi = {+1, 0, -1};
  std::array<double, 3> centers{};
  for (int i = 0; i < 3; ++i) centers[i] = units::rad_to_hz(mw_transition_frequency(params, mi[i]));

  OdmrSpectrum out;
  out.freq_hz.assign(grid.begin(), grid.end());
  out.signal.resize(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    double v = 1.0;
    for (int i = 0; i < 3; ++i) {
      const double d = (grid[n] - centers[i]) / linewidth_hz;
      v -= contrast * pops[i] * std::exp(-0.5 * d * d);
    }
    out.signal[n] = v;
  }
  return out;
}

}  // namespace qmem

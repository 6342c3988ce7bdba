#include "qmem/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "qmem/analysis/fits.hpp"
#include "qmem/analysis/snr.hpp"
#include "qmem/metrics.hpp"
#include "qmem/trace_io.hpp"

namespace qmem {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

InitialState make_initial_state(const ScenarioConfig& cfg, const SpinSystemParams& params,
                                const GateSet& g) {
  if (cfg.initialization.mode == "ideal") return InitialState{};
  return initialize_system(params, cfg.protocol.init_fidelity,
                           cfg.initialization.nuclear_populations, g,
                           cfg.initialization.second_step)
      .state;
}

int n_blocks_for(std::int64_t units) {
  return static_cast<int>((units + kBlockSize - 1) / kBlockSize);
}

double measurement_time(const ProtocolConfig& pc) {
  switch (pc.protocol) {
    case Protocol::MCS: return pc.N * mcs_total_wall_time(pc);
    case Protocol::CS: return pc.N * cs_total_wall_time(pc);
    case Protocol::QDyne: return pc.M * pc.period();
  }
  return 0.0;
}

double phi_rms_of(const ScenarioConfig& cfg) {
  const auto pc = cfg.protocol_config();
  return phase_per_gauss(cfg.spin_params(), pc.t_DD) * cfg.signal.B_gauss;
}

int protocol_index(Protocol p) { return static_cast<int>(p); }

}  // namespace

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_blocks(int n_blocks, int workers, const std::function<void(int)>& fn) {
  workers = std::min(resolve_workers(workers), std::max(n_blocks, 1));
  if (workers <= 1) {
    for (int b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(n_blocks);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double correlation_decay_time(const ProtocolConfig& pc) {
  if (!pc.decay || pc.protocol == Protocol::QDyne) return kForever;
  double rate = std::isfinite(pc.T1_nuc) ? 1.0 / pc.T1_nuc : 0.0;
  if (pc.protocol == Protocol::MCS && std::isfinite(pc.T1_nuc_laser)) {
    rate += pc.lasers_per_acquisition * pc.t_laser / (pc.T1_nuc_laser * pc.period());
  }
  return rate > 0.0 ? 1.0 / rate : kForever;
}

TimeTrace simulate_trace(const ScenarioConfig& cfg, int workers) {
  cfg.validate();
  const auto params = cfg.spin_params();
  const auto sig = cfg.signal_config();
  const auto pc = cfg.protocol_config();
  const auto ro = cfg.readout_params();
  const GateSet g = build_gate_set(pc, params);
  const InitialState init = make_initial_state(cfg, params, g);
  const std::uint64_t seed = cfg.master_seed;
  const double Tp = pc.period();

  TraceAccumulator total(pc.M, Tp);

  switch (pc.protocol) {
    case Protocol::MCS: {
      const int nb = n_blocks_for(pc.N);
      std::vector<TraceAccumulator> parts(nb, TraceAccumulator(pc.M, Tp));
      parallel_blocks(nb, workers, [&](int b) {
        const int j_end = std::min<int>(pc.N, (b + 1) * kBlockSize);
        for (int j = b * kBlockSize; j < j_end; ++j) {
          Rng rs = make_stream(seed, j, StreamTag::Signal);
          const auto r = draw_realization(sig, rs, 0);
          const auto rec = mcs_run(pc, params, sig, r, g, init);
          Rng rr = make_stream(seed, j, StreamTag::Readout);
          parts[b].add_run(rec, ro, rr);
        }
      });
      for (const auto& p : parts) total.merge(p);
      break;
    }
    case Protocol::CS: {
      // unit u = j * M + (k - 1)
      const std::int64_t units = static_cast<std::int64_t>(pc.N) * pc.M;
      const int nb = n_blocks_for(units);
      std::vector<TraceAccumulator> parts(nb, TraceAccumulator(pc.M, Tp));
      parallel_blocks(nb, workers, [&](int b) {
        const std::int64_t u_end = std::min<std::int64_t>(units, (b + 1) * std::int64_t{kBlockSize});
        for (std::int64_t u = std::int64_t{b} * kBlockSize; u < u_end; ++u) {
          const int k = static_cast<int>(u % pc.M) + 1;
          Rng rs = make_stream(seed, u, StreamTag::Signal);
          const auto r = draw_realization(sig, rs, 0);
          const auto rec = cs_run(pc, params, sig, r, k, g, init);
          Rng rr = make_stream(seed, u, StreamTag::Readout);
          parts[b].add_counts(k - 1, readout(rec.p0_e, ro, rr));
        }
      });
      for (const auto& p : parts) total.merge(p);
      total.bump_runs(pc.N);
      break;
    }
    case Protocol::QDyne: {
      std::vector<SignalRealization> sensors;
      sensors.reserve(pc.N);
      for (int j = 0; j < pc.N; ++j) {
        Rng rs = make_stream(seed, j, StreamTag::Signal);
        sensors.push_back(draw_realization(sig, rs, j));
      }
      const auto rec = qdyne_run(pc, params, sig, sensors, g);
      Rng rr = make_stream(seed, 0, StreamTag::Readout);
      total.add_ensemble(rec, pc.N, ro, rr);
      break;
    }
  }

  TimeTrace t = total.finish();
  t.metadata = {{"protocol", std::string(to_string(pc.protocol))},
                {"master_seed", cfg.master_seed},
                {"config", to_json(cfg)}};
  return t;
}

AnalysisResult analyze_trace(const TimeTrace& trace, const ScenarioConfig& cfg) {
  using namespace analysis;
  const auto pc = cfg.protocol_config();
  const auto sig = cfg.signal_config();

  AnalysisResult out;
  const Window win = window_from_string(cfg.analysis.window);
  out.spectrum = psd(trace, cfg.analysis.pad_factor, win);
  const auto& s = out.spectrum;

  const double f_oracle = undersampled_frequency(sig.nu_s, trace.T);
  const double f_min = 2.0 / (trace.size() * trace.T);
  const double tau_cfg = correlation_decay_time(pc);

  json fits = json::object();
  json sum;
  sum["schema_version"] = kSchemaVersion;
  sum["protocol"] = std::string(to_string(pc.protocol));
  sum["master_seed"] = cfg.master_seed;
  sum["M"] = trace.size();
  sum["n_runs"] = trace.n_runs;
  sum["T_seconds"] = trace.T;
  sum["f_u_oracle_Hz"] = f_oracle;
  sum["padded_bin_Hz"] = s.df;
  sum["tau_configured_s"] = num(tau_cfg);

  const std::size_t ipk = s.peak_index(f_min);
  const double f_peak = refine_peak(s, ipk);
  sum["f_peak_Hz"] = f_peak;
  sum["periodogram_fwhm_Hz"] = half_max_width(s, ipk);
  sum["f_u_Hz"] = f_peak;

  try {
    LorentzianOptions opt;
    opt.window_hz = cfg.analysis.lorentzian_window_Hz;
    opt.f_min = f_min;
    const SpectrumFit fit = fit_lorentzian(s, opt);
    json j = to_json(fit);
    j["ok"] = true;
    fits["lorentzian"] = j;
    sum["f_u_Hz"] = fit.c;
    sum["fwhm_Hz"] = fit.fwhm();
    const double window = opt.window_hz > 0.0 ? opt.window_hz : std::max(10.0 * fit.sigma, 20.0 * s.df);
    const double noise = lorentzian_noise_std(s, fit, window);
    sum["noise_std"] = noise;
    const double B_test = cfg.analysis.B_test_gauss.value_or(cfg.signal.B_gauss);
    const double T_meas = measurement_time(pc);
    sum["T_meas_s"] = T_meas;
    try {
      const double eta_g = sensitivity(fit, noise, B_test, T_meas);
      sum["sensitivity_G_per_rtHz"] = eta_g;
      sum["sensitivity_T_per_rtHz"] = units::gauss_to_tesla(eta_g);
    } catch (const std::exception& e) {
      sum["sensitivity_error"] = e.what();
    }
  } catch (const FitError& e) {
    fits["lorentzian"] = {{"ok", false}, {"error", e.what()}, {"report", to_json(e.report())}};
  } catch (const std::exception& e) {
    fits["lorentzian"] = {{"ok", false}, {"error", e.what()}};
  }
  sum["f_u_error_bins"] = std::abs(sum["f_u_Hz"].get<double>() - f_oracle) / s.df;

  if (cfg.analysis.fit_time_domain) {
    try {
      const TimeFit tf = fit_decaying_sinusoid(trace.times, trace.counts);
      json j = to_json(tf);
      j["ok"] = true;
      fits["decaying_sinusoid"] = j;
      sum["tau_decay_s"] = num(tf.tau);
      sum["f_time_fit_Hz"] = tf.f;
    } catch (const FitError& e) {
      fits["decaying_sinusoid"] = {{"ok", false}, {"error", e.what()}, {"report", to_json(e.report())}};
    } catch (const std::exception& e) {
      fits["decaying_sinusoid"] = {{"ok", false}, {"error", e.what()}};
    }
  }

  json wall;
  wall["mcs_run_s"] = mcs_total_wall_time(pc);
  wall["cs_run_s"] = cs_total_wall_time(pc);
  wall["measurement_s"] = measurement_time(pc);
  if (pc.T_init > 0.0) {
    const auto adv = metrics::f_T(pc.M, pc.period(), pc.T_init);
    wall["f_T"] = adv.f_T;
    wall["time_ratio"] = adv.time_ratio;
  }
  sum["wall_time"] = wall;

  out.fits = std::move(fits);
  out.summary = std::move(sum);
  return out;
}

RunBundle run_scenario(const ScenarioConfig& cfg, int workers) {
  RunBundle b;
  b.trace = simulate_trace(cfg, workers);
  b.analysis = analyze_trace(b.trace, cfg);
  return b;
}

void write_bundle(const RunBundle& b, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_trace(b.trace, dir / "trace.csv");
  write_psd(b.analysis.spectrum, dir / "psd.csv");
  json fits = b.analysis.fits;
  fits["schema_version"] = kSchemaVersion;
  write_json(fits, dir / "fits.json");
  write_json(b.analysis.summary, dir / "summary.json");
}

double predicted_snr(const ScenarioConfig& cfg, Protocol p, int N) {
  const auto pc = cfg.protocol_config();
  const auto ro = cfg.readout_params();
  const auto sig = cfg.signal_config();
  const double a = phi_rms_of(cfg);
  const bool stat = sig.mode == SignalMode::Statistical;
  const double half = 0.5 * (ro.eta0 - ro.eta1);
  const double eta = ro.eta();
  const double T = pc.period();
  const double f_u = undersampled_frequency(sig.nu_s, T);

  if (p == Protocol::QDyne) {
    double v = 0.0;
    if (ro.noise == NoiseMode::TwoStage) v = half * half + eta;
    if (ro.noise == NoiseMode::AveragedPoisson) v = eta;
    if (v == 0.0) return kForever;
    const double a2 = stat ? 2.0 * a * a : a * a;
    return std::sqrt(pc.M * half * half * a2 / (4.0 * v));
  }

  // first harmonic of <sin phi0 sin phik> in cos(w dT)
  const double corr = stat ? 2.0 * std::exp(-a * a) * std::cyl_bessel_i(1.0, a * a)
                           : 2.0 * std::pow(std::cyl_bessel_j(1.0, a), 2);
  const double sig_var = stat ? std::pow(0.5 * (1.0 - std::exp(-2.0 * a * a)), 2) : 0.25;
  double v = half * half * sig_var;
  if (ro.noise == NoiseMode::TwoStage) v = half * half + eta;
  if (ro.noise == NoiseMode::AveragedPoisson) v += eta;

  ProtocolConfig q = pc;
  q.protocol = p;
  const double tau = correlation_decay_time(q);
  double bb = 0.0;
  for (int k = 1; k <= pc.M; ++k) {
    const double t = k * T;
    const double w = std::isfinite(tau) ? std::exp(-t / tau) : 1.0;
    const double c = w * std::cos(units::two_pi * std::fmod(f_u * t, 1.0));
    bb += c * c;
  }
  const double amp = N * half * corr;
  // MCS: phi0 is shared by all k of a run, so each run's amplitude fluctuates
  // like a squared Gaussian, variance 2 mean^2
  const double self = p == Protocol::MCS ? 2.0 * half * half * corr * corr : 0.0;
  const double sd = std::sqrt(N * (v / bb + self));
  return sd > 0.0 ? amp / sd : kForever;
}

std::optional<double> CompareTable::slope(Protocol p) const {
  for (const auto& [q, s] : slopes) {
    if (q == p) return s;
  }
  return std::nullopt;
}

CompareTable compare_protocols(const ScenarioConfig& cfg, std::span<const int> N_list,
                               int repetitions, int workers, std::span<const Protocol> protocols) {
  if (N_list.empty()) throw std::invalid_argument("compare: N list must not be empty");
  for (int n : N_list) {
    if (n < 1) throw std::invalid_argument("compare: every N must be >= 1");
  }
  if (repetitions < 2) throw std::invalid_argument("compare: repetitions must be >= 2");
  cfg.validate();

  static constexpr Protocol kAll[] = {Protocol::MCS, Protocol::CS, Protocol::QDyne};
  if (protocols.empty()) protocols = kAll;

  const auto pc0 = cfg.protocol_config();
  const double T = pc0.period();

  CompareTable table;
  table.f_u_Hz = undersampled_frequency(cfg.signal.nu_s_Hz, T);
  table.phi_rms = phi_rms_of(cfg);

  metrics::ComparisonInputs in;
  const auto ro = cfg.readout_params();
  in.M = pc0.M;
  in.T = T;
  in.T_init = pc0.T_init;
  in.eta = ro.eta();
  in.c = ro.contrast();
  in.phi_rms = table.phi_rms;
  in.T_D = pc0.t_DD;
  in.T_M = pc0.M * T;
  in.T_total = pc0.M * T;
  in.Delta_T_k = T;
  in.omega_u = units::two_pi * table.f_u_Hz;

  for (Protocol p : protocols) {
    ScenarioConfig pcfg = cfg;
    pcfg.protocol.protocol = std::string(to_string(p));
    ProtocolConfig pp = pcfg.protocol_config();
    const double tau = correlation_decay_time(pp);
    const double f0 = metrics::ensemble_scaling(p, N_list.front(), in, true);

    std::vector<double> xs, ys, yp;
    for (int N : N_list) {
      ScenarioConfig c = pcfg;
      c.protocol.N = N;
      std::vector<TimeTrace> reps(repetitions);
      const std::uint64_t sub = stream_seed(cfg.master_seed,
                                            (std::uint64_t(protocol_index(p)) << 32) ^ std::uint64_t(N),
                                            StreamTag::Synthetic);
      parallel_blocks(repetitions, workers, [&](int r) {
        ScenarioConfig cr = c;
        cr.master_seed = stream_seed(sub, r, StreamTag::Synthetic);
        reps[r] = simulate_trace(cr, 1);
      });

      CompareRow row;
      row.protocol = p;
      row.N = N;
      const auto est = p == Protocol::QDyne ? analysis::snr_power(reps, table.f_u_Hz)
                                            : analysis::snr_inphase(reps, table.f_u_Hz, tau);
      row.snr = est.snr;
      row.signal = est.signal;
      row.noise = est.noise;
      row.repetitions = est.repetitions;
      row.predicted_snr = predicted_snr(c, p, N);
      row.fisher_ratio = metrics::ensemble_scaling(p, N, in, true) / f0;

      analysis::PowerSpectrum mean_psd;
      for (const auto& t : reps) {
        auto s = analysis::psd(t, analysis::kDefaultPad);
        if (mean_psd.power.empty()) {
          mean_psd = std::move(s);
        } else {
          for (std::size_t i = 0; i < s.size(); ++i) mean_psd.power[i] += s.power[i];
        }
      }
      const double f_min = 2.0 / (pp.M * T);
      row.f_peak_Hz = analysis::refine_peak(mean_psd, mean_psd.peak_index(f_min));
      table.rows.push_back(row);

      xs.push_back(N);
      ys.push_back(row.snr);
      yp.push_back(row.predicted_snr);
    }

    auto fit_slope = [&](const std::vector<double>& y) -> std::optional<double> {
      if (xs.size() < 2) return std::nullopt;
      for (double v : y) {
        if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
      }
      try {
        return analysis::loglog_slope(xs, y);
      } catch (const std::invalid_argument&) {
        return std::nullopt;
      }
    };
    table.slopes.emplace_back(p, fit_slope(ys));
    table.predicted_slopes.emplace_back(p, fit_slope(yp));
  }
  return table;
}

json to_json(const CompareTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"protocol", std::string(to_string(r.protocol))},
                    {"N", r.N},
                    {"repetitions", r.repetitions},
                    {"snr", num(r.snr)},
                    {"signal", num(r.signal)},
                    {"noise", num(r.noise)},
                    {"predicted_snr", num(r.predicted_snr)},
                    {"fisher_ratio", num(r.fisher_ratio)},
                    {"f_peak_Hz", num(r.f_peak_Hz)}});
  }
  auto slopes = [](const auto& v) {
    json j = json::object();
    for (const auto& [p, s] : v) j[std::string(to_string(p))] = s ? json(*s) : json(nullptr);
    return j;
  };
  return {{"schema_version", kSchemaVersion},
          {"f_u_Hz", t.f_u_Hz},
          {"phi_rms", t.phi_rms},
          {"rows", rows},
          {"slopes", slopes(t.slopes)},
          {"predicted_slopes", slopes(t.predicted_slopes)}};
}

void write_compare_csv(const CompareTable& t, std::ostream& out) {
  out << "protocol,N,repetitions,snr,signal,noise,predicted_snr,fisher_ratio,f_peak_Hz\n";
  char buf[256];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  std::string(to_string(r.protocol)).c_str(), r.N, r.repetitions, r.snr, r.signal,
                  r.noise, r.predicted_snr, r.fisher_ratio, r.f_peak_Hz);
    out << buf;
  }
}

}  // namespace qmem

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qmem/metrics.hpp"
#include "qmem/runner.hpp"
#include "qmem/scenario.hpp"
#include "qmem/trace_io.hpp"

using namespace qmem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kValidation = 2, kIo = 3 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 0;
  std::string mode;
  std::string noise;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "scenario JSON file");
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--out", c.out, "output directory (overrides the config)");
  app->add_option("--workers", c.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app->add_option("--mode", c.mode, "gate model")->check(CLI::IsMember({"ideal", "physical"}));
  app->add_option("--noise", c.noise, "readout noise")->check(CLI::IsMember({"two-stage", "averaged", "none"}));
}

ScenarioConfig load_with_overrides(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? ScenarioConfig{} : load_scenario(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (!c.mode.empty()) cfg.protocol.mode = c.mode;
  if (!c.noise.empty()) cfg.readout.noise = c.noise;
  cfg.validate();
  return cfg;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_run(const Common& c) {
  const ScenarioConfig cfg = load_with_overrides(c);
  const auto t0 = std::chrono::steady_clock::now();
  const RunBundle b = run_scenario(cfg, c.workers);
  write_bundle(b, cfg.output_dir);
  std::cout << b.analysis.summary.dump(2) << "\n";
  std::fprintf(stderr, "wrote %s (%.2f s)\n", cfg.output_dir.c_str(), elapsed_s(t0));
  return kOk;
}

int cmd_compare(const Common& c, const std::vector<int>& N_list, int reps,
                const std::vector<std::string>& protos) {
  const ScenarioConfig cfg = load_with_overrides(c);
  std::vector<Protocol> ps;
  for (const auto& p : protos) ps.push_back(protocol_from_string(p));
  const auto t0 = std::chrono::steady_clock::now();
  const CompareTable t = compare_protocols(cfg, N_list, reps, c.workers, ps);

  std::filesystem::create_directories(cfg.output_dir);
  write_json(to_json(t), std::filesystem::path(cfg.output_dir) / "compare.json");
  {
    std::ofstream csv(std::filesystem::path(cfg.output_dir) / "compare.csv");
    if (!csv) throw std::runtime_error("cannot write compare.csv");
    write_compare_csv(t, csv);
  }

  std::printf("f_u = %.3f Hz, phi_rms = %.4f rad\n", t.f_u_Hz, t.phi_rms);
  std::printf("%-6s %6s %5s %12s %12s %10s %12s\n", "proto", "N", "reps", "snr", "predicted",
              "I(N)/I0", "f_peak_Hz");
  for (const auto& r : t.rows) {
    std::printf("%-6s %6d %5d %12.4g %12.4g %10.4g %12.3f\n", std::string(to_string(r.protocol)).c_str(),
                r.N, r.repetitions, r.snr, r.predicted_snr, r.fisher_ratio, r.f_peak_Hz);
  }
  for (std::size_t i = 0; i < t.slopes.size(); ++i) {
    const auto& [p, s] = t.slopes[i];
    const auto& ps_ = t.predicted_slopes[i].second;
    std::printf("slope %-6s measured %s predicted %s\n", std::string(to_string(p)).c_str(),
                s ? std::to_string(*s).c_str() : "undefined",
                ps_ ? std::to_string(*ps_).c_str() : "undefined");
  }
  std::fprintf(stderr, "wrote %s (%.2f s)\n", cfg.output_dir.c_str(), elapsed_s(t0));
  return kOk;
}

int cmd_fit(const Common& c, const std::string& trace_path) {
  const TimeTrace trace = read_trace(trace_path);
  ScenarioConfig cfg;
  if (!c.config.empty()) {
    cfg = load_scenario(c.config);
  } else if (trace.metadata.contains("config")) {
    cfg = scenario_from_json(trace.metadata["config"]);
  }
  if (c.seed) cfg.master_seed = *c.seed;
  cfg.output_dir = c.out.empty() ? std::filesystem::path(trace_path).parent_path().string() : c.out;
  if (cfg.output_dir.empty()) cfg.output_dir = ".";
  cfg.validate();

  const AnalysisResult a = analyze_trace(trace, cfg);
  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  write_psd(a.spectrum, dir / "psd.csv");
  json fits = a.fits;
  fits["schema_version"] = kSchemaVersion;
  write_json(fits, dir / "fits.json");
  write_json(a.summary, dir / "summary.json");
  std::cout << a.summary.dump(2) << "\n";
  return kOk;
}

int cmd_tables(const Common& c, const std::vector<int>& N_list) {
  const ScenarioConfig cfg = load_with_overrides(c);
  const auto sp = cfg.spin_params();
  const auto pc = cfg.protocol_config();
  const auto ro = cfg.readout_params();

  json j;
  j["schema_version"] = kSchemaVersion;
  const EnergyTable e = energy_levels(sp);
  json levels = json::array();
  for (int ms : {0, -1, 1}) {
    for (int mi : {0, 1, -1}) {
      levels.push_back({{"m_s", ms}, {"m_I", mi}, {"E_MHz", units::rad_to_mhz(e.energy(ms, mi))}});
    }
  }
  j["energy_levels"] = levels;
  j["mw_lines_MHz"] = {{"m_I=+1", units::rad_to_mhz(mw_transition_frequency(sp, 1))},
                       {"m_I=0", units::rad_to_mhz(mw_transition_frequency(sp, 0))},
                       {"m_I=-1", units::rad_to_mhz(mw_transition_frequency(sp, -1))}};
  j["rf_line_MHz"] = units::rad_to_mhz(rf_transition_frequency(sp));

  const double T = pc.period();
  j["f_u_Hz"] = undersampled_frequency(cfg.signal.nu_s_Hz, T);
  j["phase_per_gauss_rad"] = phase_per_gauss(sp, pc.t_DD);
  if (pc.T_init > 0.0) {
    const auto adv = metrics::f_T(pc.M, T, pc.T_init);
    j["f_T"] = adv.f_T;
    j["time_ratio"] = adv.time_ratio;
  }
  j["total_time_mcs_s"] = metrics::total_time_mcs(pc.M, T, pc.T_init);
  j["total_time_cs_s"] = metrics::total_time_cs(pc.M, T, pc.T_init);
  if (pc.t_laser > 0.0 && std::isfinite(pc.T1_nuc_laser)) {
    const double m_lim = metrics::laser_limit(pc.T1_nuc_laser, pc.t_laser);
    j["laser_limit"] = m_lim;
    j["effective_memory_lifetime_s"] = metrics::effective_memory_lifetime(pc.T1_nuc, m_lim, T);
  }
  j["lifetime_vs_field_s"] = metrics::lifetime_vs_field(units::gauss_to_tesla(cfg.spin_system.B_gauss));

  metrics::ComparisonInputs in;
  in.M = pc.M;
  in.T = T;
  in.T_init = pc.T_init;
  in.eta = ro.eta();
  in.c = ro.contrast();
  in.phi_rms = phase_per_gauss(sp, pc.t_DD) * cfg.signal.B_gauss;
  in.T_D = pc.t_DD;
  in.T_M = pc.M * T;
  in.T_total = pc.M * T;
  in.Delta_T_k = T;
  in.omega_u = units::two_pi * undersampled_frequency(cfg.signal.nu_s_Hz, T);
  j["fisher_cs"] = metrics::fisher_cs(in);
  j["fisher_qdyne"] = metrics::fisher_qdyne(in);
  json scaling = json::array();
  for (int N : N_list) {
    scaling.push_back({{"N", N},
                       {"R_cs", metrics::ensemble_scaling(Protocol::CS, N, in)},
                       {"R_qdyne", metrics::ensemble_scaling(Protocol::QDyne, N, in)}});
  }
  j["ensemble_scaling"] = scaling;

  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_json(j, std::filesystem::path(c.out) / "tables.json");
  }
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmem: memory-enhanced quantum sensing simulator"};
  app.require_subcommand(1);

  Common run_c, cmp_c, fit_c, tab_c;
  auto* run = app.add_subcommand("run", "simulate a scenario and write the artifact bundle");
  add_common(run, run_c, true);

  auto* cmp = app.add_subcommand("compare", "SNR versus ensemble size for all protocols");
  add_common(cmp, cmp_c, true);
  std::vector<int> N_list{1, 4, 16, 64};
  int reps = 50;
  std::vector<std::string> protos;
  cmp->add_option("--N", N_list, "ensemble sizes")->delimiter(',');
  cmp->add_option("--reps", reps, "repetitions per point")->check(CLI::Range(2, 1000000));
  cmp->add_option("--protocols", protos, "subset of mcs,cs,qdyne")->delimiter(',');

  auto* fit = app.add_subcommand("fit", "re-analyze an existing trace CSV");
  add_common(fit, fit_c, false);
  std::string trace_path;
  fit->add_option("--trace", trace_path, "trace CSV")->required();

  auto* tab = app.add_subcommand("tables", "closed-form tables only, no simulation");
  add_common(tab, tab_c, false);
  std::vector<int> tab_N{1, 4, 16, 64};
  tab->add_option("--N", tab_N, "ensemble sizes for the scaling table")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(run_c);
    if (*cmp) return cmd_compare(cmp_c, N_list, reps, protos);
    if (*fit) return cmd_fit(fit_c, trace_path);
    if (*tab) return cmd_tables(tab_c, tab_N);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
  return kOk;
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmem/runner.hpp"
#include "qmem/trace_io.hpp"

using namespace qmem;

namespace {

ScenarioConfig small(Protocol p) {
  ScenarioConfig c;
  c.master_seed = 42;
  c.protocol.protocol = std::string(to_string(p));
  c.protocol.M = 96;
  c.protocol.N = 150;
  c.signal.B_gauss = 0.041;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path tmp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "qmem_runner_test" / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(Runner, DeterministicAcrossWorkers) {
  for (auto p : {Protocol::MCS, Protocol::CS, Protocol::QDyne}) {
    SCOPED_TRACE(std::string(to_string(p)));
    const auto cfg = small(p);
    const auto a = simulate_trace(cfg, 1);
    const auto b = simulate_trace(cfg, 4);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.n_runs, cfg.protocol.N);
    auto other = cfg;
    other.master_seed = 43;
    EXPECT_NE(simulate_trace(other, 2).counts, a.counts);
  }
}

TEST(Runner, ByteIdenticalBundles) {
  const auto cfg = small(Protocol::MCS);
  const auto d1 = tmp_dir("w1"), d2 = tmp_dir("w3");
  write_bundle(run_scenario(cfg, 1), d1);
  write_bundle(run_scenario(cfg, 3), d2);
  for (const char* f : {"trace.csv", "psd.csv"}) {
    SCOPED_TRACE(f);
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f));
  }
  for (const char* f : {"trace.json", "fits.json", "summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(d1 / f)) << f;
  }
}

TEST(Runner, NoiselessMcsMatchesClosedForm) {
  auto cfg = small(Protocol::MCS);
  cfg.readout.noise = "none";
  cfg.protocol.N = 1;
  cfg.protocol.decay = false;
  const auto t = simulate_trace(cfg, 1);
  // one classical run: p0 = (1 + sin(phi0) sin(phik)) / 2
  const auto sp = cfg.spin_params();
  const auto pc = cfg.protocol_config();
  const auto sc = cfg.signal_config();
  Rng rng = make_stream(cfg.master_seed, 0, StreamTag::Signal);
  const auto r = draw_realization(sc, rng, 0);
  const auto ro = cfg.readout_params();
  const double p0 = acquisition_phase(pc, sp, sc, r, 0);
  for (int k = 1; k <= pc.M; ++k) {
    const double pk = acquisition_phase(pc, sp, sc, r, k);
    EXPECT_NEAR(t.counts[k - 1], ro.mean_counts(0.5 * (1 + std::sin(p0) * std::sin(pk))), 1e-12);
  }
}

TEST(Runner, TraceCsvRoundTrip) {
  const auto cfg = small(Protocol::CS);
  const auto t = simulate_trace(cfg, 2);
  const auto dir = tmp_dir("io");
  write_trace(t, dir / "trace.csv");
  const auto u = read_trace(dir / "trace.csv");
  EXPECT_EQ(u.counts, t.counts);
  EXPECT_EQ(u.times, t.times);
  EXPECT_EQ(u.n_runs, t.n_runs);
  EXPECT_EQ(u.metadata.at("master_seed"), 42);
  EXPECT_EQ(u.metadata.at("schema_version"), kSchemaVersion);
}

TEST(Runner, TraceCsvRejectsBadInput) {
  std::istringstream bad_header("a,b,c\n1,2,3\n");
  EXPECT_ANY_THROW(read_trace_csv(bad_header));
  std::istringstream negative("k,T_k_seconds,counts,n_runs\n1,0.001,-3,1\n");
  EXPECT_ANY_THROW(read_trace_csv(negative));

  const auto dir = tmp_dir("schema");
  TimeTrace t;
  t.T = 1e-3;
  t.times = {1e-3, 2e-3};
  t.counts = {1, 2};
  t.n_runs = 1;
  write_trace(t, dir / "trace.csv");
  auto meta = nlohmann::json::parse(slurp(dir / "trace.json"));
  meta["schema_version"] = kSchemaVersion + 1;
  std::ofstream(dir / "trace.json") << meta.dump();
  EXPECT_ANY_THROW(read_trace(dir / "trace.csv"));
}

TEST(Runner, RefitReproducesSummary) {
  const auto cfg = small(Protocol::MCS);
  const auto b = run_scenario(cfg, 2);
  const auto dir = tmp_dir("refit");
  write_bundle(b, dir);
  const auto t = read_trace(dir / "trace.csv");
  const auto again = analyze_trace(t, scenario_from_json(t.metadata.at("config")));
  EXPECT_EQ(again.summary.dump(), b.analysis.summary.dump());
}

TEST(Runner, FitFailureIsRecorded) {
  auto cfg = small(Protocol::MCS);
  cfg.signal.B_gauss = 0.0;
  const auto b = run_scenario(cfg, 1);
  EXPECT_TRUE(b.analysis.fits.contains("decaying_sinusoid"));
  EXPECT_FALSE(b.analysis.fits.at("decaying_sinusoid").at("ok").get<bool>());
}

TEST(Runner, CorrelationDecayTime) {
  ProtocolConfig p;
  p.T1_nuc = 0.7;
  p.T1_nuc_laser = 210e-6;
  p.t_laser = 200e-9;
  p.T = 15.063e-6;
  p.protocol = Protocol::MCS;
  EXPECT_NEAR(correlation_decay_time(p), 15.47e-3, 0.01e-3);
  p.protocol = Protocol::CS;
  EXPECT_DOUBLE_EQ(correlation_decay_time(p), 0.7);
  p.protocol = Protocol::QDyne;
  EXPECT_TRUE(std::isinf(correlation_decay_time(p)));
  p.protocol = Protocol::MCS;
  p.decay = false;
  EXPECT_TRUE(std::isinf(correlation_decay_time(p)));
}

TEST(Runner, CompareSingleNHasNoSlope) {
  auto cfg = small(Protocol::MCS);
  cfg.signal.mode = "statistical";
  cfg.protocol.M = 64;
  const std::vector<int> N = {1};
  const auto t = compare_protocols(cfg, N, 3, 2);
  EXPECT_EQ(t.rows.size(), 3u);
  for (const auto& [p, s] : t.slopes) EXPECT_FALSE(s.has_value());
  const auto j = to_json(t);
  EXPECT_TRUE(j.at("slopes").at("mcs").is_null());
  EXPECT_THROW(compare_protocols(cfg, std::vector<int>{}, 3), std::invalid_argument);
  EXPECT_THROW(compare_protocols(cfg, N, 1), std::invalid_argument);
  EXPECT_THROW(compare_protocols(cfg, std::vector<int>{0, 4}, 3), std::invalid_argument);
}

TEST(Runner, CompareIsDeterministic) {
  auto cfg = small(Protocol::MCS);
  cfg.signal.mode = "statistical";
  cfg.protocol.M = 64;
  const std::vector<int> N = {1, 4};
  const std::vector<Protocol> ps = {Protocol::CS};
  const auto a = compare_protocols(cfg, N, 4, 1, ps);
  const auto b = compare_protocols(cfg, N, 4, 3, ps);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  std::ostringstream csv;
  write_compare_csv(a, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "protocol,N,repetitions,snr,signal,noise,predicted_snr,fisher_ratio,f_peak_Hz");
}

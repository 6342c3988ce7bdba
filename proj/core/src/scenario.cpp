#include "qmem/scenario.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "qmem/analysis/spectrum.hpp"
#include "qmem/units.hpp"

namespace qmem {

using nlohmann::json;

namespace {

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument(where("") + "expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    check_type<T>(*it, key);
    out = it->template get<T>();
  }

  void read(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    if (!it->is_number()) throw std::invalid_argument(where(key) + "expected a number or null");
    out = it->get<double>();
  }

  const json& sub(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    auto it = j_.find(key);
    return it == j_.end() ? empty : *it;
  }

  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw std::invalid_argument(where(it.key().c_str()) + "unknown key");
    }
  }

 private:
  std::string where(const char* key) const {
    std::string p = path_;
    if (key && *key) p = p.empty() ? key : p + "." + key;
    return (p.empty() ? std::string("config") : p) + ": ";
  }

  template <class T>
  void check_type(const json& v, const char* key) const {
    bool ok = true;
    if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_same_v<T, std::string>) {
      ok = v.is_string();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    } else if constexpr (std::is_integral_v<T>) {
      ok = v.is_number_integer();
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = v.is_number();
    } else {
      ok = v.is_array();
    }
    if (!ok) throw std::invalid_argument(where(key) + "wrong type");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

SpinSystemParams ScenarioConfig::spin_params() const {
  const auto& s = spin_system;
  return SpinSystemParams{
      .D = units::mhz_to_rad(s.D_MHz),
      .A_par = units::mhz_to_rad(s.A_par_MHz),
      .P_quad = units::mhz_to_rad(s.P_quad_MHz),
      .gamma_nv = units::mhz_to_rad(s.gamma_nv_MHz_per_G),
      .gamma_n = units::hz_to_rad(s.gamma_n_kHz_per_G * 1e3),
      .B_z = s.B_gauss,
  };
}

SignalConfig ScenarioConfig::signal_config() const {
  SignalConfig c;
  c.mode = signal_mode_from_string(signal.mode);
  c.nu_s = signal.nu_s_Hz;
  c.B_amp = signal.B_gauss;
  c.n_sensors = protocol.N;
  return c;
}

ProtocolConfig ScenarioConfig::protocol_config() const {
  const auto& p = protocol;
  ProtocolConfig c;
  c.protocol = protocol_from_string(p.protocol);
  c.M = p.M;
  c.N = p.N;
  c.T = p.T_us * 1e-6;
  c.T_init = p.T_init_us * 1e-6;
  c.t_DD = p.t_DD_us * 1e-6;
  c.xy8_repeats = p.xy8_repeats;
  c.t_laser = p.t_laser_ns * 1e-9;
  c.T1_nuc = p.T1_nuc_ms ? *p.T1_nuc_ms * 1e-3 : kForever;
  c.T1_nuc_laser = p.T1_nuc_laser_us ? *p.T1_nuc_laser_us * 1e-6 : kForever;
  c.init_fidelity = p.init_fidelity;
  c.t_wait = p.t_wait_us * 1e-6;
  c.lasers_per_acquisition = p.lasers_per_acquisition;
  c.decay = p.decay;
  c.mode = evolution_mode_from_string(p.mode);
  c.gates.strong_rabi = units::mhz_to_rad(p.gates.strong_rabi_MHz);
  c.gates.selective_mw_fraction = p.gates.selective_mw_fraction;
  c.gates.selective_rf_fraction = p.gates.selective_rf_fraction;
  c.gates.detuning_mw = units::mhz_to_rad(p.gates.detuning_mw_MHz);
  c.gates.detuning_rf = units::mhz_to_rad(p.gates.detuning_rf_MHz);
  return c;
}

ReadoutParams ScenarioConfig::readout_params() const {
  return ReadoutParams{readout.eta0, readout.eta1, noise_mode_from_string(readout.noise)};
}

void ScenarioConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw std::invalid_argument("schema_version: expected " + std::to_string(kSchemaVersion) +
                                ", got " + std::to_string(schema_version));
  }
  if (output_dir.empty()) throw std::invalid_argument("output_dir: must not be empty");
  auto wrap = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      if (msg.rfind(section, 0) == 0) throw;
      throw std::invalid_argument(std::string(section) + ": " + msg);
    }
  };
  wrap("spin_system", [&] { spin_params().validate(); });
  wrap("protocol", [&] { protocol_config().validate(); });
  wrap("signal", [&] { signal_config().validate(); });
  wrap("readout", [&] { readout_params().validate(); });
  wrap("initialization", [&] {
    if (initialization.mode != "ideal" && initialization.mode != "sequence") {
      throw std::invalid_argument("initialization.mode must be 'ideal' or 'sequence'");
    }
    double sum = 0.0;
    for (double p : initialization.nuclear_populations) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("initialization.nuclear_populations must lie in [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("initialization.nuclear_populations must sum to 1");
    }
  });
  wrap("analysis", [&] {
    if (analysis.pad_factor < 1) throw std::invalid_argument("analysis.pad_factor must be >= 1");
    analysis::window_from_string(analysis.window);
    if (!(analysis.lorentzian_window_Hz >= 0.0)) {
      throw std::invalid_argument("analysis.lorentzian_window_Hz must be >= 0");
    }
  });
}

json to_json(const ScenarioConfig& c) {
  const auto& s = c.spin_system;
  const auto& p = c.protocol;
  const auto& g = p.gates;
  json j;
  j["schema_version"] = c.schema_version;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["spin_system"] = {{"D_MHz", s.D_MHz},
                      {"A_par_MHz", s.A_par_MHz},
                      {"P_quad_MHz", s.P_quad_MHz},
                      {"gamma_nv_MHz_per_G", s.gamma_nv_MHz_per_G},
                      {"gamma_n_kHz_per_G", s.gamma_n_kHz_per_G},
                      {"B_gauss", s.B_gauss}};
  j["signal"] = {{"mode", c.signal.mode},
                 {"nu_s_Hz", c.signal.nu_s_Hz},
                 {"B_gauss", c.signal.B_gauss}};
  j["protocol"] = {{"protocol", p.protocol},
                   {"M", p.M},
                   {"N", p.N},
                   {"T_us", p.T_us},
                   {"T_init_us", p.T_init_us},
                   {"t_DD_us", p.t_DD_us},
                   {"xy8_repeats", p.xy8_repeats},
                   {"t_laser_ns", p.t_laser_ns},
                   {"T1_nuc_ms", opt_num(p.T1_nuc_ms)},
                   {"T1_nuc_laser_us", opt_num(p.T1_nuc_laser_us)},
                   {"init_fidelity", p.init_fidelity},
                   {"t_wait_us", p.t_wait_us},
                   {"lasers_per_acquisition", p.lasers_per_acquisition},
                   {"decay", p.decay},
                   {"mode", p.mode},
                   {"gates",
                    {{"strong_rabi_MHz", g.strong_rabi_MHz},
                     {"selective_mw_fraction", g.selective_mw_fraction},
                     {"selective_rf_fraction", g.selective_rf_fraction},
                     {"detuning_mw_MHz", g.detuning_mw_MHz},
                     {"detuning_rf_MHz", g.detuning_rf_MHz}}}};
  j["initialization"] = {{"mode", c.initialization.mode},
                         {"nuclear_populations", c.initialization.nuclear_populations},
                         {"second_step", c.initialization.second_step}};
  j["readout"] = {{"eta0", c.readout.eta0}, {"eta1", c.readout.eta1}, {"noise", c.readout.noise}};
  j["analysis"] = {{"pad_factor", c.analysis.pad_factor},
                   {"window", c.analysis.window},
                   {"lorentzian_window_Hz", c.analysis.lorentzian_window_Hz},
                   {"fit_time_domain", c.analysis.fit_time_domain},
                   {"B_test_gauss", opt_num(c.analysis.B_test_gauss)}};
  return j;
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  Section root(j, "");
  root.read("schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion) {
    throw std::invalid_argument("schema_version: expected " + std::to_string(kSchemaVersion) +
                                ", got " + std::to_string(c.schema_version));
  }
  root.read("master_seed", c.master_seed);
  root.read("output_dir", c.output_dir);
  {
    Section s(root.sub("spin_system"), root.child("spin_system"));
    auto& d = c.spin_system;
    s.read("D_MHz", d.D_MHz);
    s.read("A_par_MHz", d.A_par_MHz);
    s.read("P_quad_MHz", d.P_quad_MHz);
    s.read("gamma_nv_MHz_per_G", d.gamma_nv_MHz_per_G);
    s.read("gamma_n_kHz_per_G", d.gamma_n_kHz_per_G);
    s.read("B_gauss", d.B_gauss);
    s.finish();
  }
  {
    Section s(root.sub("signal"), root.child("signal"));
    s.read("mode", c.signal.mode);
    s.read("nu_s_Hz", c.signal.nu_s_Hz);
    s.read("B_gauss", c.signal.B_gauss);
    s.finish();
  }
  {
    Section s(root.sub("protocol"), root.child("protocol"));
    auto& p = c.protocol;
    s.read("protocol", p.protocol);
    s.read("M", p.M);
    s.read("N", p.N);
    s.read("T_us", p.T_us);
    s.read("T_init_us", p.T_init_us);
    s.read("t_DD_us", p.t_DD_us);
    s.read("xy8_repeats", p.xy8_repeats);
    s.read("t_laser_ns", p.t_laser_ns);
    s.read("T1_nuc_ms", p.T1_nuc_ms);
    s.read("T1_nuc_laser_us", p.T1_nuc_laser_us);
    s.read("init_fidelity", p.init_fidelity);
    s.read("t_wait_us", p.t_wait_us);
    s.read("lasers_per_acquisition", p.lasers_per_acquisition);
    s.read("decay", p.decay);
    s.read("mode", p.mode);
    {
      Section g(s.sub("gates"), s.child("gates"));
      g.read("strong_rabi_MHz", p.gates.strong_rabi_MHz);
      g.read("selective_mw_fraction", p.gates.selective_mw_fraction);
      g.read("selective_rf_fraction", p.gates.selective_rf_fraction);
      g.read("detuning_mw_MHz", p.gates.detuning_mw_MHz);
      g.read("detuning_rf_MHz", p.gates.detuning_rf_MHz);
      g.finish();
    }
    s.finish();
  }
  {
    Section s(root.sub("initialization"), root.child("initialization"));
    s.read("mode", c.initialization.mode);
    s.read("nuclear_populations", c.initialization.nuclear_populations);
    s.read("second_step", c.initialization.second_step);
    s.finish();
  }
  {
    Section s(root.sub("readout"), root.child("readout"));
    s.read("eta0", c.readout.eta0);
    s.read("eta1", c.readout.eta1);
    s.read("noise", c.readout.noise);
    s.finish();
  }
  {
    Section s(root.sub("analysis"), root.child("analysis"));
    s.read("pad_factor", c.analysis.pad_factor);
    s.read("window", c.analysis.window);
    s.read("lorentzian_window_Hz", c.analysis.lorentzian_window_Hz);
    s.read("fit_time_domain", c.analysis.fit_time_domain);
    s.read("B_test_gauss", c.analysis.B_test_gauss);
    s.finish();
  }
  root.finish();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(cfg).dump(2) << "\n";
}

}  // namespace qmem

#include "qmem/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmem/scenario.hpp"

namespace qmem {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("trace csv line " + std::to_string(line) + ": bad number '" + s + "'");
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_trace_csv(const TimeTrace& t, std::ostream& out) {
  out << "k,T_k_seconds,counts,n_runs\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << (i + 1) << ',' << fmt(t.times[i]) << ',' << fmt(t.counts[i]) << ',' << t.n_runs << '\n';
  }
}

void write_trace(const TimeTrace& t, const std::filesystem::path& csv_path) {
  {
    auto out = open_out(csv_path);
    write_trace_csv(t, out);
  }
  nlohmann::json meta = t.metadata;
  meta["schema_version"] = kSchemaVersion;
  meta["T_seconds"] = t.T;
  meta["n_runs"] = t.n_runs;
  meta["M"] = t.size();
  write_json(meta, sidecar_path(csv_path));
}

TimeTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace csv: empty input");
  const auto header = split(trim(line));
  if (header.size() != 4 || trim(header[0]) != "k" || trim(header[1]) != "T_k_seconds" ||
      trim(header[2]) != "counts" || trim(header[3]) != "n_runs") {
    throw std::invalid_argument("trace csv: expected header k,T_k_seconds,counts,n_runs");
  }
  TimeTrace t;
  int ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) {
      throw std::invalid_argument("trace csv line " + std::to_string(ln) + ": expected 4 columns");
    }
    t.times.push_back(parse_double(cells[1], ln));
    const double c = parse_double(cells[2], ln);
    if (c < 0.0) throw std::invalid_argument("trace csv line " + std::to_string(ln) + ": negative counts");
    t.counts.push_back(c);
    t.n_runs = static_cast<std::int64_t>(parse_double(cells[3], ln));
  }
  if (t.counts.empty()) throw std::invalid_argument("trace csv: no samples");
  t.T = t.times.size() > 1 ? (t.times.back() - t.times.front()) / (t.times.size() - 1) : t.times[0];
  return t;
}

TimeTrace read_trace(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + csv_path.string());
  TimeTrace t = read_trace_csv(in);
  const auto side = sidecar_path(csv_path);
  if (std::filesystem::exists(side)) {
    std::ifstream js(side);
    nlohmann::json meta;
    try {
      js >> meta;
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(side.string() + ": " + e.what());
    }
    const auto v = meta.value("schema_version", -1);
    if (v != kSchemaVersion) {
      throw std::invalid_argument(side.string() + ": schema_version " + std::to_string(v) +
                                  " does not match " + std::to_string(kSchemaVersion));
    }
    if (meta.contains("T_seconds")) t.T = meta["T_seconds"].get<double>();
    t.metadata = std::move(meta);
  }
  return t;
}

void write_psd_csv(const analysis::PowerSpectrum& s, std::ostream& out) {
  out << "f_Hz,power\n";
  for (std::size_t i = 0; i < s.size(); ++i) out << fmt(s.freq[i]) << ',' << fmt(s.power[i]) << '\n';
}

void write_psd(const analysis::PowerSpectrum& s, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_psd_csv(s, out);
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace qmem

#pragma once

#include <filesystem>
#include <iosfwd>

#include "qmem/analysis/spectrum.hpp"
#include "qmem/readout_model.hpp"

namespace qmem {

// CSV columns: k, T_k_seconds, counts, n_runs. Metadata goes to a JSON
// sidecar (same stem, .json) stamped with the schema version.
void write_trace_csv(const TimeTrace& trace, std::ostream& out);
void write_trace(const TimeTrace& trace, const std::filesystem::path& csv_path);

TimeTrace read_trace_csv(std::istream& in);
// Reads the sidecar too when present; a schema_version other than the
// current one is rejected.
TimeTrace read_trace(const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// Columns: f_Hz, power
void write_psd_csv(const analysis::PowerSpectrum& s, std::ostream& out);
void write_psd(const analysis::PowerSpectrum& s, const std::filesystem::path& path);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace qmem

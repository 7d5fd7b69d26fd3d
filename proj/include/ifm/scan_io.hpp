#pragma once

// File formats: scan CSV + JSON sidecar, sweep CSV, Monte Carlo tally JSON.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifm/scan_analysis.hpp"
#include "ifm/scan_engine.hpp"

namespace ifm::io {

inline constexpr const char* kScanCsvHeader = "x_um,p_norm,p_ifm,p_abs,p_noresult";
inline constexpr const char* kSweepCsvHeader = "r,p_ifm,eta";

// Decimal with 12 significant digits, trailing zeros kept.
std::string format_number(double v);

void write_scan_csv(std::ostream& out, const std::vector<scan::ScanRecord>& records);
// Throws IoError on a malformed file.
std::vector<scan::ScanRecord> read_scan_csv(std::istream& in);

nlohmann::json metadata_to_json(const scan::ScanMetadata& meta);
scan::ScanMetadata metadata_from_json(const nlohmann::json& j);

// `scan.csv` -> `scan.meta.json`
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

void write_sweep_csv(std::ostream& out, const analysis::SweepTable& table);

nlohmann::json tally_to_json(const scan::OutcomeTally& tally);

// Whole-file helpers; throw IoError when the file cannot be opened or written.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ifm::io

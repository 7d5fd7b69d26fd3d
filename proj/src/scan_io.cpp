#include "ifm/scan_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ifm/errors.hpp"

namespace ifm::io {

namespace {

double parse_field(const std::string& text, int lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError(fmt::format("scan CSV line {}: bad number '{}'", lineno, text));
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:#.12g}", v); }

void write_scan_csv(std::ostream& out, const std::vector<scan::ScanRecord>& records) {
  out << kScanCsvHeader << '\n';
  for (const auto& r : records) {
    out << format_number(r.x_um) << ',' << format_number(r.p_norm) << ',' << format_number(r.p_ifm) << ','
        << format_number(r.p_abs) << ',' << format_number(r.p_noresult) << '\n';
  }
}

std::vector<scan::ScanRecord> read_scan_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("scan CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScanCsvHeader) throw IoError(fmt::format("scan CSV header must be '{}'", kScanCsvHeader));
  std::vector<scan::ScanRecord> records;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(parse_field(cell, lineno));
    if (f.size() != 5) throw IoError(fmt::format("scan CSV line {}: expected 5 fields", lineno));
    if (!records.empty() && !(f[0] > records.back().x_um)) {
      throw IoError(fmt::format("scan CSV line {}: x_um must be increasing", lineno));
    }
    records.push_back({f[0], f[1], f[2], f[3], f[4]});
  }
  return records;
}

nlohmann::json metadata_to_json(const scan::ScanMetadata& m) {
  nlohmann::json plan{{"start_um", m.plan.start_um},
                      {"stop_um", m.plan.stop_um},
                      {"step_um", m.plan.step_um},
                      {"drift", nullptr}};
  if (m.plan.drift) {
    plan["drift"] = {{"leak_rate", m.plan.drift->leak_rate}, {"lock_loss_um", m.plan.drift->lock_loss_um}};
  }
  return {
      {"tool", "ifm"},
      {"tool_version", m.tool_version},
      {"config",
       {{"t1", m.config.t1},
        {"t2", m.config.t2},
        {"visibility", m.config.visibility},
        {"crosstalk_eps", m.config.crosstalk_eps}}},
      {"beam_fwhm_um", m.beam_fwhm_um},
      {"object", m.object},
      {"mode", scan::to_string(m.plan.mode)},
      {"plan", plan},
      {"seed", m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr)},
      {"quadrature_step_fraction", m.quadrature_step_fraction},
  };
}

scan::ScanMetadata metadata_from_json(const nlohmann::json& j) {
  try {
    scan::ScanMetadata m;
    const auto& c = j.at("config");
    m.config = {c.at("t1").get<double>(), c.at("t2").get<double>(), c.at("visibility").get<double>(),
                c.at("crosstalk_eps").get<double>()};
    m.beam_fwhm_um = j.at("beam_fwhm_um").get<double>();
    m.object = j.value("object", nlohmann::json::object());
    const auto& p = j.at("plan");
    m.plan.start_um = p.at("start_um").get<double>();
    m.plan.stop_um = p.at("stop_um").get<double>();
    m.plan.step_um = p.at("step_um").get<double>();
    m.plan.mode = scan::parse_scan_mode(j.at("mode").get<std::string>());
    if (p.contains("drift") && !p["drift"].is_null()) {
      m.plan.drift = scan::Drift{p["drift"].at("leak_rate").get<double>(), p["drift"].at("lock_loss_um").get<double>()};
    }
    if (j.contains("seed") && !j["seed"].is_null()) m.seed = j["seed"].get<std::uint64_t>();
    m.quadrature_step_fraction = j.value("quadrature_step_fraction", m.quadrature_step_fraction);
    m.tool_version = j.value("tool_version", std::string("unknown"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed scan metadata: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("malformed scan metadata: ") + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

void write_sweep_csv(std::ostream& out, const analysis::SweepTable& table) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << format_number(r.r) << ',' << format_number(r.p_ifm) << ',' << format_number(r.eta) << '\n';
  }
}

nlohmann::json tally_to_json(const scan::OutcomeTally& t) {
  const double n = static_cast<double>(t.n_total);
  return {
      {"n_total", t.n_total},
      {"n_ifm", t.n_ifm},
      {"n_abs", t.n_abs},
      {"n_noresult", t.n_noresult},
      {"seed", t.seed},
      {"frequencies",
       {{"ifm", static_cast<double>(t.n_ifm) / n},
        {"abs", static_cast<double>(t.n_abs) / n},
        {"noresult", static_cast<double>(t.n_noresult) / n}}},
  };
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ifm::io

#include "ifm/cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include <fmt/format.h>

#include "ifm/errors.hpp"

namespace ifm::cli {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> keys;
};

using Document = std::map<std::string, Section>;

const std::set<std::string> kSections{"interferometer", "beam", "object", "scan", "mc"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

// Strips a trailing comment that is not inside double quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

Document parse_document(std::istream& in) {
  Document doc;
  Section* current = nullptr;
  std::string current_name;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, "unterminated section header");
      current_name = trim(line.substr(1, line.size() - 2));
      if (!kSections.contains(current_name)) {
        throw ConfigError(lineno, fmt::format("unknown section [{}]", current_name));
      }
      if (doc.contains(current_name)) throw ConfigError(lineno, fmt::format("duplicate section [{}]", current_name));
      current = &doc[current_name];
      current->line = lineno;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected `key = value`");
    if (current == nullptr) throw ConfigError(lineno, "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(lineno, fmt::format("invalid key '{}'", key));
    if (value.empty()) throw ConfigError(lineno, fmt::format("missing value for '{}'", key));
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') throw ConfigError(lineno, "unterminated string");
      value = value.substr(1, value.size() - 2);
    }
    if (current->keys.contains(key)) {
      throw ConfigError(lineno, fmt::format("duplicate key '{}' in [{}]", key, current_name));
    }
    current->keys[key] = {value, lineno};
  }
  return doc;
}

class SectionReader {
 public:
  SectionReader(const Section& s, std::string name) : s_(s), name_(std::move(name)) {}

  int line() const { return s_.line; }
  const std::string& name() const { return name_; }
  bool has(const std::string& key) const { return s_.keys.contains(key); }
  int line_of(const std::string& key) const { return has(key) ? s_.keys.at(key).line : s_.line; }

  std::optional<std::string> word(const std::string& key) {
    const auto it = s_.keys.find(key);
    if (it == s_.keys.end()) return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  std::optional<double> number(const std::string& key) {
    const auto w = word(key);
    if (!w) return std::nullopt;
    const auto& e = s_.keys.at(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(w->data(), w->data() + w->size(), v);
    if (ec != std::errc() || ptr != w->data() + w->size() || !std::isfinite(v)) {
      throw ConfigError(e.line, fmt::format("'{}' must be a finite number, got '{}'", key, *w));
    }
    return v;
  }

  double required_number(const std::string& key) {
    const auto v = number(key);
    if (!v) throw ConfigError(s_.line, fmt::format("[{}] is missing required key '{}'", name_, key));
    return *v;
  }

  std::optional<std::uint64_t> integer(const std::string& key) {
    const auto w = word(key);
    if (!w) return std::nullopt;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(w->data(), w->data() + w->size(), v);
    if (ec != std::errc() || ptr != w->data() + w->size()) {
      throw ConfigError(line_of(key), fmt::format("'{}' must be a non-negative integer, got '{}'", key, *w));
    }
    return v;
  }

  void check_range(const std::string& key, double v, double lo, double hi, bool lo_open = false) const {
    const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
    if (!ok) {
      throw ConfigError(line_of(key), fmt::format("'{}' = {} is outside {}{}, {}]", key, v, lo_open ? "(" : "[", lo, hi));
    }
  }

  // Any key not consumed by the section's parser is rejected.
  void finish(const std::string& context = {}) const {
    for (const auto& [key, e] : s_.keys) {
      if (!used_.contains(key)) {
        throw ConfigError(e.line, fmt::format("unknown key '{}' in [{}]{}", key, name_, context));
      }
    }
  }

 private:
  const Section& s_;
  std::string name_;
  std::set<std::string> used_;
};

EvConfig read_interferometer(SectionReader r) {
  EvConfig c;
  c.t1 = r.required_number("t1");
  r.check_range("t1", c.t1, 0.0, 1.0);
  c.t2 = r.required_number("t2");
  r.check_range("t2", c.t2, 0.0, 1.0);
  c.visibility = r.number("visibility").value_or(1.0);
  r.check_range("visibility", c.visibility, 0.0, 1.0, true);
  c.crosstalk_eps = r.number("crosstalk").value_or(0.0);
  if (!(c.crosstalk_eps >= 0.0 && c.crosstalk_eps < 0.5)) {
    throw ConfigError(r.line_of("crosstalk"), "'crosstalk' must lie in [0, 0.5)");
  }
  r.finish();
  return c;
}

void read_beam(SectionReader r, RunConfig& cfg) {
  const bool has_fwhm = r.has("fwhm_um");
  const bool has_optics = r.has("wavelength_nm") || r.has("focal_mm") || r.has("aperture_mm") || r.has("beam_mm");
  if (has_fwhm && has_optics) {
    throw ConfigError(r.line(), "[beam] takes either fwhm_um or the optics keys, not both");
  }
  if (has_fwhm) {
    const double fwhm = *r.number("fwhm_um");
    if (!(fwhm > 0.0)) throw ConfigError(r.line_of("fwhm_um"), "'fwhm_um' must be positive");
    cfg.beam_fwhm_um = fwhm;
  } else {
    beam::BeamSpec spec;
    spec.wavelength_m = r.required_number("wavelength_nm") * 1e-9;
    spec.focal_length_m = r.required_number("focal_mm") * 1e-3;
    spec.aperture_diameter_m = r.required_number("aperture_mm") * 1e-3;
    spec.input_beam_diameter_m = r.required_number("beam_mm") * 1e-3;
    try {
      cfg.beam_prediction = beam::spot_fwhm(spec);
    } catch (const DomainError& e) {
      throw ConfigError(r.line(), std::string("[beam]: ") + e.what());
    }
    cfg.beam_fwhm_um = cfg.beam_prediction->fwhm_m * 1e6;
  }
  r.finish();
}

objects::Side read_side(SectionReader& r) {
  const auto s = r.word("blocks").value_or("right");
  if (s == "left") return objects::Side::left;
  if (s == "right") return objects::Side::right;
  throw ConfigError(r.line_of("blocks"), "'blocks' must be left or right");
}

objects::ObjectProfile read_object(SectionReader r, const std::filesystem::path& base_dir) {
  const auto type = r.word("type");
  if (!type) throw ConfigError(r.line(), "[object] is missing required key 'type'");
  objects::ObjectProfile::Variant v;
  if (*type == "absent") {
    v = objects::Absent{};
  } else if (*type == "knife_edge") {
    v = objects::KnifeEdge{r.required_number("edge_um"), read_side(r)};
  } else if (*type == "wire") {
    v = objects::Wire{r.required_number("center_um"), r.required_number("width_um")};
  } else if (*type == "slit") {
    v = objects::Slit{r.required_number("center_um"), r.required_number("width_um"),
                      r.number("background_t").value_or(0.0)};
  } else if (*type == "filament") {
    objects::Filament f{r.required_number("center_um"), r.required_number("width_um"), r.required_number("min_t"), 0.0};
    const auto rad = r.number("peak_phase_rad");
    const auto deg = r.number("peak_phase_deg");
    if (rad && deg) throw ConfigError(r.line_of("peak_phase_deg"), "give peak_phase_rad or peak_phase_deg, not both");
    f.peak_phase_rad = rad ? *rad : deg ? *deg * std::numbers::pi / 180.0 : 0.0;
    v = f;
  } else if (*type == "tabulated") {
    const auto file = r.word("file");
    if (!file) throw ConfigError(r.line(), "[object] type tabulated needs 'file'");
    std::filesystem::path p(*file);
    if (p.is_relative()) p = base_dir / p;
    try {
      v = objects::read_tabulated_file(p.string());
    } catch (const DomainError& e) {
      throw ConfigError(r.line_of("file"), std::string("profile file: ") + e.what());
    }
  } else {
    throw ConfigError(r.line_of("type"), fmt::format("unknown object type '{}'", *type));
  }
  r.finish(fmt::format(" for type {}", *type));
  try {
    return objects::ObjectProfile(std::move(v));
  } catch (const DomainError& e) {
    throw ConfigError(r.line(), std::string("[object]: ") + e.what());
  }
}

scan::ScanPlan read_scan(SectionReader r) {
  scan::ScanPlan plan;
  plan.start_um = r.required_number("start_um");
  plan.stop_um = r.required_number("stop_um");
  plan.step_um = r.required_number("step_um");
  if (const auto mode = r.word("mode")) {
    try {
      plan.mode = scan::parse_scan_mode(*mode);
    } catch (const DomainError& e) {
      throw ConfigError(r.line_of("mode"), e.what());
    }
  }
  const auto leak = r.number("drift_leak_rate");
  const auto loss = r.number("lock_loss_um");
  if (leak.has_value() != loss.has_value()) {
    throw ConfigError(r.line(), "drift needs both 'drift_leak_rate' and 'lock_loss_um'");
  }
  if (leak) plan.drift = scan::Drift{*leak, *loss};
  r.finish();
  try {
    plan.validate();
  } catch (const DomainError& e) {
    throw ConfigError(r.line(), std::string("[scan]: ") + e.what());
  }
  return plan;
}

McSection read_mc(SectionReader r) {
  McSection mc;
  mc.n = r.integer("n");
  mc.seed = r.integer("seed");
  mc.sample.t = r.number("t").value_or(0.0);
  r.check_range("t", mc.sample.t, 0.0, 1.0);
  mc.sample.phi = r.number("phi_rad").value_or(0.0);
  r.finish();
  return mc;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir) {
  const Document doc = parse_document(in);
  RunConfig cfg;
  const auto it = doc.find("interferometer");
  if (it == doc.end()) throw ConfigError(0, "missing required section [interferometer]");
  cfg.interferometer = read_interferometer(SectionReader(it->second, "interferometer"));
  if (const auto b = doc.find("beam"); b != doc.end()) read_beam(SectionReader(b->second, "beam"), cfg);
  if (const auto o = doc.find("object"); o != doc.end()) {
    cfg.object = read_object(SectionReader(o->second, "object"), base_dir);
  }
  if (const auto s = doc.find("scan"); s != doc.end()) cfg.scan = read_scan(SectionReader(s->second, "scan"));
  if (const auto m = doc.find("mc"); m != doc.end()) cfg.mc = read_mc(SectionReader(m->second, "mc"));
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  return parse_run_config(in, path.parent_path());
}

}  // namespace ifm::cli

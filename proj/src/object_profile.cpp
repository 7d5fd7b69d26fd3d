#include "ifm/object_profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ifm/errors.hpp"

namespace ifm::objects {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

void validate(const Absent&) {}

void validate(const KnifeEdge& k) { require(std::isfinite(k.edge_um), "knife edge position must be finite"); }

void validate(const Wire& w) {
  require(finite_all({w.center_um, w.width_um}), "wire parameters must be finite");
  require(w.width_um > 0.0, "wire width must be positive");
}

void validate(const Slit& s) {
  require(finite_all({s.center_um, s.width_um}), "slit parameters must be finite");
  require(s.width_um > 0.0, "slit width must be positive");
  require(s.background_t >= 0.0 && s.background_t <= 1.0, "slit background t must lie in [0, 1]");
}

void validate(const Filament& f) {
  require(finite_all({f.center_um, f.width_um, f.peak_phase_rad}), "filament parameters must be finite");
  require(f.width_um > 0.0, "filament width must be positive");
  require(f.min_t >= 0.0 && f.min_t <= 1.0, "filament min_t must lie in [0, 1]");
}

void validate(const Tabulated& tab) {
  require(!tab.samples.empty(), "tabulated profile needs at least one sample");
  for (std::size_t i = 0; i < tab.samples.size(); ++i) {
    const auto& s = tab.samples[i];
    require(finite_all({s.x_um, s.phi_rad}), "tabulated x and phi must be finite");
    require(s.t >= 0.0 && s.t <= 1.0, "tabulated t must lie in [0, 1]");
    if (i > 0) require(s.x_um > tab.samples[i - 1].x_um, "tabulated x must be strictly increasing");
  }
}

// 1 at the centre, 0 at and beyond +-width/2.
double raised_cosine(double x, double center, double width) {
  const double u = (x - center) / width;
  if (std::abs(u) >= 0.5) return 0.0;
  return 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * u));
}

Transmission evaluate(const Tabulated& tab, double x) {
  const auto& s = tab.samples;
  if (x <= s.front().x_um) return {s.front().t, s.front().phi_rad};
  if (x >= s.back().x_um) return {s.back().t, s.back().phi_rad};
  const auto hi = std::upper_bound(s.begin(), s.end(), x,
                                   [](double v, const TabulatedSample& e) { return v < e.x_um; });
  const auto lo = hi - 1;
  const double w = (x - lo->x_um) / (hi->x_um - lo->x_um);
  return {lo->t + w * (hi->t - lo->t), lo->phi_rad + w * (hi->phi_rad - lo->phi_rad)};
}

const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

}  // namespace

ObjectProfile::ObjectProfile(Variant v) : v_(std::move(v)) {
  std::visit([](const auto& alt) { validate(alt); }, v_);
}

Transmission ObjectProfile::amplitude_at(double x) const {
  return std::visit(
      Overloaded{
          [](const Absent&) { return Transmission{}; },
          [x](const KnifeEdge& k) {
            const bool blocked = k.blocks == Side::right ? x > k.edge_um : x < k.edge_um;
            return Transmission{blocked ? 0.0 : 1.0, 0.0};
          },
          [x](const Wire& w) {
            return Transmission{std::abs(x - w.center_um) <= 0.5 * w.width_um ? 0.0 : 1.0, 0.0};
          },
          [x](const Slit& s) {
            return Transmission{std::abs(x - s.center_um) <= 0.5 * s.width_um ? 1.0 : s.background_t, 0.0};
          },
          [x](const Filament& f) {
            const double bump = raised_cosine(x, f.center_um, f.width_um);
            return Transmission{1.0 - (1.0 - f.min_t) * bump, f.peak_phase_rad * bump};
          },
          [x](const Tabulated& tab) { return evaluate(tab, x); },
      },
      v_);
}

std::vector<double> ObjectProfile::breakpoints(double lo, double hi) const {
  std::vector<double> pts = std::visit(
      Overloaded{
          [](const Absent&) { return std::vector<double>{}; },
          [](const KnifeEdge& k) { return std::vector<double>{k.edge_um}; },
          [](const Wire& w) {
            return std::vector<double>{w.center_um - 0.5 * w.width_um, w.center_um + 0.5 * w.width_um};
          },
          [](const Slit& s) {
            return std::vector<double>{s.center_um - 0.5 * s.width_um, s.center_um + 0.5 * s.width_um};
          },
          [](const Filament& f) {
            return std::vector<double>{f.center_um - 0.5 * f.width_um, f.center_um + 0.5 * f.width_um};
          },
          [](const Tabulated& tab) {
            std::vector<double> xs;
            xs.reserve(tab.samples.size());
            for (const auto& s : tab.samples) xs.push_back(s.x_um);
            return xs;
          },
      },
      v_);
  std::erase_if(pts, [lo, hi](double p) { return !(p > lo && p < hi); });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::string ObjectProfile::kind() const {
  return std::visit(Overloaded{
                        [](const Absent&) { return "absent"; },
                        [](const KnifeEdge&) { return "knife_edge"; },
                        [](const Wire&) { return "wire"; },
                        [](const Slit&) { return "slit"; },
                        [](const Filament&) { return "filament"; },
                        [](const Tabulated&) { return "tabulated"; },
                    },
                    v_);
}

nlohmann::json ObjectProfile::describe() const {
  nlohmann::json j = std::visit(
      Overloaded{
          [](const Absent&) { return nlohmann::json::object(); },
          [](const KnifeEdge& k) { return nlohmann::json{{"edge_um", k.edge_um}, {"blocks", side_name(k.blocks)}}; },
          [](const Wire& w) { return nlohmann::json{{"center_um", w.center_um}, {"width_um", w.width_um}}; },
          [](const Slit& s) {
            return nlohmann::json{
                {"center_um", s.center_um}, {"width_um", s.width_um}, {"background_t", s.background_t}};
          },
          [](const Filament& f) {
            return nlohmann::json{{"center_um", f.center_um},
                                  {"width_um", f.width_um},
                                  {"min_t", f.min_t},
                                  {"peak_phase_rad", f.peak_phase_rad}};
          },
          [](const Tabulated& tab) {
            return nlohmann::json{{"samples", tab.samples.size()},
                                  {"x_min_um", tab.samples.front().x_um},
                                  {"x_max_um", tab.samples.back().x_um}};
          },
      },
      v_);
  j["type"] = kind();
  return j;
}

double phase_from_material(double n, double depth, double wavelength) {
  if (!(depth >= 0.0)) throw DomainError("depth must be non-negative");
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return 2.0 * std::numbers::pi * (n - 1.0) * depth / wavelength;
}

Tabulated read_tabulated(std::istream& in) {
  Tabulated tab;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    TabulatedSample s;
    if (!(fields >> s.x_um)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw DomainError(fmt::format("profile line {}: expected `x_um t phi_rad`", lineno));
    }
    std::string extra;
    if (!(fields >> s.t >> s.phi_rad) || (fields >> extra)) {
      throw DomainError(fmt::format("profile line {}: expected exactly three numeric fields", lineno));
    }
    if (!tab.samples.empty() && !(s.x_um > tab.samples.back().x_um)) {
      throw DomainError(fmt::format("profile line {}: x must be strictly increasing", lineno));
    }
    if (!(s.t >= 0.0 && s.t <= 1.0)) {
      throw DomainError(fmt::format("profile line {}: t must lie in [0, 1]", lineno));
    }
    tab.samples.push_back(s);
  }
  if (tab.samples.empty()) throw DomainError("profile contains no samples");
  return tab;
}

Tabulated read_tabulated_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file: " + path);
  return read_tabulated(in);
}

void write_tabulated(std::ostream& out, const Tabulated& table) {
  out << "# x_um t phi_rad\n";
  for (const auto& s : table.samples) {
    out << fmt::format("{} {} {}\n", s.x_um, s.t, s.phi_rad);
  }
}

}  // namespace ifm::objects

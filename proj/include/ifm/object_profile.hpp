#pragma once

// One-dimensional scannable objects. Positions are in micrometres.

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ifm::objects {

enum class Side { left, right };

struct Absent {};

// Opaque half-plane; `blocks` names the side of edge_um that is opaque.
struct KnifeEdge {
  double edge_um = 0.0;
  Side blocks = Side::right;
};

// Opaque top-hat.
struct Wire {
  double center_um = 0.0;
  double width_um = 0.0;
};

// Transparent gap in a screen of amplitude transmittance background_t.
struct Slit {
  double center_um = 0.0;
  double width_um = 0.0;
  double background_t = 0.0;
};

// Semi-transparent fibre: raised-cosine dip in t down to min_t and bump in
// phase up to peak_phase_rad, both supported on [center - w/2, center + w/2].
struct Filament {
  double center_um = 0.0;
  double width_um = 0.0;
  double min_t = 0.0;
  double peak_phase_rad = 0.0;
};

struct TabulatedSample {
  double x_um = 0.0;
  double t = 1.0;
  double phi_rad = 0.0;

  bool operator==(const TabulatedSample&) const = default;
};

// Linearly interpolated samples; constant extrapolation past either end.
struct Tabulated {
  std::vector<TabulatedSample> samples;
};

struct Transmission {
  double t = 1.0;
  double phi = 0.0;
};

class ObjectProfile {
 public:
  using Variant = std::variant<Absent, KnifeEdge, Wire, Slit, Filament, Tabulated>;

  ObjectProfile() = default;
  // Validates the variant's parameters; throws DomainError.
  explicit ObjectProfile(Variant v);

  static ObjectProfile absent() { return ObjectProfile(Absent{}); }

  const Variant& variant() const { return v_; }

  Transmission amplitude_at(double x_um) const;

  // Positions in (lo, hi) where t or phi has a jump or a kink, sorted. The
  // scan quadrature splits its panels there.
  std::vector<double> breakpoints(double lo, double hi) const;

  std::string kind() const;
  nlohmann::json describe() const;

 private:
  Variant v_{Absent{}};
};

// 2 pi (n - 1) depth / wavelength, with depth and wavelength in the same unit.
double phase_from_material(double n, double depth, double wavelength);

// Profile file: one `x_um t phi_rad` triple per line, '#' starts a comment.
// Throws DomainError (with the line number) on malformed input.
Tabulated read_tabulated(std::istream& in);
Tabulated read_tabulated_file(const std::string& path);
void write_tabulated(std::ostream& out, const Tabulated& table);

}  // namespace ifm::objects

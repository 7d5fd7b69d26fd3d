#pragma once

// Run configuration: a sectioned key = value text file.
//
//   # comment
//   [interferometer]
//   t1 = 0.525
//   t2 = 0.462
//   visibility = 1.0        # optional, default 1
//   crosstalk = 0.0         # optional, default 0
//
//   [beam]                  # either fwhm_um, or all four optics keys
//   fwhm_um = 9.1
//   # wavelength_nm = 670
//   # focal_mm = 60
//   # aperture_mm = 5
//   # beam_mm = 25
//
//   [object]
//   type = wire             # absent | knife_edge | wire | slit | filament | tabulated
//   center_um = 0
//   width_um = 95.5
//
//   [scan]
//   start_um = -150
//   stop_um = 150
//   step_um = 0.91
//   mode = intensity-averaged
//   drift_leak_rate = 1e-4  # optional pair
//   lock_loss_um = 120
//
//   [mc]
//   n = 1000000
//   seed = 1998
//   t = 0                   # sample amplitude transmittance, default 0
//   phi_rad = 0
//
// Unknown sections and keys, duplicates and keys that do not apply to the
// chosen object type are rejected with the offending line number.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "ifm/beam_optics.hpp"
#include "ifm/interferometer.hpp"
#include "ifm/object_profile.hpp"
#include "ifm/scan_engine.hpp"

namespace ifm::cli {

struct McSection {
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  ObjectSample sample = ObjectSample::opaque();
};

struct RunConfig {
  EvConfig interferometer;
  std::optional<double> beam_fwhm_um;
  std::optional<beam::SpotPrediction> beam_prediction;  // set when optics keys were given
  std::optional<objects::ObjectProfile> object;
  std::optional<scan::ScanPlan> scan;
  McSection mc;
};

// Relative profile-file paths are resolved against base_dir. Throws
// ConfigError for syntax and validation problems, IoError for unreadable
// profile files.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace ifm::cli

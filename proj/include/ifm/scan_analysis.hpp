#pragma once

// Recovering widths, resolution, phase and efficiency from scans.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifm/interferometer.hpp"
#include "ifm/scan_engine.hpp"

namespace ifm::analysis {

enum class Channel { transmission, ifm };

std::string to_string(Channel channel);

struct WidthEstimate {
  double fwhm_um = 0.0;
  Channel channel = Channel::transmission;
  // Absolute half-maximum level on the channel signal (baseline + peak / 2).
  double half_max_level = 0.0;
  double left_um = 0.0;
  double right_um = 0.0;
};

struct ResolutionEstimate {
  double spot_fwhm_um = 0.0;
  double rayleigh_um = 0.0;
};

struct PhasePoint {
  double x_um = 0.0;
  std::optional<double> phi;  // empty where the phase cannot be recovered
};

struct SweepRow {
  double r = 0.0;
  double p_ifm = 0.0;
  double eta = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

// FWHM of a single feature in `signal` sampled at `xs`: the baseline (median
// of the first and last 10% of samples) is removed, and the two half-maximum
// crossings are located by linear interpolation. Throws AnalysisError.
WidthEstimate feature_fwhm(std::span<const double> xs, std::span<const double> signal);

// Transmission channel uses 1 - p_norm, the IFM channel p_ifm.
WidthEstimate width_fwhm(const scan::ScanResult& scan, Channel channel);

// Spot FWHM from the derivative of a knife-edge transmission scan.
ResolutionEstimate knife_edge_resolution(const scan::ScanResult& scan);

// Per-record phase recovered from (p_ifm, p_norm) after removing the noise
// floor. Only point-sampled scans are accepted.
std::vector<PhasePoint> phase_profile(const scan::ScanResult& scan, const EvConfig& config);

// Opaque-arm style sweep with R1 = T2 = r. r values must be strictly
// increasing inside (0, 1).
SweepTable efficiency_sweep(std::span<const double> r_values, const ObjectSample& object, double eps);

// n reflectances evenly spaced in (0, 1): r_k = k / (n + 1).
std::vector<double> reflectance_grid(int n);

// Records below this transmission are reported without a phase.
inline constexpr double kMinPhasePnorm = 0.02;

}  // namespace ifm::analysis

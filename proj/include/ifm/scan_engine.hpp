#pragma once

// Raster-scan simulation: beam-weighted object sampling, deterministic scans,
// and single-photon Monte Carlo.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifm/interferometer.hpp"
#include "ifm/object_profile.hpp"

namespace ifm::scan {

// How the dark port sees an extended object under the beam:
//  - point_sampled: the object's on-axis phase with the beam-averaged
//    transmission, a = sqrt(p_norm) e^{i phi(x0)};
//  - coherent_convolved: projection onto the beam mode, a = <t e^{i phi}>_G;
//  - intensity_averaged: a large-area detector integrating the local
//    dark-port intensity |sqrt(T1T2) - t e^{i phi} sqrt(R1R2)|^2 over the beam.
enum class ScanMode { point_sampled, coherent_convolved, intensity_averaged };

std::string to_string(ScanMode mode);
// Throws DomainError for an unknown name.
ScanMode parse_scan_mode(const std::string& name);

// Lock drift: the dark-port floor rises by leak_rate per micrometre of stage
// travel and the scan ends once the stage passes lock_loss_um.
struct Drift {
  double leak_rate = 0.0;
  double lock_loss_um = 0.0;
};

struct ScanPlan {
  double start_um = 0.0;
  double stop_um = 0.0;
  double step_um = 1.0;
  ScanMode mode = ScanMode::intensity_averaged;
  std::optional<Drift> drift;

  void validate() const;
  // Stage positions start + i * step up to stop, before any lock-loss cut.
  std::vector<double> positions() const;
};

// Noise floor at stage position x: visibility floor plus accumulated drift.
double noise_floor_at(const ScanPlan& plan, const EvConfig& config, double x_um);

struct QuadratureOptions {
  // Panel width as a fraction of the beam FWHM.
  double step_fraction = 1.0 / 20.0;
  // Half-width of the integration window in beam FWHMs.
  double half_window = 3.0;
};

struct EffectiveSample {
  double p_norm = 1.0;
  Complex a_obj{1.0, 0.0};
};

EffectiveSample effective_sample(const objects::ObjectProfile& profile, double beam_fwhm_um, double x0_um,
                                 ScanMode mode, const QuadratureOptions& quad = {});

struct ScanRecord {
  double x_um = 0.0;
  double p_norm = 0.0;
  double p_ifm = 0.0;
  double p_abs = 0.0;
  double p_noresult = 0.0;

  bool operator==(const ScanRecord&) const = default;
};

struct ScanMetadata {
  EvConfig config;
  double beam_fwhm_um = 0.0;
  nlohmann::json object = nlohmann::json::object();
  ScanPlan plan;
  std::optional<std::uint64_t> seed;
  double quadrature_step_fraction = QuadratureOptions{}.step_fraction;
  std::string tool_version = IFM_VERSION;
};

struct ScanResult {
  std::vector<ScanRecord> records;
  ScanMetadata metadata;
};

struct ScanOptions {
  QuadratureOptions quadrature;
  // 0 picks the hardware concurrency. Results do not depend on this value.
  unsigned threads = 1;
};

ScanResult run_scan(const ScanPlan& plan, const EvConfig& config, const objects::ObjectProfile& profile,
                    double beam_fwhm_um, const ScanOptions& options = {});

struct OutcomeTally {
  std::uint64_t n_ifm = 0;
  std::uint64_t n_abs = 0;
  std::uint64_t n_noresult = 0;
  std::uint64_t n_total = 0;
  std::uint64_t seed = 0;

  bool operator==(const OutcomeTally&) const = default;
};

// Draws n single-photon outcomes with the probabilities of measure(). The
// photons are split into `shards` contiguous blocks, each with its own
// generator seeded from (seed, shard index); tallies are summed in shard order.
OutcomeTally monte_carlo(const EvConfig& config, const ObjectSample& sample, std::uint64_t n,
                         std::uint64_t seed, unsigned shards = 1);

// Seed of shard `index` for a run seeded with `seed`.
std::uint64_t shard_seed(std::uint64_t seed, unsigned index);

}  // namespace ifm::scan

#pragma once

// Focused-spot size of an apertured lens and the 1-D Gaussian scan kernel.

#include <numbers>

namespace ifm::beam {

// Truncation ratio at which the K-factor fit diverges.
inline constexpr double kTruncationPole = 0.2161;
// Rayleigh resolution per unit spot FWHM.
inline constexpr double kRayleighFactor = 1.18;
// K for the 1/e^2 diameter of an untruncated Gaussian. Not used by the
// default pipeline, which works with FWHM diameters.
inline constexpr double kGaussianDiameterK = 4.0 / std::numbers::pi;

struct BeamSpec {
  double wavelength_m = 0.0;
  double focal_length_m = 0.0;
  double aperture_diameter_m = 0.0;
  double input_beam_diameter_m = 0.0;  // 1/e^2 diameter

  double truncation() const { return input_beam_diameter_m / aperture_diameter_m; }
  void validate() const;
};

struct SpotPrediction {
  double fwhm_m = 0.0;
  double rayleigh_m = 0.0;
  double k_factor = 0.0;
};

// FWHM spot factor as a function of beam truncation T:
//   K = 1.029 + 0.7125 / (T - 0.2161)^2.179 - 0.6445 / (T - 0.2161)^2.221
// Throws DomainError for T <= pole + 1e-6.
double k_factor(double truncation);

// d = K f lambda / aperture, d_R = 1.18 d. Throws DomainError if the spec is
// invalid or the fit yields a non-positive K (truncation below ~0.30).
SpotPrediction spot_fwhm(const BeamSpec& spec);

// exp(-4 ln2 x^2 / fwhm^2)
double gaussian_profile(double x, double fwhm);

}  // namespace ifm::beam

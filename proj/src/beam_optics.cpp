#include "ifm/beam_optics.hpp"

#include <cmath>

#include "ifm/errors.hpp"

namespace ifm::beam {

void BeamSpec::validate() const {
  if (!(wavelength_m > 0.0 && focal_length_m > 0.0 && aperture_diameter_m > 0.0 &&
        input_beam_diameter_m > 0.0)) {
    throw DomainError("beam wavelength, focal length and diameters must be positive");
  }
  if (!(truncation() > kTruncationPole)) {
    throw DomainError("beam truncation must exceed 0.2161");
  }
}

double k_factor(double truncation) {
  if (!(truncation > kTruncationPole + 1e-6)) {
    throw DomainError("truncation at or below the K-factor pole (0.2161)");
  }
  const double d = truncation - kTruncationPole;
  return 1.029 + 0.7125 / std::pow(d, 2.179) - 0.6445 / std::pow(d, 2.221);
}

SpotPrediction spot_fwhm(const BeamSpec& spec) {
  spec.validate();
  const double k = k_factor(spec.truncation());
  if (!(k > 0.0)) {
    throw DomainError("K-factor fit is non-positive at this truncation");
  }
  const double d = k * spec.focal_length_m * spec.wavelength_m / spec.aperture_diameter_m;
  return {d, kRayleighFactor * d, k};
}

double gaussian_profile(double x, double fwhm) {
  if (!(fwhm > 0.0)) throw DomainError("fwhm must be positive");
  const double u = x / fwhm;
  return std::exp(-4.0 * std::numbers::ln2 * u * u);
}

}  // namespace ifm::beam

#include "ifm/interferometer.hpp"

#include <algorithm>
#include <cmath>

#include "ifm/errors.hpp"

namespace ifm {

namespace {

constexpr double kPhaseDomainTol = 1e-9;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void EvConfig::validate() const {
  if (!is_probability(t1)) throw DomainError("t1 must lie in [0, 1]");
  if (!is_probability(t2)) throw DomainError("t2 must lie in [0, 1]");
  if (!(visibility > 0.0 && visibility <= 1.0)) throw DomainError("visibility must lie in (0, 1]");
  if (!(crosstalk_eps >= 0.0 && crosstalk_eps < 0.5)) {
    throw DomainError("cross-talk must lie in [0, 0.5)");
  }
}

void ObjectSample::validate() const {
  if (!is_probability(t)) throw DomainError("object amplitude transmittance must lie in [0, 1]");
  if (!std::isfinite(phi)) throw DomainError("object phase must be finite");
}

double dark_port_probability(const EvConfig& c, Complex object_amplitude) {
  return std::norm(std::sqrt(c.t1 * c.t2) - object_amplitude * std::sqrt(c.r1() * c.r2()));
}

double dark_port_probability_bucket(const EvConfig& c, double p_norm, Complex overlap) {
  const double p = c.t1 * c.t2 + c.r1() * c.r2() * p_norm -
                   2.0 * std::sqrt(c.t1 * c.t2 * c.r1() * c.r2()) * overlap.real();
  return std::max(0.0, p);
}

double absorption_probability(const EvConfig& c, double p_norm) {
  return c.r1_effective() * (1.0 - p_norm);
}

ProbabilityTriple make_triple(double p_ifm, double p_abs) {
  return {p_ifm, p_abs, std::clamp(1.0 - p_ifm - p_abs, 0.0, 1.0)};
}

ProbabilityTriple measure(const EvConfig& config, const ObjectSample& sample) {
  config.validate();
  sample.validate();
  const double p_ifm = dark_port_probability(config, std::polar(sample.t, sample.phi));
  return make_triple(p_ifm, absorption_probability(config, sample.p_norm()));
}

double measure_jones(const EvConfig& config, const ObjectSample& sample) {
  config.validate();
  // The object arm takes the horizontal slot of the Jones operator, so the
  // input angle is chosen with sin^2 = R1 and the analyzer with sin^2 = R2.
  const double theta1 = std::asin(std::sqrt(config.r1()));
  const double theta2 = std::asin(std::sqrt(config.r2()));
  const JonesVector out = object_operator(sample.t, sample.phi) * linear_polarized(theta1);
  return std::norm(analyzer_project(out, theta2));
}

double p_ifm_balanced(double p_norm, double phi) {
  if (!is_probability(p_norm)) throw DomainError("p_norm must lie in [0, 1]");
  return (1.0 + p_norm - 2.0 * std::cos(phi) * std::sqrt(p_norm)) / 4.0;
}

double invert_phase(double p_ifm, double p_norm, const EvConfig& c) {
  if (!(p_norm > 0.0)) {
    throw UndefinedPhaseError("phase is undefined for an opaque object (p_norm = 0)");
  }
  const double tt = c.t1 * c.t2;
  const double rr = c.r1() * c.r2();
  const double denom = 2.0 * std::sqrt(tt * rr * p_norm);
  if (!(denom > 0.0)) {
    throw UndefinedPhaseError("configuration has no interference term; phase is unobservable");
  }
  double cos_phi = (tt + rr * p_norm - p_ifm) / denom;
  if (cos_phi > 1.0 + kPhaseDomainTol || cos_phi < -1.0 - kPhaseDomainTol || std::isnan(cos_phi)) {
    throw InconsistentDataError("implied cos(phi) lies outside [-1, 1]");
  }
  cos_phi = std::clamp(cos_phi, -1.0, 1.0);
  return std::acos(cos_phi);
}

double efficiency(const ProbabilityTriple& triple) {
  const double informative = triple.p_ifm + triple.p_abs;
  if (!(informative > 0.0)) {
    throw UndefinedEfficiencyError("efficiency is undefined when p_ifm = p_abs = 0");
  }
  return triple.p_ifm / informative;
}

double efficiency_ideal(double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("reflectance must lie in (0, 1)");
  return (1.0 - r) / (2.0 - r);
}

double apply_noise_floor(double p_ifm_ideal, double sigma) {
  return p_ifm_ideal + sigma * (1.0 - p_ifm_ideal);
}

double apply_noise_floor(double p_ifm_ideal, const EvConfig& config) {
  return apply_noise_floor(p_ifm_ideal, config.noise_floor());
}

double remove_noise_floor(double p_ifm_observed, double sigma) {
  if (!(sigma < 1.0)) throw DomainError("noise floor must be below 1");
  return (p_ifm_observed - sigma) / (1.0 - sigma);
}

bool dark_port_condition(const EvConfig& config) {
  return std::abs(config.t2 - config.r1()) < 1e-12;
}

}  // namespace ifm

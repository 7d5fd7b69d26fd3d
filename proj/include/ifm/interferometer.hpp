#pragma once

// The Elitzur-Vaidman polarizing Mach-Zehnder as a probability machine.
//
// Arm convention: the reference (object-free) arm is coupled with T1 and
// accepted by the dark-port analyzer with T2; the object arm carries R1 and
// R2. The dark-port amplitude is sqrt(T1 T2) - t e^{i phi} sqrt(R1 R2), so an
// opaque object gives P_ifm = T1 T2 and absorbs R1.

#include "ifm/jones.hpp"

namespace ifm {

struct EvConfig {
  double t1 = 0.5;
  double t2 = 0.5;
  double visibility = 1.0;
  double crosstalk_eps = 0.0;

  double r1() const { return 1.0 - t1; }
  double r2() const { return 1.0 - t2; }
  // Object-arm coupling including PBS leakage of the reference polarization.
  double r1_effective() const { return r1() + crosstalk_eps * (1.0 - r1()); }
  // Dark-port background sigma = (1 - V) / (1 + V).
  double noise_floor() const { return (1.0 - visibility) / (1.0 + visibility); }

  void validate() const;

  static EvConfig balanced() { return {}; }
};

struct ObjectSample {
  double t = 1.0;
  double phi = 0.0;

  double p_norm() const { return t * t; }
  void validate() const;

  static ObjectSample absent() { return {1.0, 0.0}; }
  static ObjectSample opaque() { return {0.0, 0.0}; }
};

struct ProbabilityTriple {
  double p_ifm = 0.0;
  double p_abs = 0.0;
  double p_noresult = 0.0;
};

// |sqrt(T1 T2) - a sqrt(R1 R2)|^2 for an object-arm amplitude a.
double dark_port_probability(const EvConfig& config, Complex object_amplitude);

// Dark-port power seen by a detector that integrates intensity over the beam:
// T1 T2 + R1 R2 p_norm - 2 sqrt(T1 T2 R1 R2) Re(overlap), where overlap is the
// beam-weighted mean of t e^{i phi}. Reduces to dark_port_probability for a
// uniform object.
double dark_port_probability_bucket(const EvConfig& config, double p_norm, Complex overlap);

// R1'(1 - p_norm), with R1' the cross-talk-corrected object-arm coupling.
double absorption_probability(const EvConfig& config, double p_norm);

// Assembles a triple from the dark-port and absorption probabilities; the
// remainder goes to the no-result detector, clamped at zero.
ProbabilityTriple make_triple(double p_ifm, double p_abs);

ProbabilityTriple measure(const EvConfig& config, const ObjectSample& sample);

// The same dark-port probability computed end to end with Jones matrices:
// input polarizer, object operator, analyzer.
double measure_jones(const EvConfig& config, const ObjectSample& sample);

// 50/50 special case: (1 + p_norm - 2 cos(phi) sqrt(p_norm)) / 4.
double p_ifm_balanced(double p_norm, double phi);

// Recovers |phi| in [0, pi] from a dark-port probability and the transmission.
// Throws UndefinedPhaseError when no phase can be inferred (opaque object, or a
// configuration without interference) and InconsistentDataError when the
// implied cos(phi) falls outside [-1, 1] by more than 1e-9.
double invert_phase(double p_ifm, double p_norm, const EvConfig& config);

// p_ifm / (p_ifm + p_abs); throws UndefinedEfficiencyError when both are zero.
double efficiency(const ProbabilityTriple& triple);

// (1 - r) / (2 - r): opaque-object efficiency with R1 = T2 = r.
double efficiency_ideal(double r);

double apply_noise_floor(double p_ifm_ideal, double sigma);
double apply_noise_floor(double p_ifm_ideal, const EvConfig& config);
// Inverse of apply_noise_floor for sigma < 1.
double remove_noise_floor(double p_ifm_observed, double sigma);

// True when the absent-object dark port is exactly dark, i.e. T2 = R1.
bool dark_port_condition(const EvConfig& config);

}  // namespace ifm

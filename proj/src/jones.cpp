#include "ifm/jones.hpp"

#include <algorithm>
#include <cmath>

#include "ifm/errors.hpp"

namespace ifm {

JonesMatrix JonesMatrix::operator*(const JonesMatrix& o) const {
  const auto& a = m_;
  return {a[0] * o.m_[0] + a[1] * o.m_[2], a[0] * o.m_[1] + a[1] * o.m_[3],
          a[2] * o.m_[0] + a[3] * o.m_[2], a[2] * o.m_[1] + a[3] * o.m_[3]};
}

JonesMatrix JonesMatrix::adjoint() const {
  return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

double JonesMatrix::unitarity_defect() const {
  const JonesMatrix g = adjoint() * *this;
  return std::max({std::abs(g(0, 0) - 1.0), std::abs(g(0, 1)), std::abs(g(1, 0)),
                   std::abs(g(1, 1) - 1.0)});
}

std::array<double, 2> JonesMatrix::singular_values() const {
  // Eigenvalues of the Hermitian Gram matrix M^dagger M.
  const JonesMatrix g = adjoint() * *this;
  const double a = g(0, 0).real();
  const double d = g(1, 1).real();
  const double b = std::abs(g(0, 1));
  const double mean = 0.5 * (a + d);
  const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return {std::sqrt(mean + disc), std::sqrt(std::max(0.0, mean - disc))};
}

PbsModel::PbsModel(double crosstalk_eps) : eps_(crosstalk_eps) {
  if (!(crosstalk_eps >= 0.0 && crosstalk_eps < 0.5)) {
    throw DomainError("PBS cross-talk must lie in [0, 0.5)");
  }
}

JonesVector linear_polarized(double theta) { return {std::sin(theta), std::cos(theta)}; }

JonesMatrix object_operator(double t, double phi) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("object amplitude transmittance must lie in [0, 1]");
  }
  return JonesMatrix::diagonal(std::polar(t, phi), 1.0);
}

JonesMatrix wave_plate(double retardance, double axis_angle) {
  // Rotate into the plate frame, retard the axis-aligned component, rotate back.
  const double c = std::cos(axis_angle);
  const double s = std::sin(axis_angle);
  const JonesMatrix to_plate{c, -s, s, c};
  const JonesMatrix from_plate{c, s, -s, c};
  const JonesMatrix retarder = JonesMatrix::diagonal(std::polar(1.0, retardance), 1.0);
  return from_plate * retarder * to_plate;
}

JonesMatrix half_wave_plate(double axis_angle) { return wave_plate(M_PI, axis_angle); }

Complex analyzer_project(const JonesVector& state, double theta2) {
  return std::sin(theta2) * state.h - std::cos(theta2) * state.v;
}

PbsOutputs pbs_split(const JonesVector& state, const PbsModel& pbs) {
  const double eps = pbs.crosstalk_eps();
  const double keep = std::sqrt(1.0 - eps);
  const double leak = std::sqrt(eps);
  return {{keep * state.h, leak * state.v}, {leak * state.h, keep * state.v}};
}

}  // namespace ifm

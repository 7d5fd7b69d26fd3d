#pragma once

// Jones calculus in the [horizontal; vertical] component order, with linear
// polarization angles measured from the vertical axis: a state at angle theta
// is [sin(theta); cos(theta)].

#include <array>
#include <complex>

namespace ifm {

using Complex = std::complex<double>;

struct JonesVector {
  Complex h;
  Complex v;

  double power() const { return std::norm(h) + std::norm(v); }
};

class JonesMatrix {
 public:
  JonesMatrix() = default;
  JonesMatrix(Complex m00, Complex m01, Complex m10, Complex m11) : m_{m00, m01, m10, m11} {}

  static JonesMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static JonesMatrix diagonal(Complex a, Complex b) { return {a, 0.0, 0.0, b}; }

  Complex operator()(int row, int col) const { return m_[static_cast<std::size_t>(2 * row + col)]; }

  JonesVector operator*(const JonesVector& s) const {
    return {m_[0] * s.h + m_[1] * s.v, m_[2] * s.h + m_[3] * s.v};
  }
  JonesMatrix operator*(const JonesMatrix& o) const;

  JonesMatrix adjoint() const;

  // Largest deviation of M^dagger M from the identity, entrywise.
  double unitarity_defect() const;
  bool is_unitary(double tol = 1e-12) const { return unitarity_defect() <= tol; }

  // Singular values of a 2x2 matrix, largest first.
  std::array<double, 2> singular_values() const;

 private:
  std::array<Complex, 4> m_{};
};

// Polarizing beamsplitter with incoherent cross-talk: a fraction eps of each
// polarization's power exits through the "wrong" port. Only powers are
// meaningful on the leaked components; no phase relation is tracked.
class PbsModel {
 public:
  explicit PbsModel(double crosstalk_eps = 0.0);
  double crosstalk_eps() const noexcept { return eps_; }

 private:
  double eps_;
};

struct PbsOutputs {
  JonesVector transmitted;
  JonesVector reflected;
};

JonesVector linear_polarized(double theta);

// diag(t e^{i phi}, 1): the object acts on the horizontal slot only.
JonesMatrix object_operator(double t, double phi);

// Wave plate with retardance `retardance` (pi for a half-wave plate) and fast
// axis at `axis_angle` from the vertical. Global phase is dropped.
JonesMatrix wave_plate(double retardance, double axis_angle);
JonesMatrix half_wave_plate(double axis_angle);

// Amplitude passed by an analyzer at theta2: [sin theta2, -cos theta2] . state.
Complex analyzer_project(const JonesVector& state, double theta2);

PbsOutputs pbs_split(const JonesVector& state, const PbsModel& pbs);

}  // namespace ifm

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ifm/beam_optics.hpp"
#include "ifm/errors.hpp"

using namespace ifm;
using namespace ifm::beam;
using doctest::Approx;

namespace {

// Optics of the apertured diode-laser setup: 670 nm, f = 60 mm, 5 mm iris.
BeamSpec iris_setup(double beam_mm) { return {670e-9, 60e-3, 5e-3, beam_mm * 1e-3}; }

}  // namespace

TEST_CASE("k_factor") {
  // Reference values from a 30-digit evaluation of the fit.
  CHECK(k_factor(5.0) == Approx(1.03259923423383).epsilon(1e-12));
  CHECK(k_factor(5.0) == Approx(1.03).epsilon(0.005));
  CHECK(k_factor(2.0) == Approx(1.05265044304184).epsilon(1e-12));
  CHECK(k_factor(1.0) == Approx(1.13332820263085).epsilon(1e-12));
  CHECK(k_factor(1e6) == Approx(1.029).epsilon(1e-9));
  CHECK_THROWS_AS(k_factor(kTruncationPole), DomainError);
  CHECK_THROWS_AS(k_factor(0.1), DomainError);
}

TEST_CASE("k_factor decreases past its maximum near T = 0.361") {
  double prev = k_factor(0.37);
  for (double t = 0.38; t <= 20.0; t += 0.01) {
    const double k = k_factor(t);
    CHECK(k < prev);
    prev = k;
  }
  // The fit rises steeply from the pole before that maximum.
  CHECK(k_factor(0.30) < k_factor(0.35));
}

TEST_CASE("spot_fwhm") {
  SUBCASE("apertured 25 mm beam") {
    const auto p = spot_fwhm(iris_setup(25.0));
    CHECK(p.fwhm_m * 1e6 == Approx(8.30209784324).epsilon(1e-10));
    CHECK(p.rayleigh_m * 1e6 == Approx(9.79647545502).epsilon(1e-10));
    CHECK(p.fwhm_m * 1e6 == Approx(8.3).epsilon(0.005));
    CHECK(p.rayleigh_m * 1e6 == Approx(9.8).epsilon(0.005));
  }
  SUBCASE("doubling the aperture at fixed truncation halves the spot") {
    const auto a = spot_fwhm({670e-9, 60e-3, 5e-3, 25e-3});
    const auto b = spot_fwhm({670e-9, 60e-3, 10e-3, 50e-3});
    CHECK(b.fwhm_m == Approx(a.fwhm_m / 2.0).epsilon(1e-14));
  }
  SUBCASE("T = 1") {
    const auto p = spot_fwhm(iris_setup(5.0));
    CHECK(p.k_factor == Approx(k_factor(1.0)));
    CHECK(p.fwhm_m * 1e6 == Approx(k_factor(1.0) * 8.04).epsilon(1e-12));
  }
  SUBCASE("rayleigh is 1.18 x fwhm") {
    for (double beam = 2.0; beam < 40.0; beam += 1.5) {
      const auto p = spot_fwhm(iris_setup(beam));
      CHECK(p.rayleigh_m / p.fwhm_m == Approx(1.18).epsilon(1e-14));
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(spot_fwhm(iris_setup(1.0)), DomainError);   // T = 0.2, below the pole
    CHECK_THROWS_AS(spot_fwhm(iris_setup(1.4)), DomainError);   // T = 0.28, K < 0
    CHECK_THROWS_AS(spot_fwhm({0.0, 60e-3, 5e-3, 25e-3}), DomainError);
  }
}

TEST_CASE("gaussian_profile") {
  CHECK(gaussian_profile(0.0, 9.1) == 1.0);
  CHECK(gaussian_profile(4.55, 9.1) == Approx(0.5).epsilon(1e-14));
  CHECK(gaussian_profile(-4.55, 9.1) == Approx(0.5).epsilon(1e-14));
  CHECK(gaussian_profile(9.1, 9.1) == Approx(0.0625).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_profile(0.0, 0.0), DomainError);
}

TEST_CASE("gaussian_profile integrates to fwhm sqrt(pi / (4 ln 2))") {
  for (double fwhm : {0.5, 5.0, 9.1, 30.0}) {
    const double h = fwhm / 100.0;
    double sum = 0.0;
    for (int i = -500; i <= 500; ++i) {
      const double w = (i == -500 || i == 500) ? 0.5 : 1.0;
      sum += w * gaussian_profile(i * h, fwhm);
    }
    const double expected = fwhm * std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
    CHECK(std::abs(sum * h - expected) / expected < 1e-6);
  }
}

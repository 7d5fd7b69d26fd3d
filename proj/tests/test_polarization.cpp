#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ifm/errors.hpp"
#include "ifm/jones.hpp"
#include "test_support.hpp"

using namespace ifm;
using doctest::Approx;
using std::numbers::pi;

namespace {

JonesVector random_state(testing::Gen& g) {
  // Random vector with power <= 1.
  const double p = g.uniform(0.0, 1.0);
  const double a = g.uniform(0.0, pi / 2);
  return {std::polar(std::sqrt(p) * std::sin(a), g.uniform(-pi, pi)),
          std::polar(std::sqrt(p) * std::cos(a), g.uniform(-pi, pi))};
}

}  // namespace

TEST_CASE("linear_polarized follows the [sin; cos] convention") {
  const auto v0 = linear_polarized(0.0);
  CHECK(std::abs(v0.h) == Approx(0.0));
  CHECK(std::abs(v0.v - 1.0) == Approx(0.0));

  const auto h = linear_polarized(pi / 2);
  CHECK(std::abs(h.h - 1.0) < 1e-15);
  CHECK(std::abs(h.v) < 1e-15);

  const auto d = linear_polarized(pi / 4);
  CHECK(d.h.real() == Approx(std::sqrt(0.5)));
  CHECK(d.v.real() == Approx(std::sqrt(0.5)));
  CHECK(d.power() == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("object_operator") {
  SUBCASE("absent object is the identity") {
    const auto m = object_operator(1.0, 0.0);
    CHECK(m.unitarity_defect() < 1e-15);
    CHECK(std::abs(m(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(m(1, 1) - 1.0) < 1e-15);
  }
  SUBCASE("opaque object zeroes the object slot") {
    const auto m = object_operator(0.0, 1.3);
    CHECK(std::abs(m(0, 0)) == 0.0);
    CHECK(std::abs(m(1, 1) - 1.0) < 1e-15);
  }
  SUBCASE("fiber centre") {
    const auto m = object_operator(std::sqrt(0.69), 104.0 * pi / 180.0);
    CHECK(std::abs(m(0, 0)) == Approx(0.8307).epsilon(1e-4));
    CHECK(std::arg(m(0, 0)) == Approx(104.0 * pi / 180.0));
  }
  SUBCASE("t outside [0, 1] is a domain error") {
    CHECK_THROWS_AS(object_operator(1.01, 0.0), DomainError);
    CHECK_THROWS_AS(object_operator(-0.1, 0.0), DomainError);
  }
}

TEST_CASE("analyzer_project") {
  CHECK(std::abs(analyzer_project(linear_polarized(pi / 4), pi / 4)) < 1e-15);

  const Complex a = analyzer_project({0.0, 1.0}, pi / 4);
  CHECK(a.real() == Approx(-std::sqrt(0.5)));
  CHECK(std::norm(a) == Approx(0.5));

  // Fiber-centre state through a 50/50 interferometer.
  const double s = std::sin(pi / 4);
  const JonesVector fiber{std::polar(std::sqrt(0.69), 1.815) * s, std::cos(pi / 4)};
  CHECK(std::norm(analyzer_project(fiber, pi / 4)) == Approx(0.52).epsilon(0.01));
}

TEST_CASE("pbs_split") {
  SUBCASE("ideal PBS separates the components") {
    const auto out = pbs_split({1.0, 0.0}, PbsModel(0.0));
    CHECK(out.transmitted.power() == Approx(1.0));
    CHECK(out.reflected.power() == 0.0);

    const auto diag = pbs_split(linear_polarized(pi / 4), PbsModel(0.0));
    CHECK(diag.transmitted.power() == Approx(0.5));
    CHECK(diag.reflected.power() == Approx(0.5));
    CHECK(std::abs(diag.transmitted.v) == 0.0);
    CHECK(std::abs(diag.reflected.h) == 0.0);
  }
  SUBCASE("cross-talk leaks eps of the wrong polarization") {
    const auto out = pbs_split({1.0, 0.0}, PbsModel(0.01));
    CHECK(out.reflected.power() == Approx(0.01).epsilon(1e-12));
    CHECK(out.transmitted.power() + out.reflected.power() == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("eps outside [0, 0.5) is rejected") {
    CHECK_THROWS_AS(PbsModel(0.5), DomainError);
    CHECK_THROWS_AS(PbsModel(-1e-3), DomainError);
  }
}

TEST_CASE("half-wave plate rotates linear polarization to 2a - theta") {
  const auto out = half_wave_plate(pi / 8) * linear_polarized(0.0);
  const auto expect = linear_polarized(pi / 4);
  CHECK(std::abs(out.h - expect.h) < 1e-14);
  CHECK(std::abs(out.v - expect.v) < 1e-14);
}

TEST_CASE("property: lossless elements conserve power") {
  testing::Gen g(11);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const auto s = random_state(g);
    const auto plate = wave_plate(g.uniform(0.0, 2 * pi), g.uniform(-pi, pi));
    REQUIRE(plate.is_unitary(1e-12));
    CHECK(std::abs((plate * s).power() - s.power()) < 1e-12);
  }
}

TEST_CASE("property: pbs_split conserves power for every eps and state") {
  testing::Gen g(12);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const auto s = random_state(g);
    const PbsModel pbs(g.uniform(0.0, 0.4999));
    const auto out = pbs_split(s, pbs);
    CHECK(std::abs(out.transmitted.power() + out.reflected.power() - s.power()) < 1e-12);
  }
}

TEST_CASE("property: object operator has singular values <= 1 and identity when absent") {
  testing::Gen g(13);
  const auto id = object_operator(1.0, 0.0);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const auto m = object_operator(g.uniform(0.0, 1.0), g.uniform(-pi, pi));
    const auto sv = m.singular_values();
    CHECK(sv[0] <= 1.0 + 1e-12);
    CHECK(sv[1] >= 0.0);

    const auto s = random_state(g);
    const auto o = id * s;
    CHECK(std::abs(o.h - s.h) < 1e-15);
    CHECK(std::abs(o.v - s.v) < 1e-15);
  }
}

TEST_CASE("property: analyzer nulls an absent-object state at the complementary angle") {
  // [sin a, -cos a] . [sin t; cos t] = -cos(a + t), so the null sits at a = pi/2 - t.
  testing::Gen g(14);
  for (int i = 0; i < testing::kPropertyCases; ++i) {
    const double theta = g.uniform(-2 * pi, 2 * pi);
    CHECK(std::abs(analyzer_project(linear_polarized(theta), pi / 2 - theta)) < 1e-14);
    CHECK(analyzer_project(linear_polarized(theta), theta).real() == Approx(-std::cos(2 * theta)));
  }
}

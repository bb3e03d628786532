#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "nfloc/geometry.hpp"
#include "oracles.hpp"

using namespace nfloc;

namespace {
constexpr double kDeg = kPi / 180.0;
}

TEST_CASE("element offsets are centered and symmetric") {
  CHECK(element_offsets(ArrayConfig(3, 28e9)) == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(element_offsets(ArrayConfig(4, 28e9)) == std::vector<double>{-1.5, -0.5, 0.5, 1.5});
  const auto big = element_offsets(ArrayConfig(128, 28e9));
  CHECK(big.front() == -63.5);
  CHECK(big.back() == 63.5);
  for (int n : {2, 5, 64, 65}) {
    const auto off = element_offsets(ArrayConfig(n, 28e9));
    CHECK(std::accumulate(off.begin(), off.end(), 0.0) == doctest::Approx(0.0));
    for (std::size_t i = 0; i < off.size(); ++i) CHECK(off[i] == -off[off.size() - 1 - i]);
  }
}

TEST_CASE("array config validation") {
  CHECK_THROWS_AS(ArrayConfig(1, 28e9), std::invalid_argument);
  CHECK_THROWS_AS(ArrayConfig(4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Target(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Target(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Target(1.0, kPi), std::invalid_argument);
  const ArrayConfig a(8, 28e9);
  CHECK(a.spacing_m() == doctest::Approx(kSpeedOfLight / 28e9 / 2.0));
  CHECK_THROWS_AS(exact_distance(a, Target(10, 1), 8), std::out_of_range);
}

TEST_CASE("frequency grid") {
  const FrequencyGrid g(4, 1e6, 28e9);
  CHECK(g.frequency(0) == 28e9);
  CHECK(g.frequency(3) == 28e9 + 3e6);
  CHECK(g.bandwidth_hz() == 4e6);
  CHECK(g.wavenumber(1) == doctest::Approx(2 * kPi * g.frequency(1) / kSpeedOfLight));
}

TEST_CASE("exact distance") {
  const ArrayConfig a(5, 28e9, 0.005);
  SUBCASE("broadside") {
    for (int n = 0; n < 5; ++n) {
      const double x = a.offset(n) * a.spacing_m();
      CHECK(exact_distance(a, Target(7.0, kPi / 2), n) == doctest::Approx(std::sqrt(49.0 + x * x)).epsilon(1e-14));
    }
  }
  SUBCASE("center element") { CHECK(exact_distance(a, Target(12.5, 0.7), 2) == 12.5); }
  SUBCASE("cartesian oracle") {
    const double ref = oracle::cartesian_distance(10.0, kPi / 3, a.offset(1) * 0.005);
    CHECK(std::abs(exact_distance(a, Target(10.0, kPi / 3), 1) - ref) / ref < 1e-12);
  }
}

TEST_CASE("fresnel distance") {
  const ArrayConfig a(128, 28e9);
  CHECK(fresnel_distance(ArrayConfig(5, 28e9), Target(9.0, 1.1), 2) == 9.0);
  const double x = a.offset(3) * a.spacing_m();
  CHECK(fresnel_distance(a, Target(4.0, kPi / 2), 3) == doctest::Approx(4.0 + x * x / 8.0).epsilon(1e-14));
  const Target t(20.0, 2 * kPi / 5);
  const double exact = exact_distance(a, t, 1);
  CHECK(std::abs(fresnel_distance(a, t, 1) - exact) / exact < 1e-5);
}

TEST_CASE("fresnel error shrinks with range") {
  const ArrayConfig a(128, 28e9);
  for (double th : {40 * kDeg, 75 * kDeg, 120 * kDeg}) {
    double prev = 1e300;
    for (double r : {5.0, 10.0, 20.0, 40.0, 80.0}) {
      double worst = 0.0;
      for (int n = 0; n < 128; ++n) {
        const double e = exact_distance(a, Target(r, th), n);
        CHECK(e > 0.0);
        worst = std::max(worst, std::abs(e - fresnel_distance(a, Target(r, th), n)) / e);
      }
      CHECK(worst < prev);
      prev = worst;
    }
  }
}

TEST_CASE("steering vector") {
  SUBCASE("unit modulus, squared norm N") {
    const ArrayConfig a(65, 28e9);
    const auto v = steering_vector(a, 28.3e9, Target(11.0, 1.2));
    CHECK(v.size() == 65);
    CHECK(v.squaredNorm() == doctest::Approx(65.0).epsilon(1e-14));
    for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(std::abs(v(i)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("two elements, single broadside source") {
    // Smallest valid array; both entries share the broadside distance.
    const ArrayConfig a(2, 28e9);
    const auto v = steering_vector(a, 28e9, Target(3.0, kPi / 2));
    const double dist = std::sqrt(9.0 + std::pow(a.spacing_m() / 2, 2));
    CHECK(std::abs(v(0) - std::polar(1.0, -2 * kPi * 28e9 * dist / kSpeedOfLight)) < 1e-12);
    CHECK(std::abs(v(1) - v(0)) < 1e-15);
  }
  SUBCASE("per-element oracle") {
    const ArrayConfig a(4, 28e9);
    const auto v = steering_vector(a, 28e9, Target(15.0, kPi / 2));
    for (int i = 0; i < 4; ++i) {
      const double dist = oracle::cartesian_distance(15.0, kPi / 2, oracle::element_x(4, a.spacing_m(), i));
      CHECK(std::abs(v(i) - std::polar(1.0, -2 * oracle::kPi * 28e9 * dist / oracle::kC)) < 1e-10);
    }
  }
}

TEST_CASE("fresnel phase parameters") {
  const ArrayConfig a(9, 28e9);
  CHECK(fresnel_phase_params(a, 28e9, Target(10.0, kPi / 2)).gamma == doctest::Approx(0.0));

  SUBCASE("eta at half-wavelength spacing and r = 100 wavelengths") {
    const double f = 30e9;
    const double lambda = kSpeedOfLight / f;
    const ArrayConfig b(9, 28e9, lambda / 2);
    CHECK(fresnel_phase_params(b, f, Target(100 * lambda, kPi / 2)).eta ==
          doctest::Approx(-kPi / 400).epsilon(1e-13));
  }

  SUBCASE("phase identity with the fresnel distance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(3.0, 60.0), ut(0.2, 2.9), uf(27e9, 31e9);
    const ArrayConfig big(128, 28e9);
    for (int trial = 0; trial < 50; ++trial) {
      const Target t(ur(rng), ut(rng));
      const double f = uf(rng);
      const FresnelPhase ph = fresnel_phase_params(big, f, t);
      const auto v = fresnel_steering_vector(big, f, t);
      for (int n = 0; n < 128; ++n) {
        const double d = big.offset(n);
        const cplx model = std::polar(1.0, ph.phi + ph.gamma * d + ph.eta * d * d);
        const cplx direct = std::polar(1.0, -2 * kPi * f * fresnel_distance(big, t, n) / kSpeedOfLight);
        CHECK(std::abs(model - direct) < 1e-10);
        CHECK(std::abs(v(n) - direct) < 1e-10);
      }
    }
  }
}

TEST_CASE("rayleigh distance") {
  CHECK(rayleigh_distance(ArrayConfig(128, 28e9)) == doctest::Approx(87.7).epsilon(1e-3));
  const double lambda = kSpeedOfLight / 28e9;
  CHECK(rayleigh_distance(ArrayConfig(2, 28e9)) == doctest::Approx(2 * lambda));
  const double d = 0.004;
  CHECK(rayleigh_distance(ArrayConfig(64, 28e9, d)) ==
        doctest::Approx(4 * rayleigh_distance(ArrayConfig(32, 28e9, d))));
}

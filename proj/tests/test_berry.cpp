#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qresponse/berry.hpp"
#include "test_support.hpp"

using namespace qresponse;

namespace {

// random non-degenerate cartesian parameter point (all gaps above 0.05)
struct CartPoint {
  NvParams p;
  FieldVector h;
};

CartPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const NvParams p{0.2 + 1.8 * u(rng), 0.4 * u(rng)};
    const FieldVector h{2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0};
    const EigenSystem sys = eig3_exact(hamiltonian_cartesian(p, h));
    if (std::min(sys.values(1) - sys.values(0), sys.values(2) - sys.values(1)) > 0.05) {
      return {p, h};
    }
  }
}

}  // namespace

TEST_SUITE("berry") {

TEST_CASE("closed form matches the sum-over-states evaluation") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const CartPoint pt = random_point(rng);
    const HamiltonianFamily fam = cartesian_field_family(pt.p);
    const std::vector<double> at{pt.h.hx, pt.h.hy, pt.h.hz};
    for (int band = 0; band < 3; ++band) {
      const CurvatureCartesian analytic =
          curvature_cartesian_analytic(pt.p, pt.h, band);
      CHECK(std::abs(analytic.f_xy - curvature_numeric(fam, at, 0, 1, band)) < 1e-10);
      CHECK(std::abs(analytic.f_xz - curvature_numeric(fam, at, 0, 2, band)) < 1e-10);
      CHECK(std::abs(analytic.f_yz - curvature_numeric(fam, at, 1, 2, band)) < 1e-10);
    }
  }
}

TEST_CASE("special-case zeros") {
  // hz = 0 forces F_xy = 0 for any E, hx, hy
  CHECK(curvature_cartesian_analytic({1.3, 0.25}, {0.4, -0.3, 0.0}, 0).f_xy == 0.0);
  // E = 0 and hz = 0 force F_xz = F_yz = 0
  const CurvatureCartesian c = curvature_cartesian_analytic({0.7, 0.0}, {0.5, 0.2, 0.0}, 0);
  CHECK(c.f_xz == 0.0);
  CHECK(c.f_yz == 0.0);
}

TEST_CASE("near-degenerate input raises with the offending gap") {
  // D = 1, h = (0, 0, 1): spectrum (0, 0, 2), exactly degenerate
  try {
    curvature_cartesian_analytic({1.0, 0.0}, {0.0, 0.0, 1.0}, 0);
    FAIL("expected DegeneratePointError");
  } catch (const DegeneratePointError& err) {
    CHECK(err.gap <= kGapGuard);
  }
}

TEST_CASE("spherical analytic curvature") {
  const double d = 0.06765;
  const double compact = spherical_ground_curvature_pi2(d);
  CHECK(compact == doctest::Approx(d - (d * d + 2.0) / std::sqrt(d * d + 4.0)));

  SUBCASE("theta = pi/2 ground value against the compact form") {
    const CurvatureSpherical c =
        curvature_spherical_analytic(d, std::numbers::pi / 2.0, 0);
    CHECK(std::abs(c.f_phitheta - compact) < 1e-9);
    CHECK(compact == doctest::Approx(-0.93407).epsilon(1e-4));
  }

  SUBCASE("theta = pi/2 against the numeric oracle, all bands") {
    const HamiltonianFamily fam = spherical_family(d);
    for (int band = 0; band < 3; ++band) {
      const double numeric =
          curvature_numeric(fam, {std::numbers::pi / 2.0, 0.4}, 1, 0, band);
      const CurvatureSpherical analytic =
          curvature_spherical_analytic(d, std::numbers::pi / 2.0, band);
      CHECK(std::abs(numeric - analytic.f_phitheta) < 1e-8);
    }
  }

  SUBCASE("theta = 0 vanishes") {
    CHECK(curvature_spherical_analytic(0.5, 0.0, 0).f_phitheta == 0.0);
  }

  SUBCASE("D = 1 value 1 - 3/sqrt(5)") {
    const HamiltonianFamily fam = spherical_family(1.0);
    const double numeric =
        curvature_numeric(fam, {std::numbers::pi / 2.0, 0.0}, 1, 0, 0);
    CHECK(numeric == doctest::Approx(1.0 - 3.0 / std::sqrt(5.0)).epsilon(1e-8));
    CHECK(numeric == doctest::Approx(-0.34164).epsilon(1e-4));
  }
}

TEST_CASE("spherical curvature is independent of phi") {
  const double d = 0.5, theta = 1.0;
  const HamiltonianFamily fam = spherical_family(d);
  const double at_zero = curvature_numeric(fam, {theta, 0.0}, 1, 0, 0);
  const double at_phi = curvature_numeric(fam, {theta, 2.1}, 1, 0, 0);
  CHECK(std::abs(at_zero - at_phi) < 1e-9);
  CHECK(std::abs(curvature_spherical_analytic(d, theta, 0).f_phitheta - at_zero) < 1e-9);
}

TEST_CASE("generic spherical points match the numeric oracle") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int bands = 3;
  for (int trial = 0; trial < 40; ++trial) {
    const double d = 0.2 + 2.0 * u(rng);
    const double theta = 0.2 + 2.7 * u(rng);
    const HamiltonianFamily fam = spherical_family(d);
    for (int band = 0; band < bands; ++band) {
      double numeric;
      try {
        numeric = curvature_numeric(fam, {theta, 0.0}, 1, 0, band);
      } catch (const DegeneratePointError&) {
        continue;
      }
      const CurvatureSpherical analytic = curvature_spherical_analytic(d, theta, band);
      CHECK(std::abs(numeric - analytic.f_phitheta) < 1e-8);
    }
  }
}

TEST_CASE("numeric curvature properties") {
  const HamiltonianFamily fam = cartesian_field_family({0.9, 0.1});
  const std::vector<double> at{0.3, 0.2, 0.4};

  SUBCASE("mu = lambda vanishes") {
    CHECK(curvature_numeric(fam, at, 1, 1, 0) == 0.0);
  }

  SUBCASE("antisymmetry") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const CartPoint pt = random_point(rng);
      const HamiltonianFamily f = cartesian_field_family(pt.p);
      const std::vector<double> x{pt.h.hx, pt.h.hy, pt.h.hz};
      const double fwd = curvature_numeric(f, x, 0, 2, 0);
      const double rev = curvature_numeric(f, x, 2, 0, 0);
      CHECK(std::abs(fwd + rev) < 1e-10);
    }
  }

  SUBCASE("band sum vanishes") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
      const CartPoint pt = random_point(rng);
      const HamiltonianFamily f = cartesian_field_family(pt.p);
      const std::vector<double> x{pt.h.hx, pt.h.hy, pt.h.hz};
      double sum = 0.0;
      for (int band = 0; band < 3; ++band) sum += curvature_numeric(f, x, 0, 1, band);
      CHECK(std::abs(sum) < 1e-9);
    }
  }

  SUBCASE("missing derivative index rejected") {
    CHECK_THROWS_AS(curvature_numeric(fam, at, 0, 5, 0), std::invalid_argument);
  }
}

TEST_CASE("finite-difference geometric tensor") {
  const double d = 0.8, theta = 1.2;
  const HamiltonianFamily fam = spherical_family(d);
  const StateFamily states = eigenstate_family(fam, 0);
  const std::vector<double> at{theta, 0.0};

  SUBCASE("-2 Im chi matches the sum-over-states curvature") {
    const Complex chi = geometric_tensor_fd(states, at, 1, 0, 1e-4);
    const double numeric = curvature_numeric(fam, at, 1, 0, 0);
    CHECK(std::abs(-2.0 * chi.imag() - numeric) < 1e-5);
  }

  SUBCASE("diagonal components are real") {
    CHECK(std::abs(geometric_tensor_fd(states, at, 0, 0, 1e-4).imag()) < 1e-8);
    CHECK(std::abs(geometric_tensor_fd(states, at, 1, 1, 1e-4).imag()) < 1e-8);
  }

  SUBCASE("real part is symmetric") {
    const Complex a = geometric_tensor_fd(states, at, 0, 1, 1e-4);
    const Complex b = geometric_tensor_fd(states, at, 1, 0, 1e-4);
    CHECK(std::abs(a.real() - b.real()) < 1e-6);
  }

  SUBCASE("step underflow rejected") {
    CHECK_THROWS_AS(geometric_tensor_fd(states, at, 0, 1, 1e-13), NumericError);
  }
}

TEST_CASE("three-way agreement at random non-degenerate points") {
  std::mt19937_64 rng(4242);
  int checked = 0;
  while (checked < 12) {  // the full 50-point version runs in the acceptance suite
    const CartPoint pt = random_point(rng);
    const HamiltonianFamily fam = cartesian_field_family(pt.p);
    const std::vector<double> at{pt.h.hx, pt.h.hy, pt.h.hz};
    const CurvatureCartesian analytic = curvature_cartesian_analytic(pt.p, pt.h, 0);
    const double numeric = curvature_numeric(fam, at, 0, 2, 0);
    const Complex chi = geometric_tensor_fd(eigenstate_family(fam, 0), at, 0, 2, 1e-4);
    CHECK(std::abs(analytic.f_xz - numeric) < 1e-8);
    CHECK(std::abs(-2.0 * chi.imag() - numeric) < 1e-5);
    ++checked;
  }
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qresponse/berry.hpp"
#include "qresponse/propagator.hpp"
#include "test_support.hpp"

using namespace qresponse;

TEST_SUITE("propagator") {

TEST_CASE("stationary state picks up only a phase") {
  const SpinOperators s = spin_operators(1.0);
  auto h_of_t = [&s](double) { return s.sz; };
  StateVector psi0(3);
  psi0 << 1, 0, 0;
  const StateVector psi = evolve(h_of_t, psi0, std::numbers::pi, 1e-10);
  // e^{-i pi} |psi0>
  CHECK(std::abs(psi(0) - Complex(-1.0, 0.0)) < 1e-9);
  CHECK(std::abs(psi(1)) < 1e-12);
  CHECK(expectation(psi, s.sz) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("unitarity across random protocols") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const SpinOperators s = spin_operators(1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), w = 1.0 + u(rng);
    auto h_of_t = [&](double t) {
      return ComplexMatrix(0.7 * s.sz * s.sz + a * std::cos(w * t) * s.sx +
                           b * std::sin(w * t) * s.sy + c * s.sz);
    };
    const StateVector psi0 = test::random_state(rng, 3);
    const StateVector psi = evolve(h_of_t, psi0, 5.0, 1e-8);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("rotating protocol invariants") {
  const QuenchProtocol proto = rotating_quench(0.05);
  CHECK(proto.t_final == doctest::Approx(std::numbers::pi / 0.05));
  // theta(t_f) = pi/2, theta(0) = 0
  const FieldVector end = proto.field(proto.t_final);
  CHECK(end.hx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(end.hz) < 1e-12);
  const FieldVector start = proto.field(0.0);
  CHECK(start.hz == doctest::Approx(1.0));
  // instantaneous velocity: d theta/dt = v^2 t / pi -> v at t_f, 0 at 0
  const double dt = 1e-6;
  const double v_end =
      (proto.field(proto.t_final).theta() - proto.field(proto.t_final - dt).theta()) / dt;
  CHECK(v_end == doctest::Approx(0.05).epsilon(1e-4));
  const double v_start = (proto.field(dt).theta() - proto.field(0.0).theta()) / dt;
  CHECK(std::abs(v_start) < 1e-6);
}

TEST_CASE("adiabatic fidelity at slow quench") {
  const ResponseResult r = rotating_quench_response(0.06765, 0.01, 1e-7);
  CHECK(r.adiabatic_fidelity > 0.999);
}

TEST_CASE("large gap keeps the evolution adiabatic") {
  const ResponseResult r = rotating_quench_response(10.0, 0.1, 1e-8);
  CHECK(r.adiabatic_fidelity > 0.9999);
}

TEST_CASE("retrieved curvature approaches the analytic value") {
  const double d = 0.06765;
  const double reference = quench_reference_value(d);
  CHECK(reference == doctest::Approx(0.93407).epsilon(1e-4));
  const ResponseResult r = rotating_quench_response(d, 0.02, 1e-7);
  CHECK(std::abs(r.retrieved_curvature - reference) / reference < 0.02);
}

TEST_CASE("error decreases as v halves, consistent with an O(v) residual") {
  const double d = 0.06765;
  const double reference = quench_reference_value(d);
  double previous = std::numeric_limits<double>::infinity();
  for (double v : {0.08, 0.04, 0.02}) {
    const ResponseResult r = rotating_quench_response(d, v, 1e-7);
    const double err = std::abs(r.retrieved_curvature - reference);
    CHECK(err < previous);
    CHECK(err < 0.3 * v);  // single linear bound across the sweep
    previous = err;
  }
}

TEST_CASE("retrieved value is minus the ground-band curvature at pi/2") {
  // sign pairing between the measured response and the curvature convention
  for (double d : {0.06765, 0.5, 2.0}) {
    const double f = curvature_spherical_analytic(d, std::numbers::pi / 2.0, 0).f_phitheta;
    CHECK(quench_reference_value(d) == doctest::Approx(-f).epsilon(1e-12));
  }
}

TEST_CASE("gauge robustness: global phase of psi0 leaves observables unchanged") {
  const double d = 0.3, v = 0.1;
  const QuenchProtocol proto = rotating_quench(v);
  const NvParams p{d, 0.0};
  auto h_of_t = [&](double t) { return hamiltonian_cartesian(p, proto.field(t)); };
  const EigenSystem start = eig3_exact(h_of_t(0.0));
  const SpinOperators s = spin_operators(1.0);

  const StateVector base = start.vectors.col(0);
  const StateVector rotated = std::exp(Complex(0.0, 1.234)) * base;
  const double sy_base =
      expectation(evolve(h_of_t, base, proto.t_final, 1e-8), s.sy);
  const double sy_rot =
      expectation(evolve(h_of_t, rotated, proto.t_final, 1e-8), s.sy);
  CHECK(std::abs(sy_base - sy_rot) / v < 1e-9);
}

TEST_CASE("second-order convergence of the midpoint exponential") {
  const double d = 0.3, v = 0.2;
  const QuenchProtocol proto = rotating_quench(v);
  const NvParams p{d, 0.0};
  auto h_of_t = [&](double t) { return hamiltonian_cartesian(p, proto.field(t)); };
  const StateVector psi0 = eig3_exact(h_of_t(0.0)).vectors.col(0);
  const SpinOperators s = spin_operators(1.0);

  auto run_fixed = [&](double dt) {
    StepControl control;
    control.dt_fixed = dt;
    return expectation(evolve(h_of_t, psi0, proto.t_final, control), s.sy);
  };
  const double reference = run_fixed(0.0025);
  const double coarse_err = std::abs(run_fixed(0.08) - reference);
  const double fine_err = std::abs(run_fixed(0.04) - reference);
  const double ratio = coarse_err / fine_err;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);
}

TEST_CASE("degenerate configuration rejected") {
  CHECK_THROWS_AS(rotating_quench_response(1.0, 0.05, 1e-8), DegeneratePointError);
}

TEST_CASE("response sweep") {
  SUBCASE("empty list gives empty results") {
    CHECK(response_sweep(0.5, {}, 1e-8).empty());
  }
  SUBCASE("results independent of the thread schedule") {
    const std::vector<double> vs{0.2, 0.3, 0.45};
    const auto serial = response_sweep(0.5, vs, 1e-8, 1);
    const auto parallel = response_sweep(0.5, vs, 1e-8, 2);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
      CHECK(serial[i].observable_value == parallel[i].observable_value);
      CHECK(serial[i].retrieved_curvature == parallel[i].retrieved_curvature);
    }
  }
}

TEST_CASE("evolve rejects invalid input") {
  const SpinOperators s = spin_operators(1.0);
  auto h_of_t = [&s](double) { return s.sz; };
  StateVector unnormalized(3);
  unnormalized << 1, 1, 0;
  CHECK_THROWS_AS(evolve(h_of_t, unnormalized, 1.0, 1e-8), std::invalid_argument);
}

}  // TEST_SUITE

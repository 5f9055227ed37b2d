#include <doctest.h>

#include <cmath>

#include "qresponse/linalg.hpp"
#include "test_support.hpp"

using namespace qresponse;

TEST_SUITE("linalg") {

TEST_CASE("spin-1 matrices in the descending-m basis") {
  const SpinOperators s = spin_operators(1.0);
  REQUIRE(s.dim() == 3);
  CHECK(s.sz(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.sz(1, 1).real() == doctest::Approx(0.0));
  CHECK(s.sz(2, 2).real() == doctest::Approx(-1.0).epsilon(1e-15));
  // off-diagonal fixed by the (hx - i hy)/sqrt(2) Zeeman entries
  CHECK(std::abs(s.sx(0, 1) - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
  CHECK(std::abs(s.sy(0, 1) - Complex(0.0, -1.0 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("spin-1/2 is half the Pauli matrices") {
  const SpinOperators s = spin_operators(0.5);
  ComplexMatrix pauli_x(2, 2);
  pauli_x << 0, 1, 1, 0;
  CHECK((s.sx - 0.5 * pauli_x).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(s.sz(0, 0) - Complex(0.5)) < 1e-15);
}

TEST_CASE("commutation relations [Sx,Sy] = i Sz and cyclic") {
  for (double s : {0.5, 1.0, 1.5, 2.0, 2.5, 5.0, 10.0}) {
    const SpinOperators ops = spin_operators(s);
    const Complex i(0.0, 1.0);
    CHECK((ops.sx * ops.sy - ops.sy * ops.sx - i * ops.sz).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ops.sy * ops.sz - ops.sz * ops.sy - i * ops.sx).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ops.sz * ops.sx - ops.sx * ops.sz - i * ops.sy).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(hermiticity_defect(ops.sx) < 1e-12);
    CHECK(hermiticity_defect(ops.sy) < 1e-12);
  }
}

TEST_CASE("non-half-integer spin rejected") {
  CHECK_THROWS_AS(spin_operators(0.3), std::invalid_argument);
  CHECK_THROWS_AS(spin_operators(-1.0), std::invalid_argument);
}

TEST_CASE("kron identities") {
  CHECK((kron(identity(2), identity(3)) - identity(6)).cwiseAbs().maxCoeff() == 0.0);
  ComplexMatrix dz(2, 2);
  dz << 1, 0, 0, -1;
  ComplexMatrix expect(4, 4);
  expect.setZero();
  expect(0, 0) = 1; expect(1, 1) = 1; expect(2, 2) = -1; expect(3, 3) = -1;
  CHECK((kron(dz, identity(2)) - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron mixed-product and associativity on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const ComplexMatrix a = test::random_hermitian(rng, 2);
    const ComplexMatrix b = test::random_hermitian(rng, 2);
    const ComplexMatrix c = test::random_hermitian(rng, 2);
    const ComplexMatrix d = test::random_hermitian(rng, 2);
    CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("expectation values") {
  const SpinOperators s = spin_operators(1.0);
  StateVector e0(3);
  e0 << 1, 0, 0;
  CHECK(expectation(e0, s.sz) == doctest::Approx(1.0).epsilon(1e-14));

  StateVector plus(3);
  plus << 1, 1, 0;
  plus /= std::sqrt(2.0);
  // brute-force mat-vec oracle
  const Complex direct = plus.dot(s.sx * plus);
  CHECK(expectation(plus, s.sx) == doctest::Approx(direct.real()).epsilon(1e-14));
  CHECK(expectation(plus, s.sx) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0)) * 2.0).epsilon(1e-12));

  // real states give zero for the purely imaginary Sy
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  StateVector real_state(3);
  for (int i = 0; i < 3; ++i) real_state(i) = gauss(rng);
  real_state.normalize();
  CHECK(std::abs(expectation(real_state, s.sy)) < 1e-14);
}

TEST_CASE("expectation error paths") {
  const SpinOperators s = spin_operators(1.0);
  StateVector wrong_dim(2);
  wrong_dim << 1, 0;
  CHECK_THROWS_AS(expectation(wrong_dim, s.sz), std::invalid_argument);

  ComplexMatrix skew(3, 3);
  skew.setZero();
  skew(0, 1) = Complex(0.0, 1.0);
  skew(1, 0) = Complex(0.0, 1.0);  // not Hermitian
  StateVector psi(3);
  psi << 1, 1, 0;
  psi.normalize();
  CHECK_THROWS_AS(expectation(psi, skew), NumericError);
}

TEST_CASE("hermiticity helpers") {
  std::mt19937_64 rng(7);
  const ComplexMatrix h = test::random_hermitian(rng, 4);
  CHECK(hermiticity_defect(h) < 1e-15);
  CHECK_NOTHROW(require_hermitian(h));
  ComplexMatrix bad = h;
  bad(0, 1) += Complex(0.0, 1e-6);
  CHECK_THROWS_AS(require_hermitian(bad), NumericError);
}

}  // TEST_SUITE

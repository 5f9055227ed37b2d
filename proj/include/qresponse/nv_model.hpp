#pragma once

#include "qresponse/linalg.hpp"

namespace qresponse {

// Rescaled units g_e mu_B = hbar = 1 everywhere; energies and fields share
// one unit, time is its inverse.
struct NvParams {
  double d = 0.0;  // zero-field splitting (diagonal)
  double e = 0.0;  // strain / electric off-diagonal splitting
};

struct FieldVector {
  double hx = 0.0, hy = 0.0, hz = 0.0;

  static FieldVector spherical(double h, double theta, double phi) {
    return {h * std::sin(theta) * std::cos(phi),
            h * std::sin(theta) * std::sin(phi), h * std::cos(theta)};
  }
  double norm() const { return std::sqrt(hx * hx + hy * hy + hz * hz); }
  double theta() const {
    const double h = norm();
    return h == 0.0 ? 0.0 : std::acos(std::clamp(hz / h, -1.0, 1.0));
  }
  double phi() const { return (hx == 0.0 && hy == 0.0) ? 0.0 : std::atan2(hy, hx); }
};

struct BathParams {
  int n = 0;       // number of bath spins 1/2
  double a = 0.0;  // homogeneous hyperfine coupling
  double p = 0.0;  // average nuclear polarization in [-1, 1]
};

// The full 3x3 NV Hamiltonian
//   D Sz^2 + E (Sx^2 - Sy^2) + h . S
// in the |+1>, |0>, |-1> basis, written entrywise.
ComplexMatrix hamiltonian_cartesian(const NvParams& p, const FieldVector& h);

// Reduced model with E = 0 and |h| = 1: D Sz^2 + unit field at (theta, phi).
// Rejects p.e != 0.
ComplexMatrix hamiltonian_spherical(const NvParams& p, double theta, double phi);

// H_NV kron 1 + a (Sx kron Ix + Sy kron Iy + Sz kron Iz) with collective
// bath spin i0; dimension 3 (2 i0 + 1).
ComplexMatrix hamiltonian_coupled(const NvParams& p, const FieldVector& h,
                                  double a, double i0);

}  // namespace qresponse

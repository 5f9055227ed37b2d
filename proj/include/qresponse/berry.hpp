#pragma once

#include <functional>
#include <vector>

#include "qresponse/eig3.hpp"
#include "qresponse/nv_model.hpp"

namespace qresponse {

// Curvature ops refuse to evaluate when the spectral gap around the chosen
// band is below this (squared-gap denominators).
inline constexpr double kGapGuard = 1e-9;

struct CurvatureCartesian {
  double f_xy = 0.0, f_xz = 0.0, f_yz = 0.0;
  int band = 0;
};

struct CurvatureSpherical {
  double f_phitheta = 0.0;
  int band = 0;
};

// A Hermitian matrix family over a real parameter vector, with analytic
// partial derivatives dH/dp_i.
struct HamiltonianFamily {
  std::function<ComplexMatrix(const std::vector<double>&)> hamiltonian;
  std::vector<std::function<ComplexMatrix(const std::vector<double>&)>> derivatives;
};

// NV Hamiltonian as a family of the field components {hx, hy, hz};
// derivatives are the constant spin matrices.
HamiltonianFamily cartesian_field_family(const NvParams& p);

// Reduced spherical model as a family of {theta, phi}.
HamiltonianFamily spherical_family(double d);

// Closed-form Berry curvature components (f_xy, f_xz, f_yz) for band m.
CurvatureCartesian curvature_cartesian_analytic(const NvParams& p,
                                                const FieldVector& h, int band);

// Closed-form F_phi_theta for the spherical model. Handles theta = pi/2 via
// the analytic limit of the sum formula (the middle band's normalization
// vanishes there).
CurvatureSpherical curvature_spherical_analytic(double d, double theta, int band);

// Single (m, n) pair term of the spherical sum formula. Not valid at
// theta = pi/2 when the middle band is involved.
double curvature_spherical_pair(double d, double theta, int m, int n);

// Ground-band spherical curvature at theta = pi/2: D - (D^2+2)/sqrt(D^2+4).
double spherical_ground_curvature_pi2(double d);

// Sum-over-states curvature F_{mu,lambda} for band m at a parameter point.
double curvature_numeric(const HamiltonianFamily& family,
                         const std::vector<double>& at, int mu, int lambda,
                         int band);

using StateFamily = std::function<StateVector(const std::vector<double>&)>;

// Phase-fixed eigenstate of the family's band as a parameter-space map.
StateFamily eigenstate_family(const HamiltonianFamily& family, int band);

// Central-difference quantum geometric tensor chi_{mu,lambda} with one
// Richardson extrapolation level. Curvature check: F = -2 Im(chi).
Complex geometric_tensor_fd(const StateFamily& states,
                            const std::vector<double>& at, int mu, int lambda,
                            double step = 1e-4);

}  // namespace qresponse

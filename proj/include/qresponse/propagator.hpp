#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qresponse/eig3.hpp"
#include "qresponse/nv_model.hpp"

namespace qresponse {

struct QuenchProtocol {
  std::function<FieldVector(double)> field;  // time -> field vector
  double velocity = 0.0;                     // instantaneous velocity at t_final
  double t_final = 0.0;
  std::string tag;
};

// Rotating quench h = (sin(theta), 0, cos(theta)), theta(t) = v^2 t^2 / (2 pi),
// t_final = pi / v. Velocity vanishes at t = 0 and equals v at t_final, where
// theta = pi/2.
QuenchProtocol rotating_quench(double v);

struct ResponseResult {
  double v = 0.0;
  double observable_value = 0.0;     // <S_y> at t_final
  double retrieved_curvature = 0.0;  // observable_value / v
  double adiabatic_fidelity = 0.0;   // |<ground(t_f)|psi(t_f)>|^2
};

// Integration control for evolve. The default initial step is
// min(0.01/|H|, t_final/1000); the step is then halved until the final state
// moves by less than tol under halving. dt_fixed > 0 requests a single
// fixed-step pass with no convergence loop (used by oracle comparisons that
// must share the exact step sequence).
struct StepControl {
  double tol = 1e-8;
  double dt_init = 0.0;
  double dt_fixed = 0.0;
};

// Schroedinger propagation of psi0 under h_of_t over [0, t_final]. Each step
// applies the midpoint exponential exp(-i H(t_mid) dt); for 3x3 steps the
// exponential is built from the closed-form eigendecomposition.
StateVector evolve(const std::function<ComplexMatrix(double)>& h_of_t,
                   const StateVector& psi0, double t_final,
                   const StepControl& control);

StateVector evolve(const std::function<ComplexMatrix(double)>& h_of_t,
                   const StateVector& psi0, double t_final, double tol = 1e-8);

// Full rotating-quench experiment for the reduced model: prepare the ground
// state at theta = 0, evolve to t_f = pi/v, measure <S_y>, divide by v.
ResponseResult rotating_quench_response(double d, double v, double tol = 1e-8);

std::vector<ResponseResult> response_sweep(double d,
                                           const std::vector<double>& v_list,
                                           double tol = 1e-8, int threads = 1);

// (D^2+2)/sqrt(D^2+4) - D: the value <S_y>/v approaches as v -> 0. Equal to
// minus the ground-band spherical curvature at theta = pi/2; the sign pairing
// is pinned by a dedicated test.
double quench_reference_value(double d);

namespace detail {

// y = H(t) x
using ApplyFn = std::function<void(double, const StateVector&, StateVector&)>;

// Midpoint-exponential integrator over n equal steps. If matrix_fn is
// non-null and the dimension is 3, each step exponential uses eig3_exact;
// otherwise the exponential is applied as a machine-precision scaled Taylor
// series via apply (identical operator to rounding, without the per-step
// dense eigendecomposition).
StateVector integrate_fixed(const ApplyFn& apply,
                            const std::function<ComplexMatrix(double)>* matrix_fn,
                            double hnorm_bound, const StateVector& psi0,
                            double t_final, long nsteps);

// Step-doubling wrapper around integrate_fixed implementing StepControl.
StateVector evolve_core(const ApplyFn& apply,
                        const std::function<ComplexMatrix(double)>* matrix_fn,
                        double hnorm_bound, const StateVector& psi0,
                        double t_final, const StepControl& control);

}  // namespace detail

}  // namespace qresponse

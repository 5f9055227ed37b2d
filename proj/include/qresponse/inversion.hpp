#pragma once

#include <array>
#include <optional>

#include "qresponse/berry.hpp"
#include "qresponse/propagator.hpp"

namespace qresponse {

// Two or three NV ensembles sharing (D, E, hy) and distinguished by static
// z-fields. hx(t) is the common driven field to invert for.
struct EnsembleConfig {
  NvParams d;
  std::vector<double> hz;
  double hy = 0.0;
  bool hy_known = true;
  double hx_min = 0.0;  // root-bracketing range for the recovered hx
  double hx_max = 2.0;
};

struct MotionEstimate {
  double hx_hat = 0.0;
  double vx_hat = 0.0;
  std::optional<double> hy_hat;
  double residual = 0.0;
  int iterations = 0;
};

using TimePath = std::function<double(double)>;

struct RampPath {
  TimePath path;
  double t_final = 0.0;
};

// hx(t) = hx_final (2u^3 - u^4), u = t/t_final: zero initial velocity and
// acceleration, end velocity vx_final, duration 2 hx_final / vx_final.
RampPath smooth_ramp(double hx_final, double vx_final);

// hx(t) = hx_final u^3, duration 3 hx_final / vx_final.
RampPath cubic_ramp(double hx_final, double vx_final);

// Evolve each ensemble from its instantaneous ground state at t = 0 under
// the driven Hamiltonian and return raw <Sz> at t_final.
std::vector<double> forward_observables(const EnsembleConfig& cfg,
                                        const TimePath& hx_path, double t_final,
                                        double tol = 1e-8);

// Ground-state <Sz> of ensemble i at a given hx: the constant part of the
// response, subtracted from raw measurements before forming the inversion
// equations.
double static_observable(const EnsembleConfig& cfg, std::size_t ensemble,
                         double hx);

// Recover (hx, vx) from two offset-corrected measurements r_i = vx F_xz^(1).
// The measurement ratio eliminates vx; hx comes from a bracketed 1-D root
// find followed by a least-squares vx.
MotionEstimate solve_motion(const std::vector<double>& measured,
                            const EnsembleConfig& cfg,
                            std::optional<std::pair<double, double>> guess = {});

// Recover (hx, hy, vx) from three ensembles. Requires E != 0: at E = 0 the
// spectrum depends on the transverse field only through hx^2 + hy^2 and
// F_xz carries a bare hy prefactor, so the data determine only
// (vx hy, hx^2 + hy^2).
MotionEstimate solve_vector(const std::vector<double>& measured,
                            const EnsembleConfig& cfg,
                            std::optional<std::array<double, 3>> guess = {});

// dF/dD of the spherical ground-band curvature, central difference with one
// Richardson level.
double susceptibility(double d, double theta, double step = 1e-5);

// Same derivative restricted to the (ground, top)-band pair term of the sum
// formula.
double susceptibility_pair13(double d, double theta, double step = 1e-5);

// delta_lambda >= 1 / (t (E_max - E_min)) evaluated on dH/dlambda.
double sensitivity_bound(const ComplexMatrix& dh_dlambda, double t);

}  // namespace qresponse

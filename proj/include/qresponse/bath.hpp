#pragma once

#include <vector>

#include "qresponse/nv_model.hpp"
#include "qresponse/propagator.hpp"

namespace qresponse {

// One conserved collective-spin block of the thermal nuclear ensemble.
struct BathSector {
  double i0 = 0.0;
  double m0 = 0.0;
  double weight = 0.0;
};

// All (I0, M0) sectors with their thermal weights
//   w(I0, M0) = C(N, N/2-I0) ((1+P)/2)^(N/2-M0) ((1-P)/2)^(N/2+M0)
//               (2 I0 + 1)/(N/2 + I0 + 1),
// I0 running from 1/2 (N odd) or 0 (N even) up to N/2. Weights sum to 1.
std::vector<BathSector> bath_sectors(int n, double p);

struct SectorContribution {
  double i0 = 0.0;
  double m0 = 0.0;
  double weight = 0.0;
  double s_y = 0.0;      // <Sy x 1> of the evolved sector state
  double norm_sq = 0.0;  // |psi(t_f)|^2, trace-preservation audit
};

struct MixedResponseResult {
  int n = 0;
  double a = 0.0;
  double p = 0.0;
  double v = 0.0;
  double observable_value = 0.0;     // Tr[rho(t_f) Sy]
  double retrieved_curvature = 0.0;  // observable_value / v
  double skipped_weight = 0.0;       // total mass of sectors skipped by cutoff
  std::vector<SectorContribution> sectors;
};

// Rotating-quench response of the NV spin coupled to the thermal bath:
// evolve |ground> x |I0, M0> per sector under the coupled Hamiltonian,
// accumulate weight * <Sy x 1>, divide by v.
MixedResponseResult mixed_response(const BathParams& bp, double d, double v,
                                   const StepControl& control, int threads = 1);
MixedResponseResult mixed_response(const BathParams& bp, double d, double v,
                                   double tol = 1e-8, int threads = 1);

std::vector<MixedResponseResult> decoherence_sweep(
    const BathParams& bp, double d, const std::vector<double>& v_list,
    double tol = 1e-8, int threads = 1);

// Sweep sharing the sector evolutions across several polarizations: the
// dynamics of a sector do not depend on P, only the thermal weights do.
// Returned as out[p_index][v_index]. control.tol is overridden by tol.
std::vector<std::vector<MixedResponseResult>> decoherence_sweep_multi(
    int n, double a, const std::vector<double>& p_list, double d,
    const std::vector<double>& v_list, double tol = 1e-8, int threads = 1,
    const StepControl& control = {});

}  // namespace qresponse

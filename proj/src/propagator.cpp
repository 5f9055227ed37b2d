#include "qresponse/propagator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qresponse/detail/parallel.hpp"

namespace qresponse {

namespace detail {

namespace {

// exp(-i H(t_mid) dt) psi as a truncated Taylor series, summed to machine
// precision; |H| dt is kept below 1/2 by sub-splitting the step.
void taylor_exp_apply(const ApplyFn& apply, double t_mid, double dt,
                      double hnorm_bound, StateVector& psi) {
  const int splits = std::max(1, static_cast<int>(std::ceil(hnorm_bound * std::abs(dt) / 0.5)));
  const double h = dt / splits;
  StateVector term(psi.size()), scratch(psi.size());
  for (int s = 0; s < splits; ++s) {
    term = psi;
    int small_terms = 0;
    for (int k = 1; k <= 100; ++k) {
      apply(t_mid, term, scratch);
      term = (Complex(0.0, -h) / static_cast<double>(k)) * scratch;
      psi += term;
      if (term.norm() <= 3e-14 * psi.norm()) {
        if (++small_terms == 2) break;
      } else {
        small_terms = 0;
      }
      if (k == 100) throw NumericError("taylor_exp_apply: series did not converge");
    }
  }
}

}  // namespace

StateVector integrate_fixed(const ApplyFn& apply,
                            const std::function<ComplexMatrix(double)>* matrix_fn,
                            double hnorm_bound, const StateVector& psi0,
                            double t_final, long nsteps) {
  const double dt = t_final / static_cast<double>(nsteps);
  StateVector psi = psi0;
  const bool use_eig = matrix_fn != nullptr && psi.size() == 3;
  for (long i = 0; i < nsteps; ++i) {
    const double t_mid = (static_cast<double>(i) + 0.5) * dt;
    if (use_eig) {
      const EigenSystem sys = eig3_exact((*matrix_fn)(t_mid));
      const StateVector coeff = sys.vectors.adjoint() * psi;
      StateVector rotated(3);
      for (int j = 0; j < 3; ++j) {
        rotated(j) = std::exp(Complex(0.0, -sys.values(j) * dt)) * coeff(j);
      }
      psi = sys.vectors * rotated;
    } else {
      taylor_exp_apply(apply, t_mid, dt, hnorm_bound, psi);
    }
  }
  return psi;
}

StateVector evolve_core(const ApplyFn& apply,
                        const std::function<ComplexMatrix(double)>* matrix_fn,
                        double hnorm_bound, const StateVector& psi0,
                        double t_final, const StepControl& control) {
  if (!(t_final > 0.0)) throw std::invalid_argument("evolve: t_final must be positive");
  if (control.dt_fixed > 0.0) {
    const long n = std::max<long>(1, static_cast<long>(std::ceil(t_final / control.dt_fixed)));
    return integrate_fixed(apply, matrix_fn, hnorm_bound, psi0, t_final, n);
  }

  const double dt0 = control.dt_init > 0.0
                         ? control.dt_init
                         : std::min(0.01 / std::max(hnorm_bound, 1e-12), t_final / 1000.0);
  long n = std::max<long>(1, static_cast<long>(std::ceil(t_final / dt0)));
  StateVector prev = integrate_fixed(apply, matrix_fn, hnorm_bound, psi0, t_final, n);
  for (;;) {
    if (n > 200'000'000L) {
      throw NumericError("evolve: step underflow before tolerance met");
    }
    n *= 2;
    StateVector cur = integrate_fixed(apply, matrix_fn, hnorm_bound, psi0, t_final, n);
    if ((cur - prev).norm() < control.tol) return cur;
    prev = std::move(cur);
  }
}

}  // namespace detail

namespace {

double infinity_norm(const ComplexMatrix& h) {
  return h.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

StateVector evolve(const std::function<ComplexMatrix(double)>& h_of_t,
                   const StateVector& psi0, double t_final,
                   const StepControl& control) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("evolve: psi0 is not normalized");
  }
  const ComplexMatrix h0 = h_of_t(0.0);
  require_hermitian(h0, 1e-10);
  const double hnorm = std::max(infinity_norm(h0), infinity_norm(h_of_t(t_final)));

  detail::ApplyFn apply = [&h_of_t](double t, const StateVector& x, StateVector& y) {
    y.noalias() = h_of_t(t) * x;
  };
  return detail::evolve_core(apply, &h_of_t, hnorm, psi0, t_final, control);
}

StateVector evolve(const std::function<ComplexMatrix(double)>& h_of_t,
                   const StateVector& psi0, double t_final, double tol) {
  StepControl control;
  control.tol = tol;
  return evolve(h_of_t, psi0, t_final, control);
}

QuenchProtocol rotating_quench(double v) {
  if (!(v > 0.0)) throw std::invalid_argument("rotating_quench: v must be positive");
  QuenchProtocol proto;
  proto.velocity = v;
  proto.t_final = std::numbers::pi / v;
  proto.tag = "rotating";
  proto.field = [v](double t) {
    const double theta = v * v * t * t / (2.0 * std::numbers::pi);
    return FieldVector::spherical(1.0, theta, 0.0);
  };
  return proto;
}

double quench_reference_value(double d) {
  return (d * d + 2.0) / std::sqrt(d * d + 4.0) - d;
}

ResponseResult rotating_quench_response(double d, double v, double tol) {
  const QuenchProtocol proto = rotating_quench(v);
  const NvParams params{d, 0.0};

  // theta = 0 spectrum is (D+1, 0, D-1); D = 1 crosses there.
  const EigenSystem at_start = eig3_exact(hamiltonian_spherical(params, 0.0, 0.0));
  const double start_gap =
      std::min(at_start.values(1) - at_start.values(0),
               at_start.values(2) - at_start.values(1));
  if (start_gap < 1e-6) {
    std::ostringstream msg;
    msg << "rotating_quench_response: degeneracy on path at theta = 0, gap = "
        << start_gap;
    throw DegeneratePointError(msg.str(), start_gap);
  }

  auto h_of_t = [&params, &proto](double t) {
    return hamiltonian_cartesian(params, proto.field(t));
  };
  const StateVector psi0 = at_start.vectors.col(0);

  StepControl control;
  control.tol = tol;
  const StateVector psi_f = evolve(h_of_t, psi0, proto.t_final, control);

  const SpinOperators s = spin_operators(1.0);
  ResponseResult result;
  result.v = v;
  result.observable_value = expectation(psi_f, s.sy);
  result.retrieved_curvature = result.observable_value / v;
  const EigenSystem at_end = eig3_exact(h_of_t(proto.t_final));
  result.adiabatic_fidelity = std::norm(at_end.vectors.col(0).dot(psi_f));
  return result;
}

std::vector<ResponseResult> response_sweep(double d,
                                           const std::vector<double>& v_list,
                                           double tol, int threads) {
  std::vector<ResponseResult> results(v_list.size());
  detail::parallel_for(static_cast<int>(v_list.size()), threads, [&](int i) {
    results[i] = rotating_quench_response(d, v_list[i], tol);
  });
  return results;
}

}  // namespace qresponse

#include "qresponse/inversion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qresponse {

namespace {

constexpr double kIdentifiabilityFloor = 1e-10;
constexpr int kScanPoints = 64;

double f_xz_ground(const EnsembleConfig& cfg, double hx, double hy, double hz) {
  return curvature_cartesian_analytic(cfg.d, {hx, hy, hz}, 0).f_xz;
}

// Brent-style bracketed root refinement (bisection/secant hybrid).
double refine_root(const std::function<double(double)>& f, double a, double b,
                   double fa, double fb, int& iterations) {
  double c = a, fc = fa;
  for (int it = 0; it < 200; ++it) {
    ++iterations;
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 1e-15;
    const double mid = (c - b) / 2.0;
    if (std::abs(mid) <= tol || fb == 0.0) return b;
    double step;
    if (std::abs(fa) > std::abs(fb) && fa != fb) {
      step = -fb * (b - a) / (fb - fa);  // secant
      if (!(std::abs(step) < std::abs(mid)) || !std::isfinite(step)) step = mid;
    } else {
      step = mid;
    }
    a = b; fa = fb;
    b += step;
    fb = f(b);
    if ((fb < 0.0) != (fc < 0.0)) continue;
    c = a; fc = fa;
  }
  return b;
}

struct ResidualSystem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  int size = 0;
};

Eigen::MatrixXd numeric_jacobian(const ResidualSystem& sys, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd jac(sys.size, n);
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
    Eigen::VectorXd up = x, dn = x;
    up(j) += h;
    dn(j) -= h;
    jac.col(j) = (sys.eval(up) - sys.eval(dn)) / (2.0 * h);
  }
  return jac;
}

// Newton / least-squares solve with adaptive Levenberg damping: accepted
// steps shrink the damping toward a plain Newton step, rejected ones grow
// it. Converges at step norm < 1e-12 or residual < 1e-10 within 100
// iterations.
Eigen::VectorXd damped_newton(const ResidualSystem& sys, Eigen::VectorXd x,
                              int& iterations, double& residual) {
  double damping = 1e-3;
  // The parameter gradient scales with vx, so meeting the exact-recovery
  // contract on the parameters needs a residual floor well below it.
  const double residual_floor = 1e-14 * std::max(1.0, sys.eval(x).norm());
  for (int it = 0; it < 100; ++it) {
    iterations = it + 1;
    const Eigen::VectorXd f = sys.eval(x);
    residual = f.norm();
    if (residual < residual_floor) return x;
    const Eigen::MatrixXd jac = numeric_jacobian(sys, x);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * f;
    const Eigen::VectorXd diag =
        jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.trace()));

    bool accepted = false;
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += damping * diag;
      step = lhs.ldlt().solve(grad);
      if (step.allFinite()) {
        const Eigen::VectorXd trial = x - step;
        if (sys.eval(trial).norm() < residual) {
          x = trial;
          damping = std::max(damping / 3.0, 1e-14);
          accepted = true;
          break;
        }
      }
      damping *= 10.0;
      if (damping > 1e14) {
        throw NumericError("damped_newton: singular Jacobian");
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "damped_newton: stalled at residual " << residual;
      throw NumericError(msg.str());
    }
    if (step.norm() < 1e-12) {
      residual = sys.eval(x).norm();
      return x;
    }
  }
  std::ostringstream msg;
  msg << "damped_newton: residual " << residual << " above tolerance after 100 iterations";
  throw NumericError(msg.str());
}

}  // namespace

RampPath smooth_ramp(double hx_final, double vx_final) {
  if (!(vx_final > 0.0)) throw std::invalid_argument("smooth_ramp: vx must be positive");
  RampPath ramp;
  ramp.t_final = 2.0 * hx_final / vx_final;
  const double tf = ramp.t_final;
  ramp.path = [hx_final, tf](double t) {
    const double u = t / tf;
    return hx_final * u * u * (2.0 - u) * u;  // 2u^3 - u^4
  };
  return ramp;
}

RampPath cubic_ramp(double hx_final, double vx_final) {
  if (!(vx_final > 0.0)) throw std::invalid_argument("cubic_ramp: vx must be positive");
  RampPath ramp;
  ramp.t_final = 3.0 * hx_final / vx_final;
  const double tf = ramp.t_final;
  ramp.path = [hx_final, tf](double t) {
    const double u = t / tf;
    return hx_final * u * u * u;
  };
  return ramp;
}

std::vector<double> forward_observables(const EnsembleConfig& cfg,
                                        const TimePath& hx_path, double t_final,
                                        double tol) {
  const SpinOperators s = spin_operators(1.0);
  std::vector<double> out;
  out.reserve(cfg.hz.size());
  for (double hz : cfg.hz) {
    auto h_of_t = [&cfg, &hx_path, hz](double t) {
      return hamiltonian_cartesian(cfg.d, {hx_path(t), cfg.hy, hz});
    };
    const EigenSystem start = eig3_exact(h_of_t(0.0));
    const double gap0 = start.values(1) - start.values(0);
    const EigenSystem end = eig3_exact(h_of_t(t_final));
    const double gap_f = end.values(1) - end.values(0);
    const double gap = std::min(gap0, gap_f);
    if (gap <= kGapGuard) {
      throw DegeneratePointError("forward_observables: degeneracy on path", gap);
    }
    const StateVector psi_f = evolve(h_of_t, start.vectors.col(0), t_final, tol);
    out.push_back(expectation(psi_f, s.sz));
  }
  return out;
}

double static_observable(const EnsembleConfig& cfg, std::size_t ensemble,
                         double hx) {
  const SpinOperators s = spin_operators(1.0);
  const EigenSystem sys = eig3_exact(
      hamiltonian_cartesian(cfg.d, {hx, cfg.hy, cfg.hz.at(ensemble)}));
  return expectation(sys.vectors.col(0), s.sz);
}

MotionEstimate solve_motion(const std::vector<double>& measured,
                            const EnsembleConfig& cfg,
                            std::optional<std::pair<double, double>> guess) {
  if (measured.size() != 2 || cfg.hz.size() < 2) {
    throw std::invalid_argument("solve_motion: two measurements and two ensembles required");
  }
  if (std::abs(cfg.hy) < kIdentifiabilityFloor) {
    throw UnidentifiableError(
        "solve_motion: hy = 0 makes F_xz vanish identically; hx is unobservable");
  }

  // r1 F_xz(hx; hz2) - r2 F_xz(hx; hz1) = 0 has the same roots as the
  // measurement-ratio equation but stays finite where one F crosses zero.
  auto g = [&](double hx) -> double {
    return measured[0] * f_xz_ground(cfg, hx, cfg.hy, cfg.hz[1]) -
           measured[1] * f_xz_ground(cfg, hx, cfg.hy, cfg.hz[0]);
  };

  int iterations = 0;
  std::vector<double> roots;
  double prev_x = cfg.hx_min;
  double prev_g = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i <= kScanPoints; ++i) {
    const double x = cfg.hx_min + (cfg.hx_max - cfg.hx_min) * i / kScanPoints;
    double gx;
    try {
      gx = g(x);
    } catch (const DegeneratePointError&) {
      prev_g = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (std::isfinite(prev_g) && (gx < 0.0) != (prev_g < 0.0)) {
      roots.push_back(refine_root(g, prev_x, x, prev_g, gx, iterations));
    } else if (gx == 0.0) {
      roots.push_back(x);
    }
    prev_x = x;
    prev_g = gx;
  }

  MotionEstimate est;
  if (roots.empty()) {
    if (!guess) {
      throw NumericError("solve_motion: no root of the ratio equation in the bracket");
    }
    ResidualSystem sys;
    sys.size = 2;
    sys.eval = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd f(2);
      for (int i = 0; i < 2; ++i) {
        f(i) = x(1) * f_xz_ground(cfg, x(0), cfg.hy, cfg.hz[i]) - measured[i];
      }
      return f;
    };
    Eigen::VectorXd x0(2);
    x0 << guess->first, guess->second;
    const Eigen::VectorXd sol = damped_newton(sys, x0, est.iterations, est.residual);
    est.hx_hat = sol(0);
    est.vx_hat = sol(1);
    return est;
  }

  double best = roots.front();
  if (guess) {
    for (double r : roots) {
      if (std::abs(r - guess->first) < std::abs(best - guess->first)) best = r;
    }
  }
  est.hx_hat = best;
  est.iterations = iterations;

  const double f1 = f_xz_ground(cfg, best, cfg.hy, cfg.hz[0]);
  const double f2 = f_xz_ground(cfg, best, cfg.hy, cfg.hz[1]);
  if (std::abs(f1) < kIdentifiabilityFloor || std::abs(f2) < kIdentifiabilityFloor) {
    throw UnidentifiableError("solve_motion: |F_xz| below identifiability floor");
  }
  est.vx_hat = (measured[0] * f1 + measured[1] * f2) / (f1 * f1 + f2 * f2);
  const double r1 = est.vx_hat * f1 - measured[0];
  const double r2 = est.vx_hat * f2 - measured[1];
  est.residual = std::sqrt(r1 * r1 + r2 * r2);
  const double scale = std::max({1.0, std::abs(measured[0]), std::abs(measured[1])});
  if (est.residual > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "solve_motion: residual " << est.residual << " above tolerance";
    throw NumericError(msg.str());
  }
  return est;
}

MotionEstimate solve_vector(const std::vector<double>& measured,
                            const EnsembleConfig& cfg,
                            std::optional<std::array<double, 3>> guess) {
  if (measured.size() != 3 || cfg.hz.size() < 3) {
    throw std::invalid_argument("solve_vector: three measurements and three ensembles required");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(cfg.hz[i] - cfg.hz[j]) < 1e-9) {
        throw NumericError("solve_vector: singular system, duplicate hz values");
      }
    }
  }
  if (cfg.d.e == 0.0) {
    throw UnidentifiableError(
        "solve_vector: E = 0 leaves only (vx hy, hx^2 + hy^2) observable");
  }

  ResidualSystem sys;
  sys.size = 3;
  sys.eval = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(3);
    for (int i = 0; i < 3; ++i) {
      f(i) = x(2) * f_xz_ground(cfg, x(0), x(1), cfg.hz[i]) - measured[i];
    }
    return f;
  };

  Eigen::VectorXd x0(3);
  if (guess) {
    x0 << (*guess)[0], (*guess)[1], (*guess)[2];
  } else {
    // coarse grid start: least-squares vx per (hx, hy) node. Nodes are
    // offset from hx = 0, where F_xz is stationary (it is even in hx).
    double best_res = std::numeric_limits<double>::infinity();
    for (int ix = 0; ix <= 8; ++ix) {
      const double hx =
          cfg.hx_min + (cfg.hx_max - cfg.hx_min) * (ix + 0.5) / 9.0;
      for (int iy = 1; iy <= 8; ++iy) {
        for (double sign : {1.0, -1.0}) {
          const double hy = sign * iy / 8.0;
          double num = 0.0, den = 0.0;
          std::array<double, 3> f{};
          bool ok = true;
          for (int i = 0; i < 3; ++i) {
            try {
              f[i] = f_xz_ground(cfg, hx, hy, cfg.hz[i]);
            } catch (const DegeneratePointError&) {
              ok = false;
              break;
            }
            num += f[i] * measured[i];
            den += f[i] * f[i];
          }
          if (!ok || den < 1e-30) continue;
          const double vx = num / den;
          double res = 0.0;
          for (int i = 0; i < 3; ++i) res += std::pow(vx * f[i] - measured[i], 2);
          if (res < best_res) {
            best_res = res;
            x0 << hx, hy, vx;
          }
        }
      }
    }
    if (!std::isfinite(best_res)) {
      throw NumericError("solve_vector: no usable starting point in the scan range");
    }
  }

  MotionEstimate est;
  const Eigen::VectorXd sol = damped_newton(sys, x0, est.iterations, est.residual);
  est.hx_hat = sol(0);
  est.hy_hat = sol(1);
  est.vx_hat = sol(2);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(f_xz_ground(cfg, est.hx_hat, *est.hy_hat, cfg.hz[i])) <
        kIdentifiabilityFloor) {
      throw UnidentifiableError("solve_vector: |F_xz| below identifiability floor");
    }
  }
  return est;
}

double susceptibility(double d, double theta, double step) {
  auto f = [theta](double dd) {
    return curvature_spherical_analytic(dd, theta, 0).f_phitheta;
  };
  const double coarse = (f(d + step) - f(d - step)) / (2.0 * step);
  const double fine = (f(d + step / 2.0) - f(d - step / 2.0)) / step;
  return (4.0 * fine - coarse) / 3.0;
}

double susceptibility_pair13(double d, double theta, double step) {
  auto f = [theta](double dd) { return curvature_spherical_pair(dd, theta, 0, 2); };
  const double coarse = (f(d + step) - f(d - step)) / (2.0 * step);
  const double fine = (f(d + step / 2.0) - f(d - step / 2.0)) / step;
  return (4.0 * fine - coarse) / 3.0;
}

double sensitivity_bound(const ComplexMatrix& dh_dlambda, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("sensitivity_bound: t must be positive");
  const EigenSystem sys = dh_dlambda.rows() == 3 ? eig3_exact(dh_dlambda)
                                                 : eig_iterative(dh_dlambda);
  const double range = sys.values(sys.values.size() - 1) - sys.values(0);
  if (range < 1e-14 * std::max(1.0, dh_dlambda.norm())) {
    throw NumericError(
        "sensitivity_bound: zero spectral range, parameter leaves the spectrum unchanged");
  }
  return 1.0 / (t * range);
}

}  // namespace qresponse

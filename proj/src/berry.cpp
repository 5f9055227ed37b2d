#include "qresponse/berry.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qresponse {

namespace {

void check_gap(const RealVector& values, int band, const char* where) {
  if (band < 0 || band >= values.size()) {
    throw std::invalid_argument(std::string(where) + ": band out of range");
  }
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < values.size(); ++n) {
    if (n != band) gap = std::min(gap, std::abs(values(n) - values(band)));
  }
  if (gap <= kGapGuard) {
    std::ostringstream msg;
    msg << where << ": band " << band << " degenerate, gap = " << gap;
    throw DegeneratePointError(msg.str(), gap);
  }
}

// Spherical-model eigenvalues in ascending order, from the trigonometric
// closed form specialized to E = 0, |h| = 1.
std::array<double, 3> spherical_energies(double d, double theta) {
  const double delta = std::sqrt(d * d + 3.0);
  const double c = std::cos(theta);
  double x = d * (-9.0 - 2.0 * d * d + 27.0 * c * c) / (2.0 * delta * delta * delta);
  x = std::clamp(x, -1.0, 1.0);
  const double vphi = std::acos(x);
  return {2.0 / 3.0 * (d - delta * std::cos((vphi - std::numbers::pi) / 3.0)),
          2.0 / 3.0 * (d - delta * std::cos((vphi + std::numbers::pi) / 3.0)),
          2.0 / 3.0 * (d + delta * std::cos(vphi / 3.0))};
}

// Normalization of the spherical eigenstate, rewritten without the
// cos(2 theta) cancellation: 2 Dm^4 + 2 Dm^2 + 2 cos^2(theta) (1 - 3 Dm^2).
double spherical_norm(double dm, double cos_theta) {
  const double c2 = cos_theta * cos_theta;
  return 2.0 * dm * dm * dm * dm + 2.0 * dm * dm + 2.0 * c2 * (1.0 - 3.0 * dm * dm);
}

int middle_band_index(const std::array<double, 3>& dm) {
  // band with D_m -> 0 at theta = pi/2 (E_m -> D)
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(dm[i]) < std::abs(dm[best])) best = i;
  return best;
}

}  // namespace

HamiltonianFamily cartesian_field_family(const NvParams& p) {
  const SpinOperators s = spin_operators(1.0);
  HamiltonianFamily fam;
  fam.hamiltonian = [p](const std::vector<double>& x) {
    return hamiltonian_cartesian(p, {x.at(0), x.at(1), x.at(2)});
  };
  fam.derivatives = {
      [sx = s.sx](const std::vector<double>&) { return sx; },
      [sy = s.sy](const std::vector<double>&) { return sy; },
      [sz = s.sz](const std::vector<double>&) { return sz; },
  };
  return fam;
}

HamiltonianFamily spherical_family(double d) {
  const SpinOperators s = spin_operators(1.0);
  HamiltonianFamily fam;
  fam.hamiltonian = [d](const std::vector<double>& x) {
    return hamiltonian_spherical({d, 0.0}, x.at(0), x.at(1));
  };
  // dH/dtheta and dH/dphi of the rotating unit field
  fam.derivatives = {
      [s](const std::vector<double>& x) -> ComplexMatrix {
        const double th = x.at(0), ph = x.at(1);
        return std::cos(th) * std::cos(ph) * s.sx +
               std::cos(th) * std::sin(ph) * s.sy - std::sin(th) * s.sz;
      },
      [s](const std::vector<double>& x) -> ComplexMatrix {
        const double th = x.at(0), ph = x.at(1);
        return -std::sin(th) * std::sin(ph) * s.sx +
               std::sin(th) * std::cos(ph) * s.sy;
      },
  };
  return fam;
}

CurvatureCartesian curvature_cartesian_analytic(const NvParams& p,
                                                const FieldVector& h, int band) {
  const EigenSystem sys = eig3_exact(hamiltonian_cartesian(p, h));
  check_gap(sys.values, band, "curvature_cartesian_analytic");

  const double hx2 = h.hx * h.hx, hy2 = h.hy * h.hy, hz2 = h.hz * h.hz;
  const double h2 = hx2 + hy2 + hz2;
  const double e = p.e;

  std::array<double, 3> dm, norm, dp, dn;
  for (int i = 0; i < 3; ++i) {
    dm[i] = p.d - sys.values(i);
    norm[i] = dm[i] * dm[i] * dm[i] * dm[i] +
              (h2 - 2.0 * e * e - 3.0 * hz2) * dm[i] * dm[i] +
              2.0 * e * (hy2 - hx2) * dm[i] + (e * e + hz2) * (e * e + h2);
    dp[i] = dm[i] + e;
    dn[i] = dm[i] - e;
  }

  CurvatureCartesian out;
  out.band = band;
  const int m = band;

  // Exact zeros of the closed form: every f_xy term carries an hz factor,
  // f_xz an hy factor (and at E = hz = 0 its bracket vanishes), f_yz an hx
  // factor. Short-circuiting them also avoids the removable 0/0 where the
  // eigenvector normalization degenerates (E_m = D is exact at hz = 0).
  const bool xy_zero = h.hz == 0.0;
  const bool xz_zero = h.hy == 0.0 || (e == 0.0 && h.hz == 0.0);
  const bool yz_zero = h.hx == 0.0 || (e == 0.0 && h.hz == 0.0);

  const double scale = std::max(1.0, hamiltonian_cartesian(p, h).norm());
  const double norm_floor = 1e-10 * scale * scale * scale * scale;
  for (int n = 0; n < 3; ++n) {
    if (n == m) continue;
    if (std::min(std::abs(norm[m]), std::abs(norm[n])) < norm_floor &&
        !(xy_zero && xz_zero && yz_zero)) {
      throw NumericError(
          "curvature_cartesian_analytic: eigenvector normalization degenerates "
          "at this point");
    }
    const double den = norm[m] * norm[n] * (dm[m] - dm[n]);
    if (!xy_zero) {
      out.f_xy += -2.0 * h.hz * (dm[m] + dm[n]) *
                  ((dp[m] + dp[n]) * (dn[m] * dn[n] * hx2 - hy2 * hz2) +
                   (dn[m] + dn[n]) * (dp[m] * dp[n] * hy2 - hx2 * hz2)) /
                  den;
    }
    if (!xz_zero) {
      out.f_xz += 2.0 * h.hy * (dp[m] + dp[n]) *
                  (2.0 * e * (dn[m] * dn[n] + hz2) * hx2 -
                   (dm[m] + dm[n]) * (h2 - hz2) * hz2) /
                  den;
    }
    if (!yz_zero) {
      out.f_yz += 2.0 * h.hx * (dn[m] + dn[n]) *
                  (2.0 * e * (dp[m] * dp[n] + hz2) * hy2 +
                   (dm[m] + dm[n]) * (h2 - hz2) * hz2) /
                  den;
    }
  }
  return out;
}

double curvature_spherical_pair(double d, double theta, int m, int n) {
  const auto ev = spherical_energies(d, theta);
  const std::array<double, 3> dm = {d - ev[0], d - ev[1], d - ev[2]};
  const double c = std::cos(theta), s = std::sin(theta);
  const double nm = spherical_norm(dm[m], c);
  const double nn = spherical_norm(dm[n], c);
  return 8.0 * s * s * s * c * c * (dm[n] + dm[m]) * (dm[n] + dm[m]) *
         (1.0 - dm[n] * dm[m]) / (nm * nn * (dm[n] - dm[m]));
}

double spherical_ground_curvature_pi2(double d) {
  return d - (d * d + 2.0) / std::sqrt(d * d + 4.0);
}

CurvatureSpherical curvature_spherical_analytic(double d, double theta, int band) {
  const auto ev = spherical_energies(d, theta);
  RealVector values(3);
  values << ev[0], ev[1], ev[2];
  check_gap(values, band, "curvature_spherical_analytic");

  CurvatureSpherical out;
  out.band = band;

  // sin^3(theta) prefactor: the poles are exact zeros (the normalization of
  // one band also vanishes there, so the sum must not be evaluated).
  if (std::abs(std::sin(theta)) < 1e-12) return out;

  const std::array<double, 3> dm = {d - ev[0], d - ev[1], d - ev[2]};
  const double c = std::cos(theta);

  if (std::abs(c) < 1e-7) {
    // theta = pi/2 limit: the middle band's normalization ~ 2 cos^2(theta),
    // and cos^2/N_mid -> 1/2; all other pair terms carry the cos^2 zero.
    const int mid = middle_band_index(dm);
    if (band != mid) {
      out.f_phitheta = -2.0 / (dm[band] * (dm[band] * dm[band] + 1.0));
    } else {
      for (int n = 0; n < 3; ++n) {
        if (n == mid) continue;
        out.f_phitheta += 2.0 / (dm[n] * (dm[n] * dm[n] + 1.0));
      }
    }
    return out;
  }

  for (int n = 0; n < 3; ++n) {
    if (n == band) continue;
    out.f_phitheta += curvature_spherical_pair(d, theta, band, n);
  }
  return out;
}

double curvature_numeric(const HamiltonianFamily& family,
                         const std::vector<double>& at, int mu, int lambda,
                         int band) {
  if (mu < 0 || lambda < 0 ||
      mu >= static_cast<int>(family.derivatives.size()) ||
      lambda >= static_cast<int>(family.derivatives.size())) {
    throw std::invalid_argument("curvature_numeric: missing derivative");
  }
  if (mu == lambda) return 0.0;

  const ComplexMatrix h = family.hamiltonian(at);
  const EigenSystem sys = (h.rows() == 3) ? eig3_exact(h) : eig_iterative(h);
  check_gap(sys.values, band, "curvature_numeric");

  const ComplexMatrix dmu = family.derivatives[mu](at);
  const ComplexMatrix dlam = family.derivatives[lambda](at);
  const StateVector vm = sys.vectors.col(band);
  const StateVector dmu_m = dmu * vm;
  const StateVector dlam_m = dlam * vm;

  double f = 0.0;
  for (Eigen::Index n = 0; n < sys.values.size(); ++n) {
    if (n == band) continue;
    const StateVector vn = sys.vectors.col(n);
    const Complex amn = vn.dot(dmu_m);  // <n|dH_mu|m>
    const Complex bnm = vn.dot(dlam_m); // <n|dH_lambda|m>
    const double gap = sys.values(n) - sys.values(band);
    // i (<m|dmu|n><n|dlam|m> - mu<->lam) = -2 Im[<m|dmu|n><n|dlam|m>]
    f += -2.0 * std::imag(std::conj(amn) * bnm) / (gap * gap);
  }
  return f;
}

StateFamily eigenstate_family(const HamiltonianFamily& family, int band) {
  return [family, band](const std::vector<double>& at) -> StateVector {
    const ComplexMatrix h = family.hamiltonian(at);
    const EigenSystem sys = (h.rows() == 3) ? eig3_exact(h) : eig_iterative(h);
    check_gap(sys.values, band, "eigenstate_family");
    return sys.vectors.col(band);
  };
}

namespace {

// Single central-difference evaluation of the geometric tensor.
Complex chi_once(const StateFamily& states, const std::vector<double>& at,
                 int mu, int lambda, double step) {
  const StateVector center = states(at);

  auto derivative = [&](int index) -> StateVector {
    std::vector<double> up = at, dn = at;
    up[index] += step;
    dn[index] -= step;
    StateVector vu = states(up), vd = states(dn);
    const Complex ou = center.dot(vu), od = center.dot(vd);
    if (std::abs(ou) < 0.99 || std::abs(od) < 0.99) {
      throw NumericError(
          "geometric_tensor_fd: gauge discontinuity (neighbor overlap < 0.99)");
    }
    // align neighbor phases to the center state
    vu *= std::conj(ou) / std::abs(ou);
    vd *= std::conj(od) / std::abs(od);
    return (vu - vd) / (2.0 * step);
  };

  const StateVector dmu = derivative(mu);
  const StateVector dlam = derivative(lambda);
  return dmu.dot(dlam) - dmu.dot(center) * center.dot(dlam);
}

}  // namespace

Complex geometric_tensor_fd(const StateFamily& states,
                            const std::vector<double>& at, int mu, int lambda,
                            double step) {
  if (!(step > 1e-12)) {
    throw NumericError("geometric_tensor_fd: step underflow");
  }
  const Complex coarse = chi_once(states, at, mu, lambda, step);
  const Complex fine = chi_once(states, at, mu, lambda, step / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace qresponse

#include "qresponse/nv_model.hpp"

#include <cmath>

namespace qresponse {

ComplexMatrix hamiltonian_cartesian(const NvParams& p, const FieldVector& h) {
  const double s2 = 1.0 / std::sqrt(2.0);
  const Complex hperp(h.hx * s2, -h.hy * s2);  // (hx - i hy)/sqrt(2)
  ComplexMatrix out(3, 3);
  out << Complex(p.d + h.hz), hperp, Complex(p.e),
      std::conj(hperp), Complex(0.0), hperp,
      Complex(p.e), std::conj(hperp), Complex(p.d - h.hz);
  return out;
}

ComplexMatrix hamiltonian_spherical(const NvParams& p, double theta, double phi) {
  if (p.e != 0.0) {
    throw std::invalid_argument(
        "hamiltonian_spherical: reduced model requires E = 0");
  }
  return hamiltonian_cartesian(p, FieldVector::spherical(1.0, theta, phi));
}

ComplexMatrix hamiltonian_coupled(const NvParams& p, const FieldVector& h,
                                  double a, double i0) {
  const SpinOperators bath = spin_operators(i0);
  const SpinOperators nv = spin_operators(1.0);
  const int bd = bath.dim();
  ComplexMatrix out = kron(hamiltonian_cartesian(p, h), identity(bd));
  if (a != 0.0) {
    out += a * (kron(nv.sx, bath.sx) + kron(nv.sy, bath.sy) + kron(nv.sz, bath.sz));
  }
  return out;
}

}  // namespace qresponse

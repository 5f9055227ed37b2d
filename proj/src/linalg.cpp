#include "qresponse/linalg.hpp"

#include <cmath>
#include <sstream>

namespace qresponse {

SpinOperators spin_operators(double s) {
  const double two_s = 2.0 * s;
  if (s < 0 || std::abs(two_s - std::round(two_s)) > 1e-9) {
    throw std::invalid_argument("spin_operators: s must be a non-negative half-integer");
  }
  const int dim = static_cast<int>(std::round(two_s)) + 1;

  SpinOperators ops;
  ops.s = s;
  ops.sz = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix sp = ComplexMatrix::Zero(dim, dim);  // raising operator
  for (int r = 0; r < dim; ++r) {
    const double m = s - r;
    ops.sz(r, r) = m;
    if (r > 0) sp(r - 1, r) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  const ComplexMatrix sm = sp.adjoint();
  ops.sx = (sp + sm) / 2.0;
  ops.sy = (sp - sm) / Complex(0.0, 2.0);
  return ops;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  ComplexMatrix out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

double expectation(const StateVector& psi, const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() != psi.size()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  if (hermiticity_defect(a) > 1e-9) {
    throw NumericError("expectation: operator is not Hermitian");
  }
  const Complex val = psi.dot(a * psi);  // Eigen dot conjugates the left factor
  if (std::abs(val.imag()) > 1e-9) {
    std::ostringstream msg;
    msg << "expectation: imaginary residue " << val.imag();
    throw NumericError(msg.str());
  }
  return val.real();
}

double hermiticity_defect(const ComplexMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix is not square");
  const double defect = hermiticity_defect(a);
  if (defect > tol) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: max|A - A^+| = " << defect;
    throw NumericError(msg.str());
  }
}

}  // namespace qresponse

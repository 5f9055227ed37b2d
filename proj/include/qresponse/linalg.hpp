#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qresponse/errors.hpp"

namespace qresponse {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Spin matrices for quantum number s (1/2, 1, 3/2, ...), dimension 2s+1.
// Basis ordering is descending m = s, s-1, ..., -s throughout the project.
struct SpinOperators {
  double s;
  ComplexMatrix sx, sy, sz;
  int dim() const { return static_cast<int>(sx.rows()); }
};

SpinOperators spin_operators(double s);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// <psi|a|psi> for Hermitian a. The imaginary residue is checked and discarded.
double expectation(const StateVector& psi, const ComplexMatrix& a);

// max_ij |A - A^dagger|
double hermiticity_defect(const ComplexMatrix& a);

void require_hermitian(const ComplexMatrix& a, double tol = 1e-12);

inline ComplexMatrix identity(int n) { return ComplexMatrix::Identity(n, n); }

}  // namespace qresponse

#pragma once

#include "qresponse/linalg.hpp"

namespace qresponse {

// Eigenvalues ascending; eigenvector columns orthonormal, phase-fixed so the
// first component of magnitude > 1e-6 is real positive.
struct EigenSystem {
  RealVector values;
  ComplexMatrix vectors;
};

// Closed-form eigensystem of a 3x3 Hermitian matrix. Eigenvalues from the
// trigonometric roots of the depressed characteristic cubic; eigenvectors
// from conjugated column cross products with a fallback chain for
// (near-)degenerate spectra.
EigenSystem eig3_exact(const ComplexMatrix& h);

// Iterative Hermitian eigensolver (any dimension); oracle for eig3_exact and
// workhorse for bath blocks.
EigenSystem eig_iterative(const ComplexMatrix& h);

// Multiply by a global phase so the first component with |v_i| > 1e-6 is
// real positive.
StateVector phase_fixed(StateVector v);

}  // namespace qresponse

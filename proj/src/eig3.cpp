#include "qresponse/eig3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qresponse {

namespace {

using Vector3c = Eigen::Vector3cd;

Vector3c cross_conj(const Vector3c& a, const Vector3c& b) {
  Vector3c c;
  c(0) = a(1) * b(2) - a(2) * b(1);
  c(1) = a(2) * b(0) - a(0) * b(2);
  c(2) = a(0) * b(1) - a(1) * b(0);
  return c.conjugate();
}

void fix_phases(ComplexMatrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    StateVector v = vectors.col(j);
    vectors.col(j) = phase_fixed(v);
  }
}

}  // namespace

StateVector phase_fixed(StateVector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 1e-6) {
      v *= std::conj(v(i)) / mag;
      break;
    }
  }
  return v;
}

EigenSystem eig_iterative(const ComplexMatrix& h) {
  require_hermitian(h);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eig_iterative: no convergence for dim " << h.rows()
        << ", |H|_F = " << h.norm();
    throw NumericError(msg.str());
  }
  EigenSystem sys;
  sys.values = solver.eigenvalues();
  sys.vectors = solver.eigenvectors();
  fix_phases(sys.vectors);
  return sys;
}

EigenSystem eig3_exact(const ComplexMatrix& h) {
  if (h.rows() != 3 || h.cols() != 3) {
    throw std::invalid_argument("eig3_exact: matrix must be 3x3");
  }
  require_hermitian(h);

  const double scale = h.norm();  // Frobenius
  const double tr = h.trace().real();

  EigenSystem sys;
  sys.values = RealVector(3);
  sys.vectors = ComplexMatrix::Identity(3, 3);

  const ComplexMatrix b = h - (tr / 3.0) * ComplexMatrix::Identity(3, 3);
  const double p = (b * b).trace().real();  // Tr[B^2] >= 0
  if (p <= 1e-28 * std::max(1.0, scale * scale)) {
    // multiple of the identity
    sys.values.setConstant(tr / 3.0);
    return sys;
  }

  // Depressed cubic t^3 - t - q = 0 for A = sqrt(2/Tr[B^2]) B, q = det(A).
  const ComplexMatrix a = b * std::sqrt(2.0 / p);
  const double q = a.determinant().real();
  double x = 1.5 * std::sqrt(3.0) * q;
  if (std::abs(x) > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "eig3_exact: arccos argument " << x << " outside [-1,1]";
    throw NumericError(msg.str());
  }
  x = std::clamp(x, -1.0, 1.0);
  const double alpha = std::acos(x);

  // k = 2, 1, 0 gives ascending roots.
  const double r = std::sqrt(p / 2.0);
  for (int i = 0; i < 3; ++i) {
    const int k = 2 - i;
    const double t = 2.0 / std::sqrt(3.0) *
                     std::cos(alpha / 3.0 - 2.0 * std::numbers::pi * k / 3.0);
    sys.values(i) = r * t + tr / 3.0;
  }
  std::sort(sys.values.data(), sys.values.data() + 3);

  // Near-degenerate spectra: the cross-product construction loses
  // orthogonality like eps/gap, so hand the whole problem to the iterative
  // solver (which also covers exact degeneracies).
  const double gap01 = sys.values(1) - sys.values(0);
  const double gap12 = sys.values(2) - sys.values(1);
  if (std::min(gap01, gap12) < 1e-6 * std::max(1.0, scale)) {
    return eig_iterative(h);
  }

  const double cross_floor = 1e-8 * scale * scale;
  static constexpr int kPairs[3][2] = {{0, 2}, {0, 1}, {1, 2}};
  for (int m = 0; m < 3; ++m) {
    const double em = sys.values(m);
    Vector3c cols[3];
    for (int j = 0; j < 3; ++j) {
      cols[j] = h.col(j);
      cols[j](j) -= em;
    }
    Vector3c best = Vector3c::Zero();
    double best_norm = 0.0;
    for (const auto& pair : kPairs) {
      const Vector3c w = cross_conj(cols[pair[0]], cols[pair[1]]);
      const double n = w.norm();
      if (n > best_norm) {
        best_norm = n;
        best = w;
      }
    }
    if (best_norm >= cross_floor) {
      sys.vectors.col(m) = best / best_norm;
      continue;
    }
    // Columns (h1 - E e1) and (h3 - E e3) linearly dependent:
    // h1 - E e1 = mu (h3 - E e3), eigenvector (1, 0, -mu)/sqrt(1+|mu|^2).
    Eigen::Index imax;
    cols[2].cwiseAbs().maxCoeff(&imax);
    if (std::abs(cols[2](imax)) > 1e-14 * std::max(1.0, scale)) {
      const Complex mu = cols[0](imax) / cols[2](imax);
      Vector3c v;
      v << 1.0, 0.0, -mu;
      sys.vectors.col(m) = v / std::sqrt(1.0 + std::norm(mu));
    } else {
      return eig_iterative(h);
    }
  }

  // Verify the analytic construction; fall back if it degraded.
  const double res =
      (h * sys.vectors - sys.vectors * sys.values.asDiagonal()).cwiseAbs().maxCoeff();
  const double orth =
      (sys.vectors.adjoint() * sys.vectors - ComplexMatrix::Identity(3, 3))
          .cwiseAbs()
          .maxCoeff();
  if (res > 0.5e-10 * std::max(1.0, scale) || orth > 0.5e-10) {
    return eig_iterative(h);
  }

  fix_phases(sys.vectors);
  return sys;
}

}  // namespace qresponse

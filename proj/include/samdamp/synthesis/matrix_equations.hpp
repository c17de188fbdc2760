#pragma once

#include <complex>

#include <Eigen/Dense>

#include "samdamp/errors.hpp"

namespace samdamp {

/// Solves A^T P + P A + Q = 0 by vectorization (intended for n up to ~10).
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd K(n * n, n * n);
  // vec(A^T P) = (I kron A^T) vec(P); vec(P A) = (A^T kron I) vec(P)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) = I(i, j) * A.transpose() + A(j, i) * I;
    }
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible()) throw NumericalError("Lyapunov equation is singular");
  const Eigen::VectorXd p = lu.solve(rhs);
  const Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(p.data(), n, n);
  return 0.5 * (P + P.transpose());
}

/// Stabilizing solution of A^T P + P A + Q - P B R^-1 B^T P = 0 from the stable
/// invariant subspace of the Hamiltonian matrix.
inline Eigen::MatrixXd solve_riccati(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd H(2 * n, 2 * n);
  H << A, -B * R.ldlt().solve(B.transpose()), -Q, -A.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian eigen-decomposition failed");
  Eigen::MatrixXcd stable(2 * n, n);
  Eigen::Index k = 0;
  const double scale = std::max(1.0, H.norm());
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const double re = es.eigenvalues()[i].real();
    if (std::abs(re) < 1e-10 * scale) throw NumericalError("Hamiltonian has eigenvalues on the imaginary axis");
    if (re < 0.0) {
      if (k == n) break;
      stable.col(k++) = es.eigenvectors().col(i);
    }
  }
  if (k != n) throw NumericalError("Hamiltonian stable subspace has the wrong dimension");
  const Eigen::MatrixXcd U1 = stable.topRows(n);
  const Eigen::MatrixXcd U2 = stable.bottomRows(n);
  const Eigen::MatrixXd P = (U2 * U1.inverse()).real();
  return 0.5 * (P + P.transpose());
}

inline bool is_hurwitz(const Eigen::MatrixXd& A) {
  return A.eigenvalues().real().maxCoeff() < 0.0;
}

/// PBH stabilizability: rank [A - lambda I, B] = n for every eigenvalue with Re >= -tol.
inline bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tol = 1e-9) {
  const Eigen::Index n = A.rows();
  const Eigen::VectorXcd ev = A.eigenvalues();
  const double scale = std::max(1.0, A.norm() + B.norm());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i].real() < -tol * scale) continue;
    Eigen::MatrixXcd M(n, n + B.cols());
    M << A.cast<std::complex<double>>() - ev[i] * Eigen::MatrixXcd::Identity(n, n), B.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    if (svd.singularValues()[n - 1] <= 1e-9 * scale) return false;
  }
  return true;
}

/// PBH detectability, the dual of stabilizability.
inline bool is_detectable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, double tol = 1e-9) {
  return is_stabilizable(A.transpose(), C.transpose(), tol);
}

}  // namespace samdamp

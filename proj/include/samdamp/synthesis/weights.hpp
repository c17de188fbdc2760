#pragma once

#include <Eigen/Dense>

#include "samdamp/errors.hpp"

namespace samdamp {

/// Quadratic cost weights. The effective input weight is sigma * R_base.
struct LqrWeights {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R_base;
  double sigma = 1.0;

  Eigen::MatrixXd R() const { return sigma * R_base; }

  /// Q = diag{0, 10, 0, 1, 0}: penalize only q1' and theta'; R = sigma diag{1, 10}.
  static LqrWeights damping_defaults(double sigma) {
    LqrWeights w;
    w.Q = Eigen::VectorXd{{0.0, 10.0, 0.0, 1.0, 0.0}}.asDiagonal();
    w.R_base = Eigen::VectorXd{{1.0, 10.0}}.asDiagonal();
    w.sigma = sigma;
    return w;
  }

  void validate(Eigen::Index states, Eigen::Index inputs) const {
    if (Q.rows() != states || Q.cols() != states) throw StructuralError("Q must be n x n");
    if (R_base.rows() != inputs || R_base.cols() != inputs) throw StructuralError("R must be m x m");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma", "must be a finite value > 0");
    if (!Q.isApprox(Q.transpose()) || !R_base.isApprox(R_base.transpose())) {
      throw ConfigError("weights", "Q and R must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q(Q), r(R_base);
    if (q.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, Q.norm())) {
      throw ConfigError("weights.q", "Q must be positive semidefinite");
    }
    if (r.eigenvalues().minCoeff() <= 0.0) throw ConfigError("weights.r", "R must be positive definite");
  }
};

}  // namespace samdamp

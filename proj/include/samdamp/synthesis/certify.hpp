#pragma once

#include <Eigen/Dense>

#include "samdamp/dynamics/linear_model.hpp"
#include "samdamp/synthesis/matrix_equations.hpp"
#include "samdamp/synthesis/weights.hpp"

namespace samdamp {

struct Certificate {
  bool hurwitz = false;
  Eigen::VectorXcd eigenvalues;  ///< of A - B F C
  Eigen::MatrixXd P;             ///< achieved cost matrix, empty unless hurwitz
  double cost = 0.0;             ///< trace(P), zero unless hurwitz
};

inline Eigen::MatrixXd closed_loop(const LinearModel& model, const Eigen::MatrixXd& F) {
  return model.A - model.B * F * model.C;
}

/// Closed-loop eigenvalues of u = -F y and, when stable, the solution of
/// A_cl^T P + P A_cl + Q + C^T F^T R F C = 0 (expected cost for E[x0 x0^T] = I is trace P).
inline Certificate certify(const LinearModel& model, const Eigen::MatrixXd& F, const LqrWeights& weights) {
  model.check_structure();
  if (F.rows() != model.inputs() || F.cols() != model.outputs()) throw StructuralError("F must be m x p");
  if (!F.allFinite()) throw NumericalError("gain is not finite");
  Certificate c;
  const Eigen::MatrixXd acl = closed_loop(model, F);
  c.eigenvalues = acl.eigenvalues();
  c.hurwitz = c.eigenvalues.real().maxCoeff() < 0.0;
  if (c.hurwitz) {
    const Eigen::MatrixXd FC = F * model.C;
    c.P = solve_lyapunov(acl, weights.Q + FC.transpose() * weights.R() * FC);
    c.cost = c.P.trace();
  }
  return c;
}

}  // namespace samdamp

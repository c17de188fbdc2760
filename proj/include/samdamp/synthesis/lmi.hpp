#pragma once

#include <Eigen/Dense>

#include "samdamp/dynamics/linear_model.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/synthesis/weights.hpp"

namespace samdamp {

struct LmiBlocks {
  Eigen::MatrixXd M;  ///< (n + m) x (n + m), symmetric
  double trace_P = 0.0;
};

/// Convexified output-feedback LQR constraint for a fixed Xi:
///
///   M = [ A^T P + P A + Q + H   G^T  ]
///       [ G                   -R^-1 ]
///   G = F C - R^-1 B^T P
///   H = -(Xi B) R^-1 (B^T P) - (P B) R^-1 (B^T Xi) + (Xi B) R^-1 (B^T Xi)
///
/// M <= 0 implies (A - BFC)^T P + P (A - BFC) + Q + C^T F^T R F C <= 0, with
/// equality of the bound when Xi = P.
inline LmiBlocks assemble_lmi(const LinearModel& model, const LqrWeights& weights, const Eigen::MatrixXd& Xi,
                              const Eigen::MatrixXd& F, const Eigen::MatrixXd& P) {
  model.check_structure();
  const Eigen::Index n = model.states(), m = model.inputs(), p = model.outputs();
  weights.validate(n, m);
  if (Xi.rows() != n || Xi.cols() != n) throw StructuralError("Xi must be n x n");
  if (P.rows() != n || P.cols() != n) throw StructuralError("P must be n x n");
  if (F.rows() != m || F.cols() != p) throw StructuralError("F must be m x p");

  const Eigen::MatrixXd Rinv = weights.R().inverse();
  const Eigen::MatrixXd XiB = Xi * model.B;
  const Eigen::MatrixXd PB = P * model.B;
  const Eigen::MatrixXd H = -XiB * Rinv * PB.transpose() - PB * Rinv * XiB.transpose() + XiB * Rinv * XiB.transpose();
  const Eigen::MatrixXd G = F * model.C - Rinv * PB.transpose();

  LmiBlocks out;
  out.M.resize(n + m, n + m);
  out.M.topLeftCorner(n, n) = model.A.transpose() * P + P * model.A + weights.Q + H;
  out.M.topRightCorner(n, m) = G.transpose();
  out.M.bottomLeftCorner(m, n) = G;
  out.M.bottomRightCorner(m, m) = -Rinv;
  out.M = 0.5 * (out.M + out.M.transpose());
  out.trace_P = P.trace();
  return out;
}

}  // namespace samdamp

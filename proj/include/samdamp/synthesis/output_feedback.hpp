#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "samdamp/dynamics/linear_model.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/synthesis/barrier_sdp.hpp"
#include "samdamp/synthesis/certify.hpp"
#include "samdamp/synthesis/lmi.hpp"
#include "samdamp/synthesis/matrix_equations.hpp"
#include "samdamp/synthesis/weights.hpp"

namespace samdamp {

enum class GainStructure { diagonal, dense };

/// Starting convexification matrix.
///  - lyapunov: closed-loop cost matrix of the initial gain (always feasible)
///  - riccati:  state-feedback Riccati solution
///  - identity: I
/// The latter two fall back to `lyapunov` when the first subproblem is infeasible.
enum class XiInit { lyapunov, riccati, identity };

inline const char* to_string(XiInit x) {
  switch (x) {
    case XiInit::lyapunov: return "lyapunov";
    case XiInit::riccati: return "riccati";
    case XiInit::identity: return "identity";
  }
  return "?";
}

struct SynthesisOptions {
  int max_iter = 50;
  double tol = 1e-6;  ///< relative change of trace(P) between Xi updates
  XiInit xi_init = XiInit::lyapunov;
  GainStructure structure = GainStructure::diagonal;
  double epsilon = 1e-9;  ///< strictness margin: M <= -eps I, P >= eps I
  std::optional<Eigen::MatrixXd> initial_gain;
  BarrierOptions barrier;
};

struct SynthesisResult {
  Eigen::MatrixXd F;
  Eigen::MatrixXd P;
  Eigen::MatrixXd xi;  ///< Xi of the final subproblem, needed to rebuild M
  double cost = 0.0;   ///< trace(P)
  bool feasible = false;
  bool converged = false;
  bool hurwitz = false;
  bool monotone = true;  ///< trace(P) never increased between Xi updates (beyond barrier gap)
  double max_eig_M = 0.0;
  double min_eig_P = 0.0;
  int iterations = 0;
  XiInit xi_used = XiInit::lyapunov;
  std::vector<double> cost_history;
  std::string diagnostics;

  double kv() const { return F(0, 0); }
  double kw() const { return F.rows() > 1 && F.cols() > 1 ? F(1, 1) : 0.0; }
};

namespace detail {

// Decision vector layout: upper triangle of P (row-major), then the free entries of F.
struct SynthesisLayout {
  Eigen::Index n = 0, m = 0, p = 0;
  GainStructure structure = GainStructure::diagonal;

  Eigen::Index p_vars() const { return n * (n + 1) / 2; }
  Eigen::Index f_vars() const { return structure == GainStructure::diagonal ? std::min(m, p) : m * p; }
  Eigen::Index size() const { return p_vars() + f_vars(); }

  Eigen::VectorXd pack(const Eigen::MatrixXd& P, const Eigen::MatrixXd& F) const {
    Eigen::VectorXd z(size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) z[k++] = 0.5 * (P(i, j) + P(j, i));
    }
    if (structure == GainStructure::diagonal) {
      for (Eigen::Index i = 0; i < std::min(m, p); ++i) z[k++] = F(i, i);
    } else {
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z[k++] = F(i, j);
      }
    }
    return z;
  }

  Eigen::MatrixXd P(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd out(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) out(i, j) = out(j, i) = z[k++];
    }
    return out;
  }

  Eigen::MatrixXd F(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, p);
    Eigen::Index k = p_vars();
    if (structure == GainStructure::diagonal) {
      for (Eigen::Index i = 0; i < std::min(m, p); ++i) out(i, i) = z[k++];
    } else {
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) out(i, j) = z[k++];
      }
    }
    return out;
  }
};

inline Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

// Fixed-Xi subproblem as an SDP in z. The M constraint is written as
// T (-M - eps I) T > 0 with T = diag(I, R^1/2): same feasible set, better scaled.
inline SdpProblem build_subproblem(const LinearModel& model, const LqrWeights& weights, const Eigen::MatrixXd& xi,
                                   const SynthesisLayout& layout, double eps) {
  const Eigen::Index n = layout.n, m = layout.m, nv = layout.size();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n + m, n + m);
  T.bottomRightCorner(m, m) = symmetric_sqrt(weights.R());

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(nv);
  const Eigen::MatrixXd m0 = assemble_lmi(model, weights, xi, layout.F(zero), layout.P(zero)).M;

  SdpProblem prob;
  prob.cost = Eigen::VectorXd::Zero(nv);
  AffineMatrix lmi, pos;
  lmi.constant = T * (-m0 - eps * Eigen::MatrixXd::Identity(n + m, n + m)) * T;
  pos.constant = -eps * Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < nv; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(nv);
    e[i] = 1.0;
    const Eigen::MatrixXd Pi = layout.P(e);
    const Eigen::MatrixXd Mi = assemble_lmi(model, weights, xi, layout.F(e), Pi).M - m0;
    Eigen::MatrixXd Li = -(T * Mi * T);
    lmi.terms.push_back(0.5 * (Li + Li.transpose()));
    pos.terms.push_back(Pi);
    prob.cost[i] = Pi.trace();
  }
  prob.constraints.push_back(std::move(lmi));
  prob.constraints.push_back(std::move(pos));
  return prob;
}

inline Eigen::MatrixXd project_gain(const Eigen::MatrixXd& K, const Eigen::MatrixXd& C, GainStructure s) {
  const Eigen::Index m = K.rows(), p = C.rows();
  if (s == GainStructure::dense) {
    return K * C.completeOrthogonalDecomposition().pseudoInverse();
  }
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m, p);
  for (Eigen::Index i = 0; i < std::min(m, p); ++i) {
    const double denom = C.row(i).squaredNorm();
    if (denom > 0.0) F(i, i) = K.row(i).dot(C.row(i)) / denom;
  }
  return F;
}

}  // namespace detail

/// Minimum-trace output-feedback LQR gain by iterated convexification.
///
/// For a fixed Xi the problem min trace(P) s.t. M(P, F; Xi) <= 0, P > 0 is an
/// SDP, solved here by a log-det barrier method. Xi is then replaced by the new
/// P; the previous solution stays feasible, so trace(P) cannot increase.
inline SynthesisResult solve_output_feedback_lqr(const LinearModel& model, const LqrWeights& weights,
                                                 const SynthesisOptions& opt = {}) {
  model.check_structure();
  const Eigen::Index n = model.states(), m = model.inputs(), p = model.outputs();
  weights.validate(n, m);
  if (opt.max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
  if (!(opt.tol > 0.0)) throw ConfigError("tol", "must be > 0");
  if (opt.structure == GainStructure::diagonal && m != p) {
    throw StructuralError("diagonal gain structure needs as many outputs as inputs");
  }
  if (!is_stabilizable(model.A, model.B)) throw UncontrollableModelError("(A, B) is not stabilizable");
  if (!is_detectable(model.A, model.C)) throw UncontrollableModelError("(A, C) is not detectable");

  const detail::SynthesisLayout layout{n, m, p, opt.structure};
  const Eigen::MatrixXd R = weights.R();
  std::ostringstream diag;

  // Initial gain: given, or the Riccati state-feedback gain projected onto the structure.
  Eigen::MatrixXd p_riccati;
  Eigen::MatrixXd F0;
  if (opt.initial_gain) {
    F0 = *opt.initial_gain;
    if (F0.rows() != m || F0.cols() != p) throw StructuralError("initial gain must be m x p");
    F0 = layout.F(layout.pack(Eigen::MatrixXd::Zero(n, n), F0));
  } else {
    p_riccati = solve_riccati(model.A, model.B, weights.Q, R);
    F0 = detail::project_gain(R.ldlt().solve(model.B.transpose() * p_riccati), model.C, opt.structure);
  }
  bool stabilizing = is_hurwitz(closed_loop(model, F0));
  for (double scale : {0.5, 2.0, 0.25, 4.0, 0.1, 10.0}) {
    if (stabilizing) break;
    if (is_hurwitz(closed_loop(model, scale * F0))) {
      F0 *= scale;
      stabilizing = true;
      diag << "initial gain rescaled by " << scale << "; ";
    }
  }
  if (!stabilizing) throw SynthesisFailedError("no stabilizing initial output-feedback gain found");

  // Strictly feasible start for Xi = P_init: A_cl^T P + P A_cl + Q_cl = -delta I.
  const Eigen::MatrixXd acl0 = closed_loop(model, F0);
  const Eigen::MatrixXd fc0 = F0 * model.C;
  const Eigen::MatrixXd qcl0 = weights.Q + fc0.transpose() * R * fc0;
  Eigen::MatrixXd p_init;
  Eigen::VectorXd z;
  Eigen::MatrixXd xi;
  for (double delta = 1e-4 * (qcl0.trace() / n + 1.0); delta < 1e6; delta *= 10.0) {
    p_init = solve_lyapunov(acl0, qcl0 + delta * Eigen::MatrixXd::Identity(n, n));
    xi = p_init;
    z = layout.pack(p_init, F0);
    if (detail::build_subproblem(model, weights, xi, layout, opt.epsilon).strictly_feasible(z)) break;
  }

  SynthesisResult res;
  res.xi_used = XiInit::lyapunov;
  if (opt.xi_init != XiInit::lyapunov) {
    Eigen::MatrixXd candidate;
    if (opt.xi_init == XiInit::identity) {
      candidate = Eigen::MatrixXd::Identity(n, n);
    } else {
      candidate = p_riccati.size() ? p_riccati : solve_riccati(model.A, model.B, weights.Q, R);
    }
    const SdpProblem prob = detail::build_subproblem(model, weights, candidate, layout, opt.epsilon);
    if (auto start = find_strictly_feasible(prob, z)) {
      z = *start;
      xi = candidate;
      res.xi_used = opt.xi_init;
    } else {
      diag << "Xi0 = " << to_string(opt.xi_init) << " infeasible, fell back to lyapunov; ";
    }
  }

  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opt.max_iter; ++k) {
    const SdpProblem prob = detail::build_subproblem(model, weights, xi, layout, opt.epsilon);
    const BarrierResult br = minimize_barrier(prob, z, opt.barrier);
    z = br.z;
    res.iterations = k + 1;
    res.xi = xi;
    const double tr = layout.P(z).trace();
    res.cost_history.push_back(tr);
    if (tr > previous + br.gap + 1e-12 * std::abs(previous)) res.monotone = false;
    if (!br.converged && br.gap > 1e-6 * std::abs(tr)) {
      diag << "iteration " << k + 1 << ": barrier stopped at gap " << br.gap << "; ";
    }
    if (std::abs(previous - tr) < opt.tol * std::abs(previous)) {
      res.converged = true;
      break;
    }
    previous = tr;
    xi = layout.P(z);
  }

  res.F = layout.F(z);
  res.P = layout.P(z);
  res.cost = res.P.trace();
  const LmiBlocks blocks = assemble_lmi(model, weights, res.xi, res.F, res.P);
  res.max_eig_M = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(blocks.M, Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .maxCoeff();
  res.min_eig_P = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(res.P, Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .minCoeff();
  res.hurwitz = is_hurwitz(closed_loop(model, res.F));
  res.feasible = res.min_eig_P > 0.0 && res.max_eig_M <= 1e-8 && res.hurwitz;
  if (!res.converged) diag << "no convergence within " << opt.max_iter << " iterations; ";
  res.diagnostics = diag.str();
  if (!res.feasible) {
    std::ostringstream msg;
    msg << "synthesis failed: max eig(M) = " << res.max_eig_M << ", min eig(P) = " << res.min_eig_P
        << ", hurwitz = " << res.hurwitz << "; " << res.diagnostics;
    throw SynthesisFailedError(msg.str());
  }
  return res;
}

struct SweepRow {
  double sigma = 0.0;
  double kv = 0.0;
  double kw = 0.0;
  double cost = 0.0;
  bool feasible = false;
  int iterations = 0;
  double max_eig_M = 0.0;
  std::string error;  ///< empty on success
  std::optional<SynthesisResult> result;
};

/// `count` logarithmically spaced values from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ConfigError("sigma grid", "needs 0 < lo <= hi and count >= 1");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
  }
  return out;
}

/// One synthesis per sigma, each warm-started from the previous gain. Failures are recorded and the sweep continues.
inline std::vector<SweepRow> sigma_sweep(const LinearModel& model, const LqrWeights& base,
                                         const std::vector<double>& sigmas, const SynthesisOptions& opt = {}) {
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw ConfigError("sigma", "values must be positive");
    if (i > 0 && sigmas[i] < sigmas[i - 1]) throw ConfigError("sigma", "values must be sorted ascending");
  }
  std::vector<SweepRow> rows;
  std::optional<Eigen::MatrixXd> warm = opt.initial_gain;
  for (double sigma : sigmas) {
    LqrWeights w = base;
    w.sigma = sigma;
    SynthesisOptions o = opt;
    o.initial_gain = warm;
    SweepRow row;
    row.sigma = sigma;
    try {
      const SynthesisResult r = solve_output_feedback_lqr(model, w, o);
      row.kv = r.kv();
      row.kw = r.kw();
      row.cost = r.cost;
      row.feasible = r.feasible;
      row.iterations = r.iterations;
      row.max_eig_M = r.max_eig_M;
      row.result = r;
      warm = r.F;
    } catch (const NumericalError& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace samdamp

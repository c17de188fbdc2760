#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "samdamp/errors.hpp"

namespace samdamp {

/// L(z) = constant + sum_i z_i terms[i], all symmetric.
struct AffineMatrix {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> terms;

  Eigen::MatrixXd operator()(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd out = constant;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (z[static_cast<Eigen::Index>(i)] != 0.0) out += z[static_cast<Eigen::Index>(i)] * terms[i];
    }
    return out;
  }
};

/// minimize c^T z  subject to  L_j(z) > 0 for every constraint j.
struct SdpProblem {
  Eigen::VectorXd cost;
  std::vector<AffineMatrix> constraints;

  Eigen::Index variables() const { return cost.size(); }

  /// Total barrier degree (sum of constraint sizes); the duality gap on the
  /// central path is degree / t.
  double degree() const {
    double d = 0.0;
    for (const auto& c : constraints) d += static_cast<double>(c.constant.rows());
    return d;
  }

  bool strictly_feasible(const Eigen::VectorXd& z) const {
    for (const auto& c : constraints) {
      Eigen::LLT<Eigen::MatrixXd> llt(c(z));
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }
};

struct BarrierOptions {
  double t0 = 0.0;              ///< initial barrier weight; 0 picks degree / max(1, |c^T z0|)
  double growth = 10.0;         ///< factor applied to t after each centering
  double relative_gap = 1e-9;   ///< stop when degree / t <= relative_gap * max(1, |c^T z|)
  double newton_tol = 1e-11;    ///< centering stops when the Newton decrement^2 / 2 is below this
  int max_newton = 400;         ///< total Newton step budget
  int max_rounds = 1000;        ///< centering rounds
};

struct BarrierResult {
  Eigen::VectorXd z;
  double objective = 0.0;
  double gap = std::numeric_limits<double>::infinity();  ///< bound on objective - optimum
  int newton_steps = 0;
  bool converged = false;
};

namespace detail {

struct BarrierEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// -sum log det L_j(z) with gradient and Hessian; nullopt when z is outside the domain.
inline std::optional<BarrierEval> log_det_barrier(const SdpProblem& prob, const Eigen::VectorXd& z,
                                                  bool derivatives) {
  const Eigen::Index nv = prob.variables();
  BarrierEval out;
  if (derivatives) {
    out.gradient = Eigen::VectorXd::Zero(nv);
    out.hessian = Eigen::MatrixXd::Zero(nv, nv);
  }
  for (const auto& c : prob.constraints) {
    Eigen::LLT<Eigen::MatrixXd> llt(c(z));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Eigen::MatrixXd L = llt.matrixL();
    const double logdet = 2.0 * L.diagonal().array().log().sum();
    if (!std::isfinite(logdet)) return std::nullopt;
    out.value -= logdet;
    if (!derivatives) continue;
    // W_i = L^-1 A_i L^-T; tr(S^-1 A_i) = tr(W_i), tr(S^-1 A_i S^-1 A_k) = <W_i, W_k>.
    std::vector<Eigen::MatrixXd> w(static_cast<std::size_t>(nv));
    const auto tri = llt.matrixL();
    for (Eigen::Index i = 0; i < nv; ++i) {
      Eigen::MatrixXd tmp = tri.solve(c.terms[static_cast<std::size_t>(i)]);
      w[static_cast<std::size_t>(i)] = tri.solve(tmp.transpose());
      out.gradient[i] -= w[static_cast<std::size_t>(i)].trace();
    }
    for (Eigen::Index i = 0; i < nv; ++i) {
      for (Eigen::Index k = 0; k <= i; ++k) {
        const double h = (w[static_cast<std::size_t>(i)].cwiseProduct(w[static_cast<std::size_t>(k)])).sum();
        out.hessian(i, k) += h;
        if (k != i) out.hessian(k, i) += h;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Log-det barrier interior-point method from a strictly feasible start.
///
/// Each outer round centers t c^T z - sum log det L_j(z) with damped Newton
/// steps, then multiplies t by `growth`.
inline BarrierResult minimize_barrier(const SdpProblem& prob, const Eigen::VectorXd& z0,
                                      const BarrierOptions& opt = {}) {
  if (z0.size() != prob.variables()) throw StructuralError("barrier start has the wrong size");
  if (!prob.strictly_feasible(z0)) throw NumericalError("barrier start is not strictly feasible");
  const double degree = prob.degree();
  BarrierResult res;
  res.z = z0;
  double t = opt.t0 > 0.0 ? opt.t0 : degree / std::max(1.0, std::abs(prob.cost.dot(z0)));

  for (int round = 0; round < opt.max_rounds; ++round) {
    // Centering.
    while (res.newton_steps < opt.max_newton) {
      auto ev = detail::log_det_barrier(prob, res.z, true);
      const Eigen::VectorXd grad = t * prob.cost + ev->gradient;
      const Eigen::MatrixXd& hess = ev->hessian;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        const double reg = 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
        step = (hess + reg * Eigen::MatrixXd::Identity(hess.rows(), hess.cols())).ldlt().solve(-grad);
      }
      const double decrement = -grad.dot(step);
      ++res.newton_steps;
      if (!(decrement > 0.0) || decrement / 2.0 <= opt.newton_tol) break;

      // Compare differences, not absolute values: t c^T z dwarfs the decrement late in the solve.
      const double slope = t * prob.cost.dot(step);
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-14) {
        const Eigen::VectorXd trial = res.z + alpha * step;
        auto et = detail::log_det_barrier(prob, trial, false);
        if (et && alpha * slope + (et->value - ev->value) <= -0.25 * alpha * decrement) {
          res.z = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    res.gap = degree / t;
    res.objective = prob.cost.dot(res.z);
    if (res.gap <= opt.relative_gap * std::max(1.0, std::abs(res.objective))) {
      res.converged = true;
      break;
    }
    if (res.newton_steps >= opt.max_newton) break;
    t *= opt.growth;
  }
  return res;
}

/// Phase I: searches for z with every L_j(z) > margin I, starting anywhere.
///
/// Minimizes s subject to L_j(z) + s I > 0 and s > -1 - margin, stopping as
/// soon as s < -margin. Returns nullopt when the minimum of s is not negative.
inline std::optional<Eigen::VectorXd> find_strictly_feasible(const SdpProblem& prob, const Eigen::VectorXd& z0,
                                                             double margin = 0.0, const BarrierOptions& opt = {}) {
  const Eigen::Index nv = prob.variables();
  if (prob.strictly_feasible(z0)) {
    bool enough = true;
    for (const auto& c : prob.constraints) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c(z0), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() <= margin) enough = false;
    }
    if (enough) return z0;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : prob.constraints) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c(z0), Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }

  SdpProblem aux;
  aux.cost = Eigen::VectorXd::Zero(nv + 1);
  aux.cost[nv] = 1.0;
  for (const auto& c : prob.constraints) {
    AffineMatrix a;
    a.constant = c.constant;
    a.terms = c.terms;
    a.terms.push_back(Eigen::MatrixXd::Identity(c.constant.rows(), c.constant.cols()));
    aux.constraints.push_back(std::move(a));
  }
  AffineMatrix floor;
  floor.constant = Eigen::MatrixXd::Constant(1, 1, 1.0 + margin);
  floor.terms.assign(static_cast<std::size_t>(nv), Eigen::MatrixXd::Zero(1, 1));
  floor.terms.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
  aux.constraints.push_back(std::move(floor));

  Eigen::VectorXd w(nv + 1);
  w << z0, std::max(0.0, -worst) + 1.0;

  // Short centering rounds, checking for a negative s after each.
  BarrierOptions inner = opt;
  inner.max_newton = 60;
  inner.relative_gap = 1e-14;
  double t = 1.0;
  for (int round = 0; round < 40; ++round) {
    inner.t0 = t;
    inner.max_rounds = 1;
    BarrierResult r = minimize_barrier(aux, w, inner);
    w = r.z;
    if (w[nv] < -margin) {
      Eigen::VectorXd z = w.head(nv);
      if (prob.strictly_feasible(z)) return z;
    }
    t *= 4.0;
  }
  return std::nullopt;
}

}  // namespace samdamp

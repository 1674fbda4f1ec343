#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "wrsim/errors.hpp"

namespace wrsim {

struct NewtonConfig {
  double tol = 1e-8;     // infinity norm of the residual
  int max_iter = 25;
  double damping = 1.0;  // initial step scale, halved on stall

  void validate() const {
    if (!(tol > 0.0)) throw ConfigError("newton tol must be positive");
    if (max_iter < 1) throw ConfigError("newton max_iter must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0))
      throw ConfigError("newton damping must be in (0, 1]");
  }
};

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Damped Newton for R(x) = 0 with a dense Jacobian.
///
/// The residual is checked before the first iteration, so a starting point
/// already at the solution reports zero iterations and leaves x untouched.
/// If a full step does not reduce the residual norm the step is halved, up
/// to four times; the final trial is accepted either way so the iteration
/// cannot stall silently. Deterministic: no randomization anywhere.
template <class ResidualFn, class JacobianFn>
NewtonResult newton_solve(ResidualFn&& residual, JacobianFn&& jacobian,
                          Eigen::VectorXd x0, const NewtonConfig& cfg) {
  cfg.validate();
  NewtonResult res;
  res.x = std::move(x0);
  Eigen::VectorXd r = residual(res.x);
  double norm = r.size() == 0 ? 0.0 : r.template lpNorm<Eigen::Infinity>();
  res.residual_norm = norm;
  if (norm <= cfg.tol) return res;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    Eigen::MatrixXd j = jacobian(res.x);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(j);
    const double min_pivot =
        lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (min_pivot < 1e-14) throw SingularJacobian(min_pivot);
    Eigen::VectorXd dx = lu.solve(-r);

    double alpha = cfg.damping;
    Eigen::VectorXd x_trial;
    Eigen::VectorXd r_trial;
    double norm_trial = 0.0;
    for (int halving = 0;; ++halving) {
      x_trial = res.x + alpha * dx;
      r_trial = residual(x_trial);
      norm_trial = r_trial.template lpNorm<Eigen::Infinity>();
      if (norm_trial < norm || halving >= 4) break;
      alpha *= 0.5;
    }
    res.x = std::move(x_trial);
    r = std::move(r_trial);
    norm = norm_trial;
    res.iterations = it;
    res.residual_norm = norm;
    if (norm <= cfg.tol) return res;
  }
  throw NonConvergence(cfg.max_iter, norm);
}

}  // namespace wrsim

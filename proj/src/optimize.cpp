#include "mexed/optimize.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace mexed::optimize {

namespace {

Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lower) {
  return x.cwiseMax(lower);
}

// Mask of coordinates pinned at their lower bound with the gradient pushing outward.
Eigen::VectorXd free_mask(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lower) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= lower[i] && g[i] > 0.0) mask[i] = 0.0;
  }
  return mask;
}

}  // namespace

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                         const BfgsOptions& opts, const StopTest& stop) {
  const Eigen::Index dim = x0.size();
  BfgsResult res;
  res.x = project(std::move(x0), lower);
  res.grad = Eigen::VectorXd::Zero(dim);
  res.f = f(res.x, res.grad);

  auto stopped = [&](const Eigen::VectorXd& x, double fx, const Eigen::VectorXd& g) {
    if (stop) return stop(x, fx, g);
    return (g.cwiseProduct(free_mask(x, g, lower))).lpNorm<Eigen::Infinity>() < opts.gradient_tolerance;
  };

  if (!std::isfinite(res.f)) return res;
  if (stopped(res.x, res.f, res.grad)) {
    res.converged = true;
    return res;
  }

  Eigen::MatrixXd inv_hess = Eigen::MatrixXd::Identity(dim, dim);
  bool fresh = true;
  Eigen::VectorXd g_new(dim);

  for (int it = 1; it <= opts.max_iterations; ++it) {
    res.iterations = it;
    const Eigen::VectorXd mask = free_mask(res.x, res.grad, lower);
    const Eigen::VectorXd g_free = res.grad.cwiseProduct(mask);
    Eigen::VectorXd dir = -(inv_hess * g_free).cwiseProduct(mask);
    if (dir.dot(g_free) >= 0.0) {
      inv_hess.setIdentity();
      fresh = true;
      dir = -g_free;
    }
    const double dir_norm = dir.lpNorm<Eigen::Infinity>();
    if (dir_norm == 0.0) break;
    if (dir_norm > opts.max_step) dir *= opts.max_step / dir_norm;

    // Armijo backtracking along the projected path.
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      x_new = project(res.x + t * dir, lower);
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.f + 1e-4 * res.grad.dot(x_new - res.x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh) break;
      inv_hess.setIdentity();
      fresh = true;
      continue;
    }

    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - res.grad;
    const double sy = s.dot(y);
    res.x = x_new;
    res.f = f_new;
    res.grad = g_new;

    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) {
        // Scale the initial inverse Hessian to the observed curvature.
        inv_hess *= sy / y.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      inv_hess = (eye - rho * s * y.transpose()) * inv_hess * (eye - rho * y * s.transpose()) +
                 rho * s * s.transpose();
    }

    if (stopped(res.x, res.f, res.grad)) {
      res.converged = true;
      return res;
    }
    if (s.lpNorm<Eigen::Infinity>() < 1e-15 * (1.0 + res.x.lpNorm<Eigen::Infinity>())) break;
  }
  res.converged = stopped(res.x, res.f, res.grad);
  return res;
}

}  // namespace mexed::optimize

#pragma once

#include <functional>

#include <Eigen/Core>

namespace mexed::optimize {

/// Objective returning f(x) and writing the gradient into grad.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Called after every accepted step; returning true stops the search as converged.
using StopTest = std::function<bool(const Eigen::VectorXd& x, double f, const Eigen::VectorXd& grad)>;

struct BfgsOptions {
  int max_iterations = 500;
  /// Largest sup-norm of a single step.
  double max_step = 2.0;
  /// Fallback stop when no StopTest is given: projected-gradient sup-norm.
  double gradient_tolerance = 1e-8;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f subject to x >= lower (componentwise; -inf for unbounded) by
/// projected BFGS with Armijo backtracking.  Coordinates sitting on their bound
/// with an outward-pointing descent direction are frozen for that step.
BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                         const BfgsOptions& opts = {}, const StopTest& stop = {});

}  // namespace mexed::optimize

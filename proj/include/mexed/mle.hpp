#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mexed/params.hpp"

namespace mexed {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct FitOptions {
  /// Extra starting point tried after the built-in initializer set.
  std::optional<Params> init;
  int max_iterations = 500;
  /// Two-sided confidence level 1 - gamma of the asymptotic intervals.
  double ci_level = 0.95;
  /// lambda and beta are searched on [floor, inf); a coordinate ending on the
  /// floor is reported as exactly 0.
  double boundary_floor = 1e-12;
  /// Coordinates held at a fixed value (profile mode), ordered (alpha, lambda, beta).
  std::array<std::optional<double>, 3> fixed{};
  /// Run the multi-start branches concurrently.
  bool parallel_starts = true;
};

struct StartReport {
  std::array<double, 3> init{};
  double init_loglik = 0.0;
  double final_loglik = 0.0;
  bool converged = false;
};

/// Maximum-likelihood fit with observed-information covariance and Wald intervals.
struct FitResult {
  Params params_hat{1.0, 1.0, 0.0};
  double loglik = 0.0;
  /// Sup-norm of the score over the free, non-boundary coordinates.
  double gradient_norm = 0.0;
  double gradient_tolerance = 0.0;
  Eigen::Matrix3d info_matrix = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d cov_matrix = Eigen::Matrix3d::Zero();
  /// False when the information matrix is not safely positive definite
  /// (smallest eigenvalue below 1e-10 * trace); cov_matrix is then a pseudo-inverse.
  bool cov_reliable = false;
  std::array<Interval, 3> ci{};
  double ci_level = 0.95;
  bool converged = false;
  int iterations = 0;
  std::array<bool, 3> at_boundary{};
  std::array<bool, 3> fixed{};
  std::size_t n = 0;
  std::vector<StartReport> starts;
};

/// Maximizes the log-likelihood over the positive orthant (quasi-Newton in log
/// coordinates from a deterministic multi-start set, then Newton refinement).
/// Throws InsufficientDataError for n < 2.  Non-convergence is reported via
/// FitResult::converged, not thrown.
FitResult fit_mle(const Dataset& d, const FitOptions& opts = {});

/// Starting points used by fit_mle before any user-supplied init.
std::vector<Params> default_starts(const Dataset& d);

/// Normal quantile z_{gamma/2} for a two-sided level 1 - gamma.
double two_sided_z(double level);

/// Covariance and Wald intervals for a given information matrix; exposed so
/// FitResult construction can be checked in isolation.
void fill_uncertainty(FitResult& fit);

/// R(t) at the fitted parameters.
double plugin_reliability(const FitResult& fit, double t);
/// h(t) at the fitted parameters.
double plugin_hazard(const FitResult& fit, double t);

}  // namespace mexed

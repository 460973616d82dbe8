#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

#include "mexed/mle.hpp"
#include "mexed/params.hpp"

namespace mexed {

/// Hyperparameters of independent gamma priors:
/// alpha ~ Gamma(a, b), lambda ~ Gamma(c, d), beta ~ Gamma(g, f) (shape, rate).
struct PriorHyper {
  double a = 1.0, b = 0.0;
  double c = 1.0, d = 0.0;
  double g = 1.0, f = 0.0;

  /// a = c = g = 1, b = d = f = 0: flat on the positive orthant.
  static PriorHyper non_informative() { return {}; }

  /// Throws ValidationError unless all six values are finite and >= 0.
  void validate() const;
};

/// Gradient of the log prior density (alpha, lambda, beta).  Throws
/// DegenerateModelError when lambda = 0 with c != 1 or beta = 0 with g != 1.
std::array<double, 3> prior_log_density_grad(const PriorHyper& h, const Params& p);

/// Log prior density up to its normalizing constant (0 * log 0 taken as 0).
double prior_log_density(const PriorHyper& h, const Params& p);

/// Fully symmetric tensor of third partial derivatives of the log-likelihood,
/// indices 0 = alpha, 1 = lambda, 2 = beta.
class ThirdDerivatives {
 public:
  explicit ThirdDerivatives(const std::array<double, 10>& packed) : packed_(packed) {}
  double operator()(int i, int j, int k) const;
  const std::array<double, 10>& packed() const noexcept { return packed_; }

 private:
  std::array<double, 10> packed_;
};

ThirdDerivatives third_derivatives(const Params& p, const Dataset& d);

/// A function u(alpha, lambda, beta) with its gradient and Hessian, all at one point.
struct UDerivatives {
  double value = 0.0;
  std::array<double, 3> grad{};
  Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
};

/// u = R(t) = exp(1 - z^alpha), z = 1 + lambda t + beta t^2.
UDerivatives reliability_u(const Params& p, double t);
/// u = h(t) = alpha (lambda + 2 beta t) z^(alpha - 1).
UDerivatives hazard_u(const Params& p, double t);
/// u = the j-th parameter.
UDerivatives coordinate_u(const Params& p, int j);

struct LindleyOptions {
  /// How the off-diagonal second-derivative terms of u enter:
  /// printed = u12 s12 + u13 s13 + u23 s23 (one copy per unordered pair);
  /// doubled = twice that.
  enum class CrossTerms { printed, doubled };
  CrossTerms cross_terms = CrossTerms::printed;
  /// Test hook: treat every third derivative of the log-likelihood as 0.
  bool zero_third_derivatives = false;
};

/// Quantities shared by every Lindley estimate at one MLE.
struct LindleyContext {
  Params mle{1.0, 1.0, 0.0};
  /// Inverse of the observed information (minus the Hessian), symmetrized.
  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
  std::array<double, 3> rho{};
  /// A, B, C: contractions sum_ij sigma_ij L_ijk for k = alpha, lambda, beta.
  std::array<double, 3> abc{};
};

/// Throws DegenerateModelError when the information matrix at the MLE is not
/// positive definite or the prior gradient is singular there.
LindleyContext lindley_context(const Dataset& d, const PriorHyper& h, const FitResult& fit,
                               const LindleyOptions& opts = {});

/// Posterior expectation of u under the second-order Lindley expansion.
double lindley_expectation(const LindleyContext& ctx, const UDerivatives& u, const LindleyOptions& opts = {});

struct ClampedEstimate {
  double value = 0.0;
  double unclamped = 0.0;
  bool clamped = false;
};

struct LindleyResult {
  double alpha_bs = 0.0;
  double lambda_bs = 0.0;
  double beta_bs = 0.0;
  std::optional<double> t;
  std::optional<ClampedEstimate> reliability_bs;
  std::optional<ClampedEstimate> hazard_bs;
  FitResult mle_anchor;
};

/// Bayes estimates of (alpha, lambda, beta) under squared-error loss.
LindleyResult lindley_params(const Dataset& d, const PriorHyper& h, const FitResult& fit,
                             const LindleyOptions& opts = {});

/// Bayes estimate of R(t), clamped to [0, 1].
ClampedEstimate lindley_reliability(const Dataset& d, const PriorHyper& h, const FitResult& fit, double t,
                                    const LindleyOptions& opts = {});

/// Bayes estimate of h(t), clamped at 0 from below.
ClampedEstimate lindley_hazard(const Dataset& d, const PriorHyper& h, const FitResult& fit, double t,
                               const LindleyOptions& opts = {});

/// Parameters plus R(t) and h(t) in one call.
LindleyResult lindley_all(const Dataset& d, const PriorHyper& h, const FitResult& fit, double t,
                          const LindleyOptions& opts = {});

}  // namespace mexed

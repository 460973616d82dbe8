#pragma once

#include <cstdint>
#include <utility>

#include "mexed/params.hpp"

namespace mexed {

// Closed-form characteristics of the modified extended exponential
// distribution.  Every function below is defined on the whole real line:
// negative arguments give pdf = cdf = hazard = cum_hazard = 0 and survival = 1.

/// f(x) = alpha (lambda + 2 beta x) z^(alpha-1) exp(1 - z^alpha), z = 1 + lambda x + beta x^2.
double pdf(const Params& p, double x);
/// log f(x); -infinity where f(x) = 0.
double log_pdf(const Params& p, double x);
/// F(x) = 1 - exp(1 - z^alpha).
double cdf(const Params& p, double x);
/// R(t) = exp(1 - z^alpha).
double survival(const Params& p, double t);
/// h(t) = alpha (lambda + 2 beta t) z^(alpha-1).
double hazard(const Params& p, double t);
/// H(t) = z^alpha - 1.
double cum_hazard(const Params& p, double t);

/// Inverse CDF for q in [0, 1).  Throws DomainError outside that range.
double quantile(const Params& p, double q);
double median(const Params& p);

/// Global maximiser of the density on [0, inf).
double mode(const Params& p);

enum class MomentMethod { quadrature, series };

struct MomentSpec {
  int order = 1;
  MomentMethod method = MomentMethod::quadrature;
  int series_cutoff = 60;
  double quad_rel_tol = 1e-10;

  /// Throws ValidationError unless order >= 1, series_cutoff >= 1 and 0 < quad_rel_tol < 1.
  void validate() const;
};

/// Raw moment E[X^r].
///
/// The quadrature route integrates x^r f(x) adaptively over [0, x_hi] with
/// x_hi = quantile(1 - 1e-6) and adds the remaining tail integral.  The series
/// route sums the closed-form double series in powers of beta / (lambda^2 - 4 beta)
/// up to series_cutoff; it needs lambda^2 > 4 beta (UnsupportedRegimeError
/// otherwise) and throws NumericError when the truncated sum has not settled,
/// which happens whenever 4 beta / (lambda^2 - 4 beta) is not small because the
/// series is only asymptotic.
double moment(const Params& p, const MomentSpec& spec = {});

/// (mean, variance).
std::pair<double, double> mean_and_variance(const Params& p);

/// n i.i.d. draws by inverse transform; identical (p, n, seed) give identical output.
Dataset sample(const Params& p, std::size_t n, std::uint64_t seed);

}  // namespace mexed

#pragma once

#include <array>
#include <span>

#include <Eigen/Core>

#include "mexed/params.hpp"

namespace mexed {

/// n ln a + sum ln(l + 2 b x) + (a - 1) sum ln z + sum (1 - z^a).
double log_likelihood(const Params& p, const Dataset& d);

/// Same, for raw coordinates; -infinity when (alpha, lambda, beta) is not a
/// valid parameter point or any term is undefined.
double log_likelihood(double alpha, double lambda, double beta, std::span<const double> x);

/// Gradient of the log-likelihood, ordered (alpha, lambda, beta).
std::array<double, 3> score(const Params& p, const Dataset& d);

/// Negative Hessian of the log-likelihood, ordered (alpha, lambda, beta).
Eigen::Matrix3d observed_information(const Params& p, const Dataset& d);

}  // namespace mexed

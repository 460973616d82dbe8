#include "mexed/likelihood.hpp"

#include <cmath>
#include <limits>

#include "mexed/kernels.hpp"

namespace mexed {

double log_likelihood(const Params& p, const Dataset& d) {
  return kernels::likelihood(p, d.values(), kernels::Order::value).value;
}

double log_likelihood(double alpha, double lambda, double beta, std::span<const double> x) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!Params::valid(alpha, lambda, beta)) return kNegInf;
  const double v = kernels::likelihood(Params(alpha, lambda, beta), x, kernels::Order::value).value;
  return std::isnan(v) ? kNegInf : v;
}

std::array<double, 3> score(const Params& p, const Dataset& d) {
  return kernels::likelihood(p, d.values(), kernels::Order::gradient).gradient;
}

Eigen::Matrix3d observed_information(const Params& p, const Dataset& d) {
  const auto h = kernels::likelihood(p, d.values(), kernels::Order::hessian).hessian;
  Eigen::Matrix3d info;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) info(i, j) = -h[kernels::packed2(i, j)];
  return info;
}

}  // namespace mexed

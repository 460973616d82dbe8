#include "mexed/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "mexed/error.hpp"

namespace mexed::special {


double upper_incomplete_gamma_at_one(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("Gamma(s, 1) requires finite s > 0");
  return boost::math::tgamma(s, 1.0);
}

double binomial(double a, int m) {
  if (m < 0) return 0.0;
  double out = 1.0;
  for (int k = 0; k < m; ++k) out *= (a - k) / (k + 1);
  return out;
}

}  // namespace mexed::special

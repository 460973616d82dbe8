#pragma once

// 50-digit evaluations of the density and CDF, written from the closed forms
// without any of the library's cancellation-avoiding rearrangements.

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

inline double pdf_big(double alpha, double lambda, double beta, double x) {
  const Big a(alpha), l(lambda), b(beta), t(x);
  const Big z = 1 + l * t + b * t * t;
  return static_cast<double>(a * (l + 2 * b * t) * pow(z, a - 1) * exp(1 - pow(z, a)));
}

inline double cdf_big(double alpha, double lambda, double beta, double x) {
  const Big a(alpha), l(lambda), b(beta), t(x);
  const Big z = 1 + l * t + b * t * t;
  return static_cast<double>(1 - exp(1 - pow(z, a)));
}

inline double survival_big(double alpha, double lambda, double beta, double x) {
  const Big a(alpha), l(lambda), b(beta), t(x);
  const Big z = 1 + l * t + b * t * t;
  return static_cast<double>(exp(1 - pow(z, a)));
}

}  // namespace oracle

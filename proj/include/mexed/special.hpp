#pragma once

namespace mexed::special {

/// Upper incomplete gamma function at unit argument, Gamma(s, 1), for s > 0.
double upper_incomplete_gamma_at_one(double s);

/// Generalized binomial coefficient C(a, m) for real a and integer m >= 0.
double binomial(double a, int m);

}  // namespace mexed::special

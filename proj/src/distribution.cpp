#include "mexed/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mexed/error.hpp"
#include "mexed/random.hpp"
#include "mexed/special.hpp"

namespace mexed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log z = log1p(lambda x + beta x^2)
inline double log_z(const Params& p, double x) {
  return std::log1p(x * (p.lambda() + p.beta() * x));
}

inline double rate(const Params& p, double x) { return p.lambda() + 2.0 * p.beta() * x; }

// d/dx log f(x) for x > 0 (x = 0 allowed when lambda > 0).
double dlog_pdf(const Params& p, double x) {
  const double r = rate(p, x);
  const double z = 1.0 + x * (p.lambda() + p.beta() * x);
  const double lz = std::log(z);
  return 2.0 * p.beta() / r + (p.alpha() - 1.0) * r / z -
         p.alpha() * r * std::exp((p.alpha() - 1.0) * lz);
}

}  // namespace

double log_pdf(const Params& p, double x) {
  if (x < 0.0) return -kInf;
  const double r = rate(p, x);
  if (r <= 0.0) return -kInf;
  const double lz = log_z(p, x);
  return std::log(p.alpha() * r) + (p.alpha() - 1.0) * lz - std::expm1(p.alpha() * lz);
}

double pdf(const Params& p, double x) {
  if (x < 0.0) return 0.0;
  const double lz = log_z(p, x);
  return p.alpha() * rate(p, x) * std::exp((p.alpha() - 1.0) * lz - std::expm1(p.alpha() * lz));
}

double survival(const Params& p, double t) {
  if (t <= 0.0) return 1.0;
  return std::exp(-std::expm1(p.alpha() * log_z(p, t)));
}

double cdf(const Params& p, double x) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-std::expm1(p.alpha() * log_z(p, x)));
}

double hazard(const Params& p, double t) {
  if (t < 0.0) return 0.0;
  return p.alpha() * rate(p, t) * std::exp((p.alpha() - 1.0) * log_z(p, t));
}

double cum_hazard(const Params& p, double t) {
  if (t <= 0.0) return 0.0;
  return std::expm1(p.alpha() * log_z(p, t));
}

double quantile(const Params& p, double q) {
  if (!(q >= 0.0) || !(q < 1.0)) {
    std::ostringstream msg;
    msg << "quantile level " << q << " outside [0, 1)";
    throw DomainError(msg.str());
  }
  if (q == 0.0) return 0.0;
  // lambda x + beta x^2 = c, c = (1 - ln(1 - q))^(1/alpha) - 1
  const double c = std::expm1(std::log1p(-std::log1p(-q)) / p.alpha());
  if (p.beta() == 0.0) return c / p.lambda();
  const double l = p.lambda();
  return 2.0 * c / (l + std::sqrt(l * l + 4.0 * p.beta() * c));
}

double median(const Params& p) { return quantile(p, 0.5); }

double mode(const Params& p) {
  constexpr int kGrid = 512;
  const double hi = quantile(p, 0.999);
  std::vector<double> grid(kGrid);
  for (int i = 0; i < kGrid; ++i) grid[i] = hi * i / (kGrid - 1);

  // At x = 0 the log-density slope is +inf when lambda = 0 and -inf never, so
  // a non-positive slope there means the density starts out decreasing.
  auto slope = [&](double x) {
    if (x == 0.0 && p.lambda() == 0.0) return kInf;
    return dlog_pdf(p, x);
  };

  double best_x = 0.0;
  double best_logf = log_pdf(p, 0.0);
  if (p.lambda() == 0.0 && p.alpha() < 0.5) {
    // density ~ x^(2 alpha - 1) is unbounded at the origin
    return 0.0;
  }

  double prev = slope(grid[0]);
  for (int i = 1; i < kGrid; ++i) {
    const double cur = slope(grid[i]);
    if (prev > 0.0 && cur <= 0.0) {
      double lo = grid[i - 1];
      double up = grid[i];
      for (int it = 0; it < 200 && up - lo > 4.0 * std::numeric_limits<double>::epsilon() * up; ++it) {
        const double mid = 0.5 * (lo + up);
        if (slope(mid) > 0.0) lo = mid; else up = mid;
      }
      const double x = 0.5 * (lo + up);
      const double lf = log_pdf(p, x);
      if (lf > best_logf) {
        best_logf = lf;
        best_x = x;
      }
    }
    prev = cur;
  }
  return best_x;
}

void MomentSpec::validate() const {
  if (order < 1) throw ValidationError("moment order must be >= 1");
  if (series_cutoff < 1) throw ValidationError("series cutoff must be >= 1");
  if (!(quad_rel_tol > 0.0 && quad_rel_tol < 1.0))
    throw ValidationError("quadrature tolerance must lie in (0, 1)");
}

namespace {

double moment_quadrature(const Params& p, const MomentSpec& spec) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  const int r = spec.order;
  auto integrand = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(r * std::log(x) + log_pdf(p, x));
  };
  const double hi = quantile(p, 1.0 - 1e-6);
  // Split at the median so the bulk and the shoulder get their own panels.
  const double mid = median(p);
  double err_lo = 0.0;
  double err_hi = 0.0;
  const double body = gauss_kronrod<double, 61>::integrate(integrand, 0.0, mid, 30, spec.quad_rel_tol, &err_lo) +
                      gauss_kronrod<double, 61>::integrate(integrand, mid, hi, 30, spec.quad_rel_tol, &err_hi);
  exp_sinh<double> tail_rule;
  double err_tail = 0.0;
  const double tail = tail_rule.integrate(integrand, hi, kInf, spec.quad_rel_tol, &err_tail);
  const double total = body + tail;
  const double err = err_lo + err_hi + err_tail;
  if (!std::isfinite(total) || err > 10.0 * spec.quad_rel_tol * std::fabs(total) + 1e-300) {
    std::ostringstream msg;
    msg << "moment quadrature did not converge: order " << r << ", estimate " << total
        << ", error estimate " << err << " (body " << body << ", tail " << tail << ")";
    throw NumericError(msg.str());
  }
  return total;
}

double moment_series(const Params& p, const MomentSpec& spec) {
  const double l = p.lambda();
  const double b = p.beta();
  const double disc = l * l - 4.0 * b;
  if (!(b > 0.0) || !(disc > 0.0)) {
    throw UnsupportedRegimeError(
        "moment series needs beta > 0 and lambda^2 > 4 beta; use the quadrature method");
  }
  const int r = spec.order;
  const double e = std::exp(1.0);
  double sum = 0.0;
  double last_block = 0.0;
  for (int m = 0; m <= spec.series_cutoff; ++m) {
    const double gamma_factor = special::upper_incomplete_gamma_at_one(m / p.alpha() + 1.0);
    double block = 0.0;
    for (int n = 0; n <= r; ++n) {
      const double outer = special::binomial(r, n);
      const double inner = special::binomial(0.5 * (r - n), m);
      if (inner == 0.0) continue;
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      // 2^(2m - r) lambda^n beta^(m - r) disc^((r - n - 2m)/2), assembled in logs
      const double log_mag = (2.0 * m - r) * std::log(2.0) + (n > 0 ? n * std::log(l) : 0.0) +
                             (m - r) * std::log(b) + 0.5 * (r - n - 2.0 * m) * std::log(disc);
      block += outer * inner * sign * e * std::exp(log_mag) * gamma_factor;
    }
    sum += block;
    last_block = block;
  }
  if (!std::isfinite(sum) || std::fabs(last_block) > 1e-10 * std::fabs(sum)) {
    std::ostringstream msg;
    msg << "moment series has not settled at cutoff " << spec.series_cutoff << " (partial sum " << sum
        << ", last term " << last_block << "); 4 beta / (lambda^2 - 4 beta) = " << 4.0 * b / disc;
    throw NumericError(msg.str());
  }
  return sum;
}

}  // namespace

double moment(const Params& p, const MomentSpec& spec) {
  spec.validate();
  return spec.method == MomentMethod::series ? moment_series(p, spec) : moment_quadrature(p, spec);
}

std::pair<double, double> mean_and_variance(const Params& p) {
  MomentSpec first;
  MomentSpec second;
  second.order = 2;
  const double m1 = moment(p, first);
  const double m2 = moment(p, second);
  return {m1, m2 - m1 * m1};
}

Dataset sample(const Params& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("sample size must be >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    v = quantile(p, rng.uniform());
    // U in (0, 1) keeps draws positive except for underflow at tiny U.
    if (v <= 0.0) v = std::numeric_limits<double>::min();
  }
  return Dataset(std::move(out));
}

}  // namespace mexed

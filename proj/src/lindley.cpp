#include "mexed/lindley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/kernels.hpp"

namespace mexed {

void PriorHyper::validate() const {
  for (double v : {a, b, c, d, g, f}) {
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream msg;
      msg << "prior hyperparameters must be finite and >= 0 (got a=" << a << ", b=" << b << ", c=" << c
          << ", d=" << d << ", g=" << g << ", f=" << f << ")";
      throw ValidationError(msg.str());
    }
  }
}

namespace {

// (shape - 1) / x - rate, with x = 0 allowed only for a flat shape.
double gamma_log_grad(double shape, double rate, double x, const char* name) {
  if (x > 0.0) return (shape - 1.0) / x - rate;
  if (shape == 1.0) return -rate;
  throw DegenerateModelError(std::string("prior gradient is singular at ") + name + " = 0");
}

double gamma_log_kernel(double shape, double rate, double x) {
  const double lin = -rate * x;
  if (shape == 1.0) return lin;
  return (shape - 1.0) * std::log(x) + lin;
}

}  // namespace

std::array<double, 3> prior_log_density_grad(const PriorHyper& h, const Params& p) {
  return {gamma_log_grad(h.a, h.b, p.alpha(), "alpha"), gamma_log_grad(h.c, h.d, p.lambda(), "lambda"),
          gamma_log_grad(h.g, h.f, p.beta(), "beta")};
}

double prior_log_density(const PriorHyper& h, const Params& p) {
  return gamma_log_kernel(h.a, h.b, p.alpha()) + gamma_log_kernel(h.c, h.d, p.lambda()) +
         gamma_log_kernel(h.g, h.f, p.beta());
}

double ThirdDerivatives::operator()(int i, int j, int k) const { return packed_[kernels::packed3(i, j, k)]; }

ThirdDerivatives third_derivatives(const Params& p, const Dataset& d) {
  return ThirdDerivatives(kernels::likelihood(p, d.values(), kernels::Order::third).third);
}

UDerivatives reliability_u(const Params& p, double t) {
  const double a = p.alpha(), l = p.lambda(), b = p.beta();
  const double z = 1.0 + l * t + b * t * t;
  const double lz = std::log1p(t * (l + b * t));
  const double w = std::exp(a * lz);
  const double rel = std::exp(-std::expm1(a * lz));
  const double z1 = w / z;
  const double z2 = z1 / z;
  const double t2 = t * t;

  UDerivatives u;
  u.value = rel;
  u.grad = {-rel * w * lz, -a * t * rel * z1, -a * t2 * rel * z1};
  auto& H = u.hess;
  H(0, 0) = rel * w * lz * lz * (w - 1.0);
  H(0, 1) = t * rel * z1 * (a * lz * (w - 1.0) - 1.0);
  H(0, 2) = t2 * rel * z1 * (a * lz * (w - 1.0) - 1.0);
  H(1, 1) = rel * ((a * t * z1) * (a * t * z1) - a * (a - 1.0) * t2 * z2);
  H(1, 2) = t2 * t * rel * z2 * (a * (1.0 - a) + a * a * w);
  H(2, 2) = rel * ((a * t2 * z1) * (a * t2 * z1) - a * (a - 1.0) * t2 * t2 * z2);
  H(1, 0) = H(0, 1);
  H(2, 0) = H(0, 2);
  H(2, 1) = H(1, 2);
  return u;
}

UDerivatives hazard_u(const Params& p, double t) {
  const double a = p.alpha(), l = p.lambda(), b = p.beta();
  const double z = 1.0 + l * t + b * t * t;
  const double lz = std::log1p(t * (l + b * t));
  const double r = l + 2.0 * b * t;
  const double z1 = std::exp((a - 1.0) * lz);
  const double z2 = z1 / z;
  const double z3 = z2 / z;
  const double t2 = t * t;
  const double aa = a * (a - 1.0);
  const double mix = (2.0 * a - 1.0) + aa * lz;

  UDerivatives u;
  u.value = a * r * z1;
  u.grad = {r * z1 * (1.0 + a * lz), a * z1 + aa * t * r * z2, 2.0 * a * t * z1 + aa * t2 * r * z2};
  auto& H = u.hess;
  H(0, 0) = r * z1 * lz * (2.0 + a * lz);
  H(0, 1) = z1 * (1.0 + a * lz) + t * r * z2 * mix;
  H(0, 2) = 2.0 * t * z1 * (1.0 + a * lz) + t2 * r * z2 * mix;
  H(1, 1) = aa * (2.0 * t * z2 + (a - 2.0) * t2 * r * z3);
  H(1, 2) = aa * (3.0 * t2 * z2 + (a - 2.0) * t2 * t * r * z3);
  H(2, 2) = aa * (4.0 * t2 * t * z2 + (a - 2.0) * t2 * t2 * r * z3);
  H(1, 0) = H(0, 1);
  H(2, 0) = H(0, 2);
  H(2, 1) = H(1, 2);
  return u;
}

UDerivatives coordinate_u(const Params& p, int j) {
  UDerivatives u;
  u.value = p.as_array().at(j);
  u.grad[j] = 1.0;
  return u;
}

LindleyContext lindley_context(const Dataset& d, const PriorHyper& h, const FitResult& fit,
                               const LindleyOptions& opts) {
  h.validate();
  LindleyContext ctx;
  ctx.mle = fit.params_hat;
  const auto der = kernels::likelihood(fit.params_hat, d.values(), kernels::Order::third);

  Eigen::Matrix3d neg_hess;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) neg_hess(i, j) = -der.hessian[kernels::packed2(i, j)];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(neg_hess, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::fabs(neg_hess.trace()))) {
    throw DegenerateModelError(
        "Lindley approximation unavailable: observed information at the MLE is not positive definite");
  }
  const Eigen::Matrix3d sol = neg_hess.ldlt().solve(Eigen::Matrix3d::Identity());
  ctx.sigma = 0.5 * (sol + sol.transpose());
  ctx.rho = prior_log_density_grad(h, fit.params_hat);

  if (!opts.zero_third_derivatives) {
    const ThirdDerivatives l3(der.third);
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += ctx.sigma(i, j) * l3(i, j, k);
      ctx.abc[k] = s;
    }
  }
  return ctx;
}

double lindley_expectation(const LindleyContext& ctx, const UDerivatives& u, const LindleyOptions& opts) {
  const auto& s = ctx.sigma;
  double prior_term = 0.0;  // u1 a1 + u2 a2 + u3 a3
  for (int i = 0; i < 3; ++i) {
    double ai = 0.0;
    for (int j = 0; j < 3; ++j) ai += ctx.rho[j] * s(i, j);
    prior_term += u.grad[i] * ai;
  }
  double a4 = u.hess(0, 1) * s(0, 1) + u.hess(0, 2) * s(0, 2) + u.hess(1, 2) * s(1, 2);
  if (opts.cross_terms == LindleyOptions::CrossTerms::doubled) a4 *= 2.0;
  const double a5 = 0.5 * (u.hess(0, 0) * s(0, 0) + u.hess(1, 1) * s(1, 1) + u.hess(2, 2) * s(2, 2));
  double skew = 0.0;
  for (int k = 0; k < 3; ++k) {
    double su = 0.0;
    for (int i = 0; i < 3; ++i) su += u.grad[i] * s(k, i);
    skew += ctx.abc[k] * su;
  }
  return u.value + prior_term + a4 + a5 + 0.5 * skew;
}

namespace {

ClampedEstimate clamp_to(double raw, double lo, double hi) {
  const double v = std::clamp(raw, lo, hi);
  return {v, raw, v != raw};
}

}  // namespace

LindleyResult lindley_params(const Dataset& d, const PriorHyper& h, const FitResult& fit,
                             const LindleyOptions& opts) {
  const auto ctx = lindley_context(d, h, fit, opts);
  LindleyResult res;
  res.alpha_bs = lindley_expectation(ctx, coordinate_u(ctx.mle, 0), opts);
  res.lambda_bs = lindley_expectation(ctx, coordinate_u(ctx.mle, 1), opts);
  res.beta_bs = lindley_expectation(ctx, coordinate_u(ctx.mle, 2), opts);
  res.mle_anchor = fit;
  return res;
}

ClampedEstimate lindley_reliability(const Dataset& d, const PriorHyper& h, const FitResult& fit, double t,
                                    const LindleyOptions& opts) {
  if (!(t > 0.0)) throw DomainError("reliability time must be positive");
  const auto ctx = lindley_context(d, h, fit, opts);
  return clamp_to(lindley_expectation(ctx, reliability_u(ctx.mle, t), opts), 0.0, 1.0);
}

ClampedEstimate lindley_hazard(const Dataset& d, const PriorHyper& h, const FitResult& fit, double t,
                               const LindleyOptions& opts) {
  if (!(t > 0.0)) throw DomainError("hazard time must be positive");
  const auto ctx = lindley_context(d, h, fit, opts);
  return clamp_to(lindley_expectation(ctx, hazard_u(ctx.mle, t), opts), 0.0,
                  std::numeric_limits<double>::infinity());
}

LindleyResult lindley_all(const Dataset& d, const PriorHyper& h, const FitResult& fit, double t,
                          const LindleyOptions& opts) {
  if (!(t > 0.0)) throw DomainError("evaluation time must be positive");
  const auto ctx = lindley_context(d, h, fit, opts);
  LindleyResult res;
  res.alpha_bs = lindley_expectation(ctx, coordinate_u(ctx.mle, 0), opts);
  res.lambda_bs = lindley_expectation(ctx, coordinate_u(ctx.mle, 1), opts);
  res.beta_bs = lindley_expectation(ctx, coordinate_u(ctx.mle, 2), opts);
  res.t = t;
  res.reliability_bs = clamp_to(lindley_expectation(ctx, reliability_u(ctx.mle, t), opts), 0.0, 1.0);
  res.hazard_bs = clamp_to(lindley_expectation(ctx, hazard_u(ctx.mle, t), opts), 0.0,
                           std::numeric_limits<double>::infinity());
  res.mle_anchor = fit;
  return res;
}

}  // namespace mexed

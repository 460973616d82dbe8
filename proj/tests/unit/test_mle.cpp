#include <doctest.h>

#include <cmath>

#include "../oracles/finite_difference.hpp"
#include "../support/fixtures.hpp"
#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/kernels.hpp"
#include "mexed/likelihood.hpp"
#include "mexed/mle.hpp"
#include "mexed/optimize.hpp"

using namespace mexed;

TEST_CASE("serial and OpenMP kernels agree") {
  const Dataset d = sample(Params(0.7, 0.4, 0.2), 20000, 11);
  const Params p(0.65, 0.45, 0.18);
  const auto s = kernels::serial::likelihood(p, d.values(), kernels::Order::third);
  const auto o = kernels::omp::likelihood(p, d.values(), kernels::Order::third);
  const auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(a)); };
  CHECK(rel(s.value, o.value) < 1e-12);
  for (int i = 0; i < 3; ++i) CHECK(rel(s.gradient[i], o.gradient[i]) < 1e-12);
  for (int i = 0; i < 6; ++i) CHECK(rel(s.hessian[i], o.hessian[i]) < 1e-12);
  for (int i = 0; i < 10; ++i) CHECK(rel(s.third[i], o.third[i]) < 1e-12);
}

TEST_CASE("packed tensor indexing is symmetric") {
  CHECK(kernels::packed2(0, 2) == kernels::packed2(2, 0));
  CHECK(kernels::packed3(0, 1, 2) == kernels::packed3(2, 0, 1));
  CHECK(kernels::packed3(2, 2, 1) == 8);
  CHECK(kernels::packed3(0, 0, 0) == 0);
  CHECK(kernels::packed3(2, 2, 2) == 9);
}

TEST_CASE("log-likelihood equals the sum of log densities") {
  const Dataset d(fixtures::aircond());
  const Params p(0.3, 0.05, 0.004);
  double s = 0.0;
  for (double x : d.values()) s += log_pdf(p, x);
  CHECK(log_likelihood(p, d) == doctest::Approx(s).epsilon(1e-12));
  CHECK(log_likelihood(-1.0, 0.1, 0.1, d.values()) == -INFINITY);
}

TEST_CASE("score and information against finite differences") {
  const Dataset d = sample(Params(1.2, 0.6, 0.3), 60, 5);
  const oracle::Point p{1.1, 0.5, 0.35};
  auto f = [&](const oracle::Point& q) { return log_likelihood(q[0], q[1], q[2], d.values()); };
  const oracle::Point step{1e-5 * p[0], 1e-5 * p[1], 1e-5 * p[2]};
  const auto g = oracle::gradient(f, p, step);
  const auto sc = score(Params(p[0], p[1], p[2]), d);
  for (int i = 0; i < 3; ++i) CHECK(oracle::rel_err(sc[i], g[i], 1.0) < 1e-6);
  const oracle::Point step2{1e-4 * p[0], 1e-4 * p[1], 1e-4 * p[2]};
  const auto H = oracle::hessian(f, p, step2);
  const auto I = observed_information(Params(p[0], p[1], p[2]), d);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(oracle::rel_err(-I(i, j), H[i][j], 1.0) < 1e-4);
}

TEST_CASE("bounded BFGS on a shifted quadratic") {
  using optimize::minimize_bfgs;
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(2);
    g(0) = 2.0 * (x(0) + 1.0);
    g(1) = 20.0 * (x(1) - 3.0);
    return (x(0) + 1.0) * (x(0) + 1.0) + 10.0 * (x(1) - 3.0) * (x(1) - 3.0);
  };
  Eigen::VectorXd lower(2);
  lower << 0.0, -1e300;
  const auto r = minimize_bfgs(f, Eigen::Vector2d(2.0, 0.0), lower);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.x(1) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("fit on the bundled data") {
  const Dataset d(fixtures::aircond());
  const FitResult fit = fit_mle(d);
  CHECK(fit.converged);
  CHECK(-fit.loglik == doctest::Approx(151.3478573).epsilon(1e-8));
  CHECK(fit.params_hat.alpha() == doctest::Approx(0.22029206).epsilon(1e-5));
  CHECK(fit.params_hat.lambda() == doctest::Approx(0.04796126).epsilon(1e-5));
  CHECK(fit.params_hat.beta() == doctest::Approx(0.01014912).epsilon(1e-5));
  CHECK(fit.cov_reliable);
  for (int j = 0; j < 3; ++j) {
    CHECK(fit.ci[j].lower >= 0.0);
    CHECK(fit.ci[j].upper > fit.params_hat.as_array()[j]);
  }
  // covariance is the inverse of the observed information
  const Eigen::Matrix3d prod = fit.info_matrix * fit.cov_matrix;
  CHECK((prod - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(plugin_reliability(fit, 10.0) == doctest::Approx(survival(fit.params_hat, 10.0)));
  CHECK(plugin_hazard(fit, 10.0) == doctest::Approx(hazard(fit.params_hat, 10.0)));
}

TEST_CASE("fit is identical with and without parallel starts") {
  const Dataset d(fixtures::aircond());
  FitOptions serial;
  serial.parallel_starts = false;
  const FitResult a = fit_mle(d);
  const FitResult b = fit_mle(d, serial);
  CHECK(a.params_hat == b.params_hat);
  CHECK(a.loglik == b.loglik);
}

TEST_CASE("profile fit with beta fixed at zero recovers the two-parameter model") {
  const Dataset d(fixtures::aircond());
  FitOptions o;
  o.fixed[2] = 0.0;
  const FitResult fit = fit_mle(d, o);
  CHECK(fit.params_hat.beta() == 0.0);
  CHECK(fit.fixed[2]);
  // extended exponential optimum on this data
  CHECK(-fit.loglik == doctest::Approx(151.58150).epsilon(1e-6));
  CHECK(fit.params_hat.alpha() == doctest::Approx(0.5985).epsilon(1e-3));
  CHECK(fit.params_hat.lambda() == doctest::Approx(0.04339).epsilon(1e-3));
}

TEST_CASE("exponential data: fitted law stays close to the generating one") {
  const Dataset d = sample(Params(1.0, 0.5, 0.0), 4000, 3);
  const FitResult fit = fit_mle(d);
  CHECK(fit.converged);
  // the extra shape parameters are weakly identified, so compare laws, not coordinates
  CHECK(mean_and_variance(fit.params_hat).first == doctest::Approx(d.mean()).epsilon(0.02));
  for (double t : {0.5, 2.0, 6.0}) CHECK(std::fabs(cdf(fit.params_hat, t) - (1.0 - std::exp(-0.5 * t))) < 0.02);
  FitOptions nested;
  nested.fixed[2] = 0.0;
  CHECK(fit.loglik >= fit_mle(d, nested).loglik - 1e-9);
}

TEST_CASE("fit input errors") {
  CHECK_THROWS_AS(fit_mle(Dataset({1.0})), InsufficientDataError);
  CHECK_THROWS_AS(two_sided_z(1.0), ValidationError);
  CHECK(two_sided_z(0.95) == doctest::Approx(1.959963985));
}

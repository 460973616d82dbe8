#include <doctest.h>

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "../oracles/ks.hpp"
#include "../oracles/pdf_oracle.hpp"
#include "../support/fixtures.hpp"
#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/special.hpp"

using namespace mexed;

namespace {

double integrate_density(const Params& p, int power) {
  boost::math::quadrature::exp_sinh<double> tail;
  const double m = median(p);
  boost::math::quadrature::tanh_sinh<double> body;
  auto f = [&](double x) { return std::pow(x, power) * pdf(p, x); };
  return body.integrate(f, 0.0, m) + tail.integrate([&](double u) { return f(m + u); });
}

}  // namespace

TEST_CASE("params and dataset invariants") {
  CHECK_THROWS_AS(Params(0.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(Params(1.0, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(Params(1.0, -1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Params(1.0, NAN, 1.0), ValidationError);
  CHECK_NOTHROW(Params(1.0, 0.0, 1.0));
  CHECK_THROWS_AS(Dataset({}), ValidationError);
  CHECK_THROWS_AS(Dataset({1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(Dataset({1.0, INFINITY}), ValidationError);
  const Dataset d({3.0, 1.0, 2.0});
  CHECK(d.mean() == doctest::Approx(2.0));
  CHECK(d.sorted() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("density integrates to one") {
  for (const auto& p : fixtures::parameter_grid()) {
    CAPTURE(p.alpha());
    CAPTURE(p.lambda());
    CAPTURE(p.beta());
    CHECK(std::fabs(integrate_density(p, 0) - 1.0) < 1e-6);
  }
}

TEST_CASE("cdf derivative matches pdf") {
  for (const auto& p : fixtures::parameter_grid()) {
    for (double q : {0.05, 0.3, 0.5, 0.8, 0.97}) {
      const double x = quantile(p, q);
      const double h = 1e-5 * std::max(x, 1e-3);
      const double fd = (cdf(p, x + h) - cdf(p, x - h)) / (2.0 * h);
      CHECK(std::fabs(fd - pdf(p, x)) <= 1e-6 * std::max(1.0, pdf(p, x)));
    }
  }
}

TEST_CASE("quantile round trip") {
  for (const auto& p : fixtures::parameter_grid()) {
    for (double q : {1e-8, 1e-3, 0.1, 0.5, 0.9, 0.999, 1.0 - 1e-9}) {
      const double x = quantile(p, q);
      CHECK(std::fabs(cdf(p, x) - q) <= 1e-8 * q);
    }
    CHECK(quantile(p, 0.0) == 0.0);
  }
  const Params p(1.0, 1.0, 0.5);
  CHECK_THROWS_AS(quantile(p, 1.0), DomainError);
  CHECK_THROWS_AS(quantile(p, -0.1), DomainError);
  CHECK_THROWS_AS(quantile(p, NAN), DomainError);
}

TEST_CASE("hazard, survival and cumulative hazard identities") {
  for (const auto& p : fixtures::parameter_grid()) {
    for (double q : {0.01, 0.25, 0.5, 0.75, 0.99}) {
      const double t = quantile(p, q);
      CHECK(std::fabs(hazard(p, t) * survival(p, t) - pdf(p, t)) <= 1e-10 * pdf(p, t));
      CHECK(std::fabs(cum_hazard(p, t) + std::log(survival(p, t))) <= 1e-10 * std::max(1.0, cum_hazard(p, t)));
      CHECK(std::fabs(cdf(p, t) + survival(p, t) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("negative arguments") {
  const Params p(1.5, 0.5, 0.2);
  CHECK(pdf(p, -1.0) == 0.0);
  CHECK(cdf(p, -1.0) == 0.0);
  CHECK(survival(p, -1.0) == 1.0);
  CHECK(hazard(p, -1.0) == 0.0);
  CHECK(cum_hazard(p, -1.0) == 0.0);
  CHECK(log_pdf(p, -1.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("exponential reduction") {
  for (double rate : {0.01, 0.5, 3.0}) {
    const Params p(1.0, rate, 0.0);
    for (double x : {0.0, 0.1, 1.0, 7.5, 40.0}) {
      const double f = rate * std::exp(-rate * x);
      CHECK(std::fabs(pdf(p, x) - f) <= 1e-12 * f);
      CHECK(std::fabs(survival(p, x) - std::exp(-rate * x)) <= 1e-12 * std::exp(-rate * x));
      CHECK(std::fabs(hazard(p, x) - rate) <= 1e-12 * rate);
    }
  }
}

TEST_CASE("density against 50-digit evaluation") {
  for (const auto& p : fixtures::parameter_grid()) {
    for (double q : {1e-6, 0.2, 0.5, 0.9, 0.9999}) {
      const double x = quantile(p, q);
      const double ref = oracle::pdf_big(p.alpha(), p.lambda(), p.beta(), x);
      CHECK(std::fabs(pdf(p, x) - ref) <= 1e-12 * ref);
      const double sref = oracle::survival_big(p.alpha(), p.lambda(), p.beta(), x);
      CHECK(std::fabs(survival(p, x) - sref) <= 1e-12 * sref);
    }
  }
}

TEST_CASE("median and mode") {
  const Params p(2.0, 1.0, 1.0);
  CHECK(cdf(p, median(p)) == doctest::Approx(0.5).epsilon(1e-12));
  const double m = mode(p);
  CHECK(m > 0.0);
  const double h = 1e-4;
  CHECK(pdf(p, m) >= pdf(p, m + h));
  CHECK(pdf(p, m) >= pdf(p, m - h));
  // decreasing density: mode at the origin
  CHECK(mode(Params(0.3, 1.0, 0.0)) == 0.0);
  CHECK(mode(Params(1.0, 1.0, 0.0)) == 0.0);
}

TEST_CASE("moments by quadrature") {
  for (const auto& p : fixtures::parameter_grid()) {
    for (int r : {1, 2}) {
      MomentSpec spec;
      spec.order = r;
      const double ref = integrate_density(p, r);
      CHECK(std::fabs(moment(p, spec) - ref) <= 1e-8 * ref);
    }
  }
  const auto [mean, var] = mean_and_variance(Params(1.0, 2.0, 0.0));
  CHECK(mean == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(var == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("moment series agrees with quadrature where it converges") {
  for (auto [p, r] : {std::pair{Params(1.5, 1.0, 0.01), 1}, std::pair{Params(2.0, 1.0, 0.01), 2},
                      std::pair{Params(1.2, 2.0, 0.02), 1}}) {
    MomentSpec q;
    q.order = r;
    MomentSpec s = q;
    s.method = MomentMethod::series;
    CHECK(std::fabs(moment(p, s) - moment(p, q)) <= 1e-4 * moment(p, q));
  }
}

TEST_CASE("moment series refuses divergent and unsupported regimes") {
  MomentSpec s;
  s.method = MomentMethod::series;
  CHECK_THROWS_AS(moment(Params(1.5, 1.0, 0.2), s), NumericError);
  CHECK_THROWS_AS(moment(Params(1.5, 1.0, 0.3), s), UnsupportedRegimeError);
  CHECK_THROWS_AS(moment(Params(1.5, 1.0, 0.0), s), UnsupportedRegimeError);
  MomentSpec bad;
  bad.order = 0;
  CHECK_THROWS_AS(moment(Params(1.0, 1.0, 0.0), bad), ValidationError);
}

TEST_CASE("upper incomplete gamma at one") {
  for (double s : {0.05, 0.5, 1.0, 1.5, 3.0, 10.0, 40.0, 120.0}) {
    CAPTURE(s);
    const double g = special::upper_incomplete_gamma_at_one(s);
    CHECK(std::fabs(special::upper_incomplete_gamma_at_one(s + 1.0) - (s * g + std::exp(-1.0))) <= 1e-12 * (s * g));
  }
  CHECK(special::binomial(0.5, 2) == doctest::Approx(-0.125));
  CHECK(special::binomial(5.0, 0) == 1.0);
}

TEST_CASE("seeded sampling") {
  const Params p(0.8, 0.5, 0.3);
  const Dataset a = sample(p, 2000, 42);
  const Dataset b = sample(p, 2000, 42);
  const Dataset c = sample(p, 2000, 43);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  const double d = oracle::ks_statistic({a.values().begin(), a.values().end()}, [&](double x) { return cdf(p, x); });
  CHECK(oracle::ks_pvalue(d, a.size()) > 0.01);
}

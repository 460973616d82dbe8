#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/gamma.hpp>

#include "../oracles/ks.hpp"
#include "../support/fixtures.hpp"
#include "mexed/error.hpp"
#include "mexed/hpd.hpp"
#include "mexed/mcmc.hpp"
#include "mexed/mle.hpp"

using namespace mexed;

TEST_CASE("chain configuration validation") {
  McmcConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.retained() == 10000);
  c.burn_in = c.chain_length;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = McmcConfig{};
  c.thin = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = McmcConfig{};
  c.chain_length = 1000;
  c.burn_in = 900;
  c.thin = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = McmcConfig{};
  c.proposal_scales[1] = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("full conditionals differ from the joint only by the other priors") {
  const Dataset d(fixtures::aircond());
  const PriorHyper h{2.0, 3.0, 1.5, 10.0, 1.2, 50.0};
  const PosteriorTarget target(d, h);
  const Params p(0.3, 0.05, 0.01);
  const Params q(0.3, 0.07, 0.01);
  const double joint = target.log_posterior(q) - target.log_posterior(p);
  const double cond = target.log_full_conditional(Coordinate::lambda, q) - target.log_full_conditional(Coordinate::lambda, p);
  CHECK(joint == doctest::Approx(cond).epsilon(1e-12));
  CHECK(log_full_conditional(Coordinate::lambda, q, d, h) == doctest::Approx(target.log_full_conditional(Coordinate::lambda, q)));
}

TEST_CASE("chains are deterministic under a fixed seed") {
  const Dataset d(fixtures::aircond());
  McmcConfig c;
  c.chain_length = 4000;
  c.burn_in = 1000;
  c.thin = 3;
  c.seed = 17;
  const FitResult fit = fit_mle(d);
  const Params start = chain_start(d, PriorHyper::non_informative(), &fit);
  const auto a = run_chain(d, PriorHyper::non_informative(), c, start);
  const auto b = run_chain(d, PriorHyper::non_informative(), c, start);
  CHECK(a.draws == b.draws);
  CHECK(a.draws.size() == c.retained());
  CHECK(a.iterations.front() == 1003);
  CHECK(a.iterations.back() == 4000);
  c.seed = 18;
  const auto e = run_chain(d, PriorHyper::non_informative(), c, start);
  CHECK(a.draws != e.draws);
}

TEST_CASE("adapted acceptance rates on the bundled data") {
  const Dataset d(fixtures::aircond());
  const FitResult fit = fit_mle(d);
  const McmcConfig c;
  const auto ch = run_chain(d, PriorHyper::non_informative(), c, chain_start(d, PriorHyper::non_informative(), &fit));
  for (double r : ch.accept_rates) {
    CHECK(r > 0.2);
    CHECK(r < 0.5);
  }
}

TEST_CASE("prior-only chain reproduces the gamma priors") {
  const PriorHyper h{2.0, 4.0, 3.0, 1.0, 0.7, 2.0};
  McmcConfig c;
  c.chain_length = 52000;
  c.burn_in = 2000;
  c.thin = 10;
  c.seed = 5;
  const auto ch = run_chain(PosteriorTarget::prior_only(h), c, Params(0.5, 3.0, 0.3));
  const std::array<std::pair<double, double>, 3> shape_rate{{{h.a, h.b}, {h.c, h.d}, {h.g, h.f}}};
  for (int j = 0; j < 3; ++j) {
    boost::math::gamma_distribution<double> g(shape_rate[j].first, 1.0 / shape_rate[j].second);
    const auto x = ch.coordinate(static_cast<Coordinate>(j));
    const double D = oracle::ks_statistic(x, [&](double v) { return boost::math::cdf(g, v); });
    CHECK(oracle::ks_pvalue(D, x.size()) > 0.01);
  }
}

TEST_CASE("chain start falls back when the MLE has no posterior density") {
  const Dataset d(fixtures::aircond());
  FitResult fake;
  fake.params_hat = Params(1e12, 1e-12, 1e-12);
  const Params s = chain_start(d, PriorHyper{5, 10, 5, 5, 5, 10}, &fake);
  CHECK(s.alpha() == 1.0);
  McmcConfig c;
  CHECK_THROWS_AS(run_chain(d, PriorHyper{5, 10, 5, 5, 5, 10}, c, Params(1e300, 1e300, 1e300)), NumericError);
}

TEST_CASE("posterior summaries") {
  PosteriorChain ch;
  for (int i = 1; i <= 100; ++i) ch.draws.push_back({0.01 * i, 1.0, 0.5});
  const auto m = posterior_means(ch);
  CHECK(m[0] == doctest::Approx(0.505));
  const auto hpd = hpd_intervals(ch, 0.9);
  CHECK(hpd[0].length() == doctest::Approx(0.89));
  CHECK_THROWS_AS(posterior_means(PosteriorChain{}), InsufficientDataError);
}

#include <doctest.h>

#include <cmath>

#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/mle.hpp"
#include "mexed/random.hpp"
#include "mexed/sim_study.hpp"

using namespace mexed;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.sample_sizes = {30};
  c.replications = 6;
  c.priors = {{"flat", PriorHyper::non_informative()}, {"centered", PriorHyper{5, 10, 5, 5, 5, 10}}};
  c.mcmc.chain_length = 1500;
  c.mcmc.burn_in = 500;
  c.mcmc.thin = 2;
  return c;
}

}  // namespace

TEST_CASE("configuration validation") {
  SimConfig c;
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.sample_sizes = {4};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.priors = {{"x", {}}, {"x", {}}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.estimators = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_estimator("lindley") == Estimator::lindley);
  CHECK_THROWS_AS(parse_estimator("map"), ConfigError);
}

TEST_CASE("single replication: risk is the squared error") {
  SimConfig c;
  c.sample_sizes = {40};
  c.replications = 1;
  c.estimators = {Estimator::mle};
  const RiskTable t = run_study(c);
  const Dataset d = sample(c.true_params, 40, derive_seed(c.seed, 40, 0));
  FitOptions fo;
  fo.parallel_starts = false;
  const FitResult fit = fit_mle(d, fo);
  for (int j = 0; j < 3; ++j) {
    const auto& row = t.find(40, Estimator::mle, "", j);
    const double e = fit.params_hat.as_array()[j] - c.true_params.as_array()[j];
    CHECK(row.risk == e * e);
    CHECK(row.bias == e);
  }
}

TEST_CASE("serial and parallel execution give identical tables") {
  const SimConfig c = small_config();
  const RiskTable a = run_study(c, Execution::parallel);
  const RiskTable b = run_study(c, Execution::serial);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    CHECK(((x.risk == y.risk) || (std::isnan(x.risk) && std::isnan(y.risk))));
    CHECK(((x.coverage == y.coverage) || (std::isnan(x.coverage) && std::isnan(y.coverage))));
    CHECK(x.used == y.used);
  }
  CHECK(a.exclusions == b.exclusions);
}

TEST_CASE("table shape and invariants") {
  const SimConfig c = small_config();
  const RiskTable t = run_study(c);
  // mle: 3 rows; lindley and mcmc: 3 rows per prior
  CHECK(t.rows.size() == 3 + 2 * 3 * 2);
  for (const auto& r : t.rows) {
    CHECK(r.used + r.excluded == c.replications);
    if (r.used > 0) CHECK(r.risk >= 0.0);
    if (r.has_interval && r.used > 0) {
      CHECK(r.coverage >= 0.0);
      CHECK(r.coverage <= 1.0);
    }
  }
  CHECK_THROWS_AS(t.find(30, Estimator::mcmc, "nope", 0), ValidationError);
}

TEST_CASE("coverage report") {
  SimConfig c;
  c.sample_sizes = {50};
  c.replications = 20;
  c.estimators = {Estimator::mle};
  c.interval_level = 1.0;
  const RiskTable full = run_study(c);
  const auto rows = coverage_report(full, 1.0);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.coverage == 1.0);
    CHECK(r.flag == "degenerate");
  }
  c.interval_level = 0.95;
  const auto normal = coverage_report(run_study(c), 0.95);
  for (const auto& r : normal) {
    CHECK(r.mc_error >= 0.0);
    CHECK(r.nominal == 0.95);
  }
}

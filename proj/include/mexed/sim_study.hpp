#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mexed/lindley.hpp"
#include "mexed/mcmc.hpp"
#include "mexed/params.hpp"

namespace mexed {

enum class Estimator { mle, lindley, mcmc };

std::string_view estimator_name(Estimator e);
/// Accepts "mle", "lindley", "mcmc"; throws ConfigError otherwise.
Estimator parse_estimator(std::string_view name);

struct LabeledPrior {
  std::string label;
  PriorHyper hyper;
};

struct SimConfig {
  Params true_params{0.5, 1.0, 0.5};
  std::vector<std::size_t> sample_sizes{20, 50, 100};
  std::size_t replications = 500;
  std::vector<LabeledPrior> priors{{"noninformative", PriorHyper::non_informative()}};
  std::vector<Estimator> estimators{Estimator::mle, Estimator::lindley, Estimator::mcmc};
  std::uint64_t seed = 1;
  McmcConfig mcmc = default_mcmc();
  /// Level of the Wald intervals (mle) and HPD intervals (mcmc); 1.0 gives [0, inf).
  double interval_level = 0.95;

  /// Chain settings used per replication: shorter than the single-fit default.
  static McmcConfig default_mcmc();
  /// Throws ConfigError: R >= 1, every n >= 5, at least one estimator, priors
  /// present when a Bayes estimator is requested, labels unique.
  void validate() const;
};

struct RiskRow {
  std::size_t n = 0;
  Estimator estimator = Estimator::mle;
  /// Empty for the mle rows.
  std::string prior;
  /// 0 alpha, 1 lambda, 2 beta.
  int parameter = 0;
  /// Mean squared error over the replications that produced an estimate.
  double risk = 0.0;
  double bias = 0.0;
  /// Interval rows only (mle and mcmc); NaN otherwise.
  double coverage = 0.0;
  double mean_length = 0.0;
  bool has_interval = false;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

struct RiskTable {
  SimConfig config;
  std::vector<RiskRow> rows;
  /// One line per excluded replication: "n=.. rep=.. estimator=..: reason".
  std::vector<std::string> exclusions;

  const RiskRow& find(std::size_t n, Estimator e, std::string_view prior, int parameter) const;
};

enum class Execution { parallel, serial };

/// Monte Carlo study.  Replication r at sample size n draws its data with seed
/// derive_seed(cfg.seed, n, r); results are accumulated in replication order,
/// so serial and parallel execution give identical tables.
RiskTable run_study(const SimConfig& cfg, Execution exec = Execution::parallel);

struct CoverageRow {
  std::size_t n = 0;
  Estimator estimator = Estimator::mle;
  std::string prior;
  int parameter = 0;
  double coverage = 0.0;
  /// Binomial Monte Carlo standard error sqrt(p (1 - p) / used).
  double mc_error = 0.0;
  double nominal = 0.0;
  std::size_t used = 0;
  /// "degenerate" for nominal 1.0 or a zero-variance proportion, "outside" when
  /// the proportion is more than 3 MC errors from nominal, empty otherwise.
  std::string flag;
};

std::vector<CoverageRow> coverage_report(const RiskTable& tbl, double nominal);

}  // namespace mexed

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mexed/hpd.hpp"
#include "mexed/lindley.hpp"
#include "mexed/params.hpp"

namespace mexed {

enum class Coordinate { alpha = 0, lambda = 1, beta = 2 };

struct McmcConfig {
  /// Total iterations M, burn-in included.
  std::size_t chain_length = 50000;
  std::size_t burn_in = 10000;
  std::size_t thin = 4;
  std::uint64_t seed = 1;
  /// Random-walk standard deviations on log(alpha), log(lambda), log(beta).
  std::array<double, 3> proposal_scales{0.3, 0.3, 0.5};
  /// Robbins-Monro tuning of the scales during burn-in; frozen afterwards.
  bool adapt = true;
  std::pair<double, double> target_accept_range{0.2, 0.5};

  std::size_t retained() const noexcept;
  /// Throws ConfigError unless burn_in < chain_length, thin >= 1, scales > 0 and
  /// at least 100 draws are retained.
  void validate() const;
};

/// Unnormalized log posterior: log-likelihood of the data plus log gamma priors.
/// prior_only() builds the data-free target (the n = 0 case).
class PosteriorTarget {
 public:
  PosteriorTarget(const Dataset& d, const PriorHyper& h);
  static PosteriorTarget prior_only(const PriorHyper& h);

  std::span<const double> data() const noexcept { return data_; }
  const PriorHyper& hyper() const noexcept { return hyper_; }

  double log_posterior(const Params& p) const;
  /// Log of the full conditional kernel of one coordinate: the log posterior
  /// without the prior factors of the other two coordinates.
  double log_full_conditional(Coordinate which, const Params& p) const;

 private:
  PosteriorTarget(std::span<const double> data, const PriorHyper& h) : data_(data), hyper_(h) {}
  std::span<const double> data_;
  PriorHyper hyper_;
};

double log_full_conditional(Coordinate which, const Params& p, const Dataset& d, const PriorHyper& h);

struct PosteriorChain {
  /// Retained (alpha, lambda, beta) draws after burn-in and thinning.
  std::vector<std::array<double, 3>> draws;
  /// 1-based iteration number of each retained draw.
  std::vector<std::size_t> iterations;
  /// Post-burn-in acceptance rates per coordinate.
  std::array<double, 3> accept_rates{};
  /// Proposal scales in force after burn-in.
  std::array<double, 3> final_scales{};
  std::uint64_t seed = 0;
  McmcConfig config;

  /// Values of one coordinate across the retained draws.
  std::vector<double> coordinate(Coordinate c) const;
};

/// Metropolis-Hastings within Gibbs: each sweep updates alpha, lambda, beta in
/// turn by a Gaussian random walk on the log scale (Jacobian included).
/// Deterministic given cfg.seed.
PosteriorChain run_chain(const Dataset& d, const PriorHyper& h, const McmcConfig& cfg, const Params& init);
PosteriorChain run_chain(const PosteriorTarget& target, const McmcConfig& cfg, const Params& init);

/// Chain start: the MLE moved off the boundary, unless the default initializer
/// has higher posterior density (or the MLE has none).
Params chain_start(const Dataset& d, const PriorHyper& h, const FitResult* fit);

std::array<double, 3> posterior_means(const PosteriorChain& ch);
/// Mean over draws of R(t).
double posterior_reliability(const PosteriorChain& ch, double t);
/// Mean over draws of h(t).
double posterior_hazard(const PosteriorChain& ch, double t);
/// HPD interval per coordinate.
std::array<HpdInterval, 3> hpd_intervals(const PosteriorChain& ch, double level);

}  // namespace mexed

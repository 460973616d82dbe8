#include "mexed/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/likelihood.hpp"
#include "mexed/mle.hpp"
#include "mexed/random.hpp"

namespace mexed {

std::size_t McmcConfig::retained() const noexcept {
  if (burn_in >= chain_length || thin == 0) return 0;
  return (chain_length - burn_in) / thin;
}

void McmcConfig::validate() const {
  if (thin < 1) throw ConfigError("mcmc: thin must be >= 1");
  if (burn_in >= chain_length) throw ConfigError("mcmc: burn_in must be smaller than chain_length");
  for (double s : proposal_scales)
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("mcmc: proposal scales must be positive");
  const auto [lo, hi] = target_accept_range;
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) throw ConfigError("mcmc: target acceptance range must satisfy 0 < lo < hi < 1");
  if (retained() < 100) {
    std::ostringstream msg;
    msg << "mcmc: (chain_length - burn_in) / thin = " << retained() << " retained draws, need at least 100";
    throw ConfigError(msg.str());
  }
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gamma_kernel(double shape, double rate, double x) {
  if (!(x > 0.0)) return kNegInf;
  return (shape - 1.0) * std::log(x) - rate * x;
}

double coordinate_prior(const PriorHyper& h, int j, double x) {
  switch (j) {
    case 0: return gamma_kernel(h.a, h.b, x);
    case 1: return gamma_kernel(h.c, h.d, x);
    default: return gamma_kernel(h.g, h.f, x);
  }
}

double data_loglik(const Params& p, std::span<const double> x) {
  if (x.empty()) return 0.0;
  return log_likelihood(p.alpha(), p.lambda(), p.beta(), x);
}

// Per-observation caches so that an alpha update costs one exp per point and
// a lambda/beta update one exp and two logs per point.
class SamplerState {
 public:
  SamplerState(std::span<const double> x, const Params& p) : x_(x), theta_(p.as_array()), lz_(x.size()) {
    rebuild(theta_[1], theta_[2], lz_, sum_lz_, sum_log_rate_);
    sum_w_ = sum_w(theta_[0], lz_);
  }

  double theta(int j) const { return theta_[j]; }

  // Conditional log kernel of alpha (likelihood part).
  double alpha_part(double a, double sw) const {
    const double n = static_cast<double>(x_.size());
    return n * std::log(a) + (a - 1.0) * sum_lz_ - sw;
  }

  double sum_w(double a, const std::vector<double>& lz) const {
    double s = 0.0;
    for (double v : lz) s += std::exp(a * v);
    return s;
  }

  void rebuild(double l, double b, std::vector<double>& lz, double& sum_lz, double& sum_log_rate) const {
    sum_lz = 0.0;
    sum_log_rate = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double xi = x_[i];
      lz[i] = std::log1p(xi * (l + b * xi));
      sum_lz += lz[i];
      sum_log_rate += std::log(l + 2.0 * b * xi);
    }
  }

  // Returns the log acceptance ratio contribution (target part) and applies
  // the move when accept(ratio) is true.
  template <typename Accept>
  bool update_alpha(double proposal, const PriorHyper& h, Accept&& accept) {
    const double sw_new = sum_w(proposal, lz_);
    const double delta = coordinate_prior(h, 0, proposal) + alpha_part(proposal, sw_new) -
                         coordinate_prior(h, 0, theta_[0]) - alpha_part(theta_[0], sum_w_);
    if (!accept(delta)) return false;
    theta_[0] = proposal;
    sum_w_ = sw_new;
    return true;
  }

  template <typename Accept>
  bool update_rate(int j, double proposal, const PriorHyper& h, Accept&& accept) {
    const double l = j == 1 ? proposal : theta_[1];
    const double b = j == 2 ? proposal : theta_[2];
    scratch_.resize(x_.size());
    double sum_lz_new = 0.0;
    double sum_log_rate_new = 0.0;
    rebuild(l, b, scratch_, sum_lz_new, sum_log_rate_new);
    const double a = theta_[0];
    const double sw_new = sum_w(a, scratch_);
    const double lik_new = sum_log_rate_new + (a - 1.0) * sum_lz_new - sw_new;
    const double lik_old = sum_log_rate_ + (a - 1.0) * sum_lz_ - sum_w_;
    const double delta = coordinate_prior(h, j, proposal) + lik_new - coordinate_prior(h, j, theta_[j]) - lik_old;
    if (!std::isfinite(lik_new) || !accept(delta)) return false;
    theta_[j] = proposal;
    lz_.swap(scratch_);
    sum_lz_ = sum_lz_new;
    sum_log_rate_ = sum_log_rate_new;
    sum_w_ = sw_new;
    return true;
  }

 private:
  std::span<const double> x_;
  std::array<double, 3> theta_;
  std::vector<double> lz_;
  std::vector<double> scratch_;
  double sum_lz_ = 0.0;
  double sum_log_rate_ = 0.0;
  double sum_w_ = 0.0;
};

}  // namespace

PosteriorTarget::PosteriorTarget(const Dataset& d, const PriorHyper& h) : data_(d.values()), hyper_(h) {
  hyper_.validate();
}

PosteriorTarget PosteriorTarget::prior_only(const PriorHyper& h) {
  h.validate();
  return PosteriorTarget(std::span<const double>{}, h);
}

double PosteriorTarget::log_posterior(const Params& p) const {
  double lp = 0.0;
  for (int j = 0; j < 3; ++j) lp += coordinate_prior(hyper_, j, p.as_array()[j]);
  return lp + data_loglik(p, data_);
}

double PosteriorTarget::log_full_conditional(Coordinate which, const Params& p) const {
  const int j = static_cast<int>(which);
  return coordinate_prior(hyper_, j, p.as_array()[j]) + data_loglik(p, data_);
}

double log_full_conditional(Coordinate which, const Params& p, const Dataset& d, const PriorHyper& h) {
  return PosteriorTarget(d, h).log_full_conditional(which, p);
}

std::vector<double> PosteriorChain::coordinate(Coordinate c) const {
  const int j = static_cast<int>(c);
  std::vector<double> out(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) out[k] = draws[k][j];
  return out;
}

PosteriorChain run_chain(const Dataset& d, const PriorHyper& h, const McmcConfig& cfg, const Params& init) {
  return run_chain(PosteriorTarget(d, h), cfg, init);
}

PosteriorChain run_chain(const PosteriorTarget& target, const McmcConfig& cfg, const Params& init) {
  cfg.validate();
  if (!(init.lambda() > 0.0 && init.beta() > 0.0)) throw ValidationError("mcmc: initial point must be interior");
  if (!std::isfinite(target.log_posterior(init)))
    throw NumericError("mcmc: posterior density is zero or not finite at the initial point");

  const PriorHyper& h = target.hyper();
  SamplerState state(target.data(), init);
  Rng rng(cfg.seed);
  std::array<double, 3> log_scale;
  for (int j = 0; j < 3; ++j) log_scale[j] = std::log(cfg.proposal_scales[j]);
  const double target_rate = 0.5 * (cfg.target_accept_range.first + cfg.target_accept_range.second);

  PosteriorChain chain;
  chain.seed = cfg.seed;
  chain.config = cfg;
  chain.draws.reserve(cfg.retained());
  chain.iterations.reserve(cfg.retained());
  std::array<std::size_t, 3> accepted{};

  for (std::size_t it = 1; it <= cfg.chain_length; ++it) {
    const bool burning = it <= cfg.burn_in;
    for (int j = 0; j < 3; ++j) {
      const double step = std::exp(log_scale[j]) * rng.normal();
      const double proposal = state.theta(j) * std::exp(step);
      const double log_u = std::log(rng.uniform());
      // `step` is the log-Jacobian of the move on the log scale.
      auto accept = [&](double delta) { return log_u < delta + step; };
      const bool ok = proposal > 0.0 && std::isfinite(proposal) &&
                      (j == 0 ? state.update_alpha(proposal, h, accept) : state.update_rate(j, proposal, h, accept));
      if (burning) {
        if (cfg.adapt) {
          const double gain = 1.0 / std::pow(static_cast<double>(it), 0.6);
          log_scale[j] += gain * ((ok ? 1.0 : 0.0) - target_rate);
        }
      } else if (ok) {
        ++accepted[j];
      }
    }
    if (!burning && (it - cfg.burn_in) % cfg.thin == 0) {
      chain.draws.push_back({state.theta(0), state.theta(1), state.theta(2)});
      chain.iterations.push_back(it);
    }
  }
  const double post = static_cast<double>(cfg.chain_length - cfg.burn_in);
  for (int j = 0; j < 3; ++j) {
    chain.accept_rates[j] = static_cast<double>(accepted[j]) / post;
    chain.final_scales[j] = std::exp(log_scale[j]);
  }
  return chain;
}

Params chain_start(const Dataset& d, const PriorHyper& h, const FitResult* fit) {
  const double xbar = d.mean();
  const Params fallback(1.0, 1.0 / xbar, 1e-3 / (xbar * xbar));
  if (fit == nullptr) return fallback;
  const auto p = fit->params_hat;
  const double l = p.lambda() > 0.0 ? p.lambda() : 1e-3 / xbar;
  const double b = p.beta() > 0.0 ? p.beta() : 1e-3 / (xbar * xbar);
  const Params candidate(p.alpha(), l, b);
  const PosteriorTarget target(d, h);
  const double lc = target.log_posterior(candidate);
  const double lf = target.log_posterior(fallback);
  return std::isfinite(lc) && !(lf > lc) ? candidate : fallback;
}

std::array<double, 3> posterior_means(const PosteriorChain& ch) {
  if (ch.draws.empty()) throw InsufficientDataError("posterior chain is empty");
  std::array<double, 3> sum{};
  for (const auto& d : ch.draws)
    for (int j = 0; j < 3; ++j) sum[j] += d[j];
  const double n = static_cast<double>(ch.draws.size());
  return {sum[0] / n, sum[1] / n, sum[2] / n};
}

double posterior_reliability(const PosteriorChain& ch, double t) {
  if (ch.draws.empty()) throw InsufficientDataError("posterior chain is empty");
  double sum = 0.0;
  for (const auto& d : ch.draws) sum += survival(Params(d[0], d[1], d[2]), t);
  return sum / static_cast<double>(ch.draws.size());
}

double posterior_hazard(const PosteriorChain& ch, double t) {
  if (ch.draws.empty()) throw InsufficientDataError("posterior chain is empty");
  double sum = 0.0;
  for (const auto& d : ch.draws) sum += hazard(Params(d[0], d[1], d[2]), t);
  return sum / static_cast<double>(ch.draws.size());
}

std::array<HpdInterval, 3> hpd_intervals(const PosteriorChain& ch, double level) {
  return {hpd_interval_unsorted(ch.coordinate(Coordinate::alpha), level),
          hpd_interval_unsorted(ch.coordinate(Coordinate::lambda), level),
          hpd_interval_unsorted(ch.coordinate(Coordinate::beta), level)};
}

}  // namespace mexed

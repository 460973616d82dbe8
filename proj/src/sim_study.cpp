#include "mexed/sim_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/mle.hpp"
#include "mexed/random.hpp"

namespace mexed {

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::mle: return "mle";
    case Estimator::lindley: return "lindley";
    case Estimator::mcmc: return "mcmc";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  for (Estimator e : {Estimator::mle, Estimator::lindley, Estimator::mcmc})
    if (estimator_name(e) == name) return e;
  throw ConfigError("unknown estimator '" + std::string(name) + "' (expected mle, lindley or mcmc)");
}

McmcConfig SimConfig::default_mcmc() {
  McmcConfig c;
  c.chain_length = 6000;
  c.burn_in = 1000;
  c.thin = 1;
  return c;
}

void SimConfig::validate() const {
  if (replications < 1) throw ConfigError("simulate: replications must be >= 1");
  if (sample_sizes.empty()) throw ConfigError("simulate: sample_sizes must not be empty");
  for (std::size_t n : sample_sizes)
    if (n < 5) throw ConfigError("simulate: every sample size must be >= 5 (got " + std::to_string(n) + ")");
  if (estimators.empty()) throw ConfigError("simulate: at least one estimator is required");
  const bool bayes = std::any_of(estimators.begin(), estimators.end(), [](Estimator e) { return e != Estimator::mle; });
  if (bayes && priors.empty()) throw ConfigError("simulate: Bayes estimators need at least one prior");
  std::set<std::string> labels;
  for (const auto& p : priors) {
    if (p.label.empty()) throw ConfigError("simulate: prior labels must be non-empty");
    if (!labels.insert(p.label).second) throw ConfigError("simulate: duplicate prior label '" + p.label + "'");
    p.hyper.validate();
  }
  if (!(interval_level > 0.0 && interval_level <= 1.0)) throw ConfigError("simulate: interval_level must lie in (0, 1]");
  if (!(true_params.lambda() > 0.0 || true_params.beta() > 0.0))
    throw ConfigError("simulate: true_params need lambda > 0 or beta > 0");
  if (std::find(estimators.begin(), estimators.end(), Estimator::mcmc) != estimators.end()) mcmc.validate();
}

const RiskRow& RiskTable::find(std::size_t n, Estimator e, std::string_view prior, int parameter) const {
  for (const auto& r : rows)
    if (r.n == n && r.estimator == e && r.prior == prior && r.parameter == parameter) return r;
  std::ostringstream msg;
  msg << "no risk row for n=" << n << " estimator=" << estimator_name(e) << " prior='" << prior
      << "' parameter=" << parameter;
  throw ValidationError(msg.str());
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// One estimator/prior slot of one replication.
struct Outcome {
  bool ok = false;
  std::array<double, 3> estimate{};
  std::array<Interval, 3> interval{};
  std::string reason;
};

struct Slot {
  Estimator estimator;
  std::size_t prior;  // index into cfg.priors; unused for mle
};

std::vector<Slot> slots_of(const SimConfig& cfg) {
  std::vector<Slot> out;
  for (Estimator e : cfg.estimators) {
    if (e == Estimator::mle) {
      out.push_back({e, 0});
    } else {
      for (std::size_t p = 0; p < cfg.priors.size(); ++p) out.push_back({e, p});
    }
  }
  return out;
}

bool all_finite(const std::array<double, 3>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<Outcome> replicate(const SimConfig& cfg, const std::vector<Slot>& slots, std::size_t n, std::size_t rep) {
  std::vector<Outcome> out(slots.size());
  const std::uint64_t sub = derive_seed(cfg.seed, n, rep);
  const Dataset d = sample(cfg.true_params, n, sub);
  const bool full = cfg.interval_level >= 1.0;

  FitOptions fo;
  fo.parallel_starts = false;
  fo.ci_level = full ? 0.95 : cfg.interval_level;
  std::optional<FitResult> fit;
  std::string fit_failure;
  try {
    fit = fit_mle(d, fo);
    if (!fit->converged) fit_failure = "mle did not converge";
  } catch (const std::exception& e) {
    fit_failure = e.what();
  }

  for (std::size_t s = 0; s < slots.size(); ++s) {
    Outcome& o = out[s];
    const Slot& slot = slots[s];
    try {
      switch (slot.estimator) {
        case Estimator::mle: {
          if (!fit_failure.empty()) throw NumericError(fit_failure);
          o.estimate = fit->params_hat.as_array();
          o.interval = fit->ci;
          if (full)
            for (auto& iv : o.interval) iv = {0.0, kInf};
          break;
        }
        case Estimator::lindley: {
          if (!fit_failure.empty()) throw NumericError(fit_failure);
          const auto r = lindley_params(d, cfg.priors[slot.prior].hyper, *fit);
          o.estimate = {r.alpha_bs, r.lambda_bs, r.beta_bs};
          break;
        }
        case Estimator::mcmc: {
          McmcConfig mc = cfg.mcmc;
          mc.seed = derive_seed(sub, 0x6d636d63ULL, slot.prior);
          const auto chain = run_chain(d, cfg.priors[slot.prior].hyper, mc, chain_start(d, cfg.priors[slot.prior].hyper, fit ? &*fit : nullptr));
          o.estimate = posterior_means(chain);
          if (full) {
            for (auto& iv : o.interval) iv = {0.0, kInf};
          } else {
            const auto hpd = hpd_intervals(chain, cfg.interval_level);
            for (int j = 0; j < 3; ++j) o.interval[j] = {hpd[j].lower, hpd[j].upper};
          }
          break;
        }
      }
      if (!all_finite(o.estimate)) throw NumericError("non-finite estimate");
      o.ok = true;
    } catch (const std::exception& e) {
      o.ok = false;
      o.reason = e.what();
    }
  }
  return out;
}

}  // namespace

RiskTable run_study(const SimConfig& cfg, Execution exec) {
  cfg.validate();
  const auto slots = slots_of(cfg);
  const auto truth = cfg.true_params.as_array();
  RiskTable tbl;
  tbl.config = cfg;

  for (std::size_t n : cfg.sample_sizes) {
    std::vector<std::vector<Outcome>> results(cfg.replications);
    const long reps = static_cast<long>(cfg.replications);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long r = 0; r < reps; ++r) results[r] = replicate(cfg, slots, n, static_cast<std::size_t>(r));
    } else {
      for (long r = 0; r < reps; ++r) results[r] = replicate(cfg, slots, n, static_cast<std::size_t>(r));
    }

    for (std::size_t s = 0; s < slots.size(); ++s) {
      const Slot& slot = slots[s];
      const bool interval = slot.estimator != Estimator::lindley;
      std::array<RiskRow, 3> rows;
      std::array<double, 3> sq{}, err{}, cov{}, len{};
      std::size_t used = 0, excluded = 0;
      for (std::size_t r = 0; r < cfg.replications; ++r) {
        const Outcome& o = results[r][s];
        if (!o.ok) {
          ++excluded;
          std::ostringstream line;
          line << "n=" << n << " rep=" << r << " estimator=" << estimator_name(slot.estimator);
          if (slot.estimator != Estimator::mle) line << " prior=" << cfg.priors[slot.prior].label;
          line << ": " << o.reason;
          tbl.exclusions.push_back(line.str());
          continue;
        }
        ++used;
        for (int j = 0; j < 3; ++j) {
          const double e = o.estimate[j] - truth[j];
          sq[j] += e * e;
          err[j] += e;
          if (interval) {
            const auto& iv = o.interval[j];
            cov[j] += (iv.lower <= truth[j] && truth[j] <= iv.upper) ? 1.0 : 0.0;
            len[j] += iv.upper - iv.lower;
          }
        }
      }
      for (int j = 0; j < 3; ++j) {
        RiskRow& row = rows[j];
        row.n = n;
        row.estimator = slot.estimator;
        row.prior = slot.estimator == Estimator::mle ? std::string() : cfg.priors[slot.prior].label;
        row.parameter = j;
        row.used = used;
        row.excluded = excluded;
        row.has_interval = interval;
        const double u = static_cast<double>(used);
        row.risk = used ? sq[j] / u : kNaN;
        row.bias = used ? err[j] / u : kNaN;
        row.coverage = interval && used ? cov[j] / u : kNaN;
        row.mean_length = interval && used ? len[j] / u : kNaN;
        tbl.rows.push_back(row);
      }
    }
  }
  return tbl;
}

std::vector<CoverageRow> coverage_report(const RiskTable& tbl, double nominal) {
  std::vector<CoverageRow> out;
  for (const auto& r : tbl.rows) {
    if (!r.has_interval) continue;
    CoverageRow c;
    c.n = r.n;
    c.estimator = r.estimator;
    c.prior = r.prior;
    c.parameter = r.parameter;
    c.coverage = r.coverage;
    c.nominal = nominal;
    c.used = r.used;
    c.mc_error = r.used ? std::sqrt(r.coverage * (1.0 - r.coverage) / static_cast<double>(r.used)) : kNaN;
    if (nominal >= 1.0 || c.mc_error == 0.0) {
      c.flag = "degenerate";
    } else if (std::isfinite(c.mc_error) && std::fabs(c.coverage - nominal) > 3.0 * c.mc_error) {
      c.flag = "outside";
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mexed

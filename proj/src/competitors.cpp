#include "mexed/competitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/likelihood.hpp"

namespace mexed {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;

double sum_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

double sum_log(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::log(v);
  return s;
}

// Maximizes a 1-D function of u over [lo, hi] by Brent's method, then widens
// the bracket while the optimum sits on an edge.
std::pair<double, double> maximize_1d(const std::function<double(double)>& fn, double lo, double hi,
                                      int& evaluations) {
  auto neg = [&](double u) {
    const double v = fn(u);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
  };
  std::pair<double, double> best{0.0, 0.0};
  for (int widen = 0; widen < 8; ++widen) {
    std::uintmax_t iters = 500;
    best = boost::math::tools::brent_find_minima(neg, lo, hi, kBrentBits, iters);
    evaluations += static_cast<int>(iters);
    const double width = hi - lo;
    const double edge = 1e-6 * width;
    if (best.first - lo < edge) {
      lo -= width;
    } else if (hi - best.first < edge) {
      hi += width;
    } else {
      break;
    }
  }
  return {best.first, -best.second};
}

// ---- generalized (exponentiated) exponential -------------------------------

double ge_loglik(double rate, double shape, std::span<const double> x) {
  if (!(rate > 0.0 && shape > 0.0)) return kNegInf;
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += std::log(-std::expm1(-rate * v));
  return n * std::log(rate * shape) - rate * sum_of(x) + (shape - 1.0) * s;
}

double ge_profile_shape(double rate, std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::log(-std::expm1(-rate * v));
  return -static_cast<double>(x.size()) / s;
}

// ---- extended exponential ------------------------------------------------

double nhe_loglik(double a, double b, std::span<const double> x) {
  if (!(a > 0.0 && b > 0.0)) return kNegInf;
  const double n = static_cast<double>(x.size());
  double s = n * std::log(a * b);
  for (double v : x) {
    const double lz = std::log1p(a * v);
    s += (b - 1.0) * lz - std::expm1(b * lz);
  }
  return s;
}

// Root in b of n/b + sum ln z - sum z^b ln z (strictly decreasing in b).
double nhe_profile_shape(double a, std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  std::vector<double> lz(x.size());
  double sum_lz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lz[i] = std::log1p(a * x[i]);
    sum_lz += lz[i];
  }
  auto score = [&](double log_b) {
    const double b = std::exp(log_b);
    double s = n / b + sum_lz;
    for (double v : lz) s -= std::exp(b * v) * v;
    return s;
  };
  double lo = -1.0, hi = 1.0;
  while (score(lo) < 0.0 && lo > -700.0) lo -= 2.0;
  while (score(hi) > 0.0 && hi < 700.0) hi += 2.0;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(score, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return std::exp(0.5 * (r.first + r.second));
}

// ---- gamma ----------------------------------------------------------------

double gamma_loglik(double shape, double rate, std::span<const double> x) {
  if (!(shape > 0.0 && rate > 0.0)) return kNegInf;
  const double n = static_cast<double>(x.size());
  return n * (shape * std::log(rate) - std::lgamma(shape)) + (shape - 1.0) * sum_log(x) - rate * sum_of(x);
}

// Solves ln k - digamma(k) = s by Newton from the Stirling-based start.
double gamma_shape_mle(double s, int& iterations, bool& converged) {
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  converged = false;
  for (iterations = 0; iterations < 100; ++iterations) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = 0.5 * k;
    if (std::fabs(next - k) < 1e-14 * k) {
      k = next;
      converged = true;
      ++iterations;
      break;
    }
    k = next;
  }
  return k;
}

// ---- Weibull ---------------------------------------------------------------

double weibull_loglik(double shape, double scale, std::span<const double> x) {
  if (!(shape > 0.0 && scale > 0.0)) return kNegInf;
  const double n = static_cast<double>(x.size());
  double s = n * (std::log(shape) - shape * std::log(scale)) + (shape - 1.0) * sum_log(x);
  for (double v : x) s -= std::pow(v / scale, shape);
  return s;
}

double weibull_profile_scale(double shape, std::span<const double> x) {
  const double xmax = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::pow(v / xmax, shape);
  return xmax * std::pow(s / static_cast<double>(x.size()), 1.0 / shape);
}

ModelFit finalize(ModelFit fit, const Dataset& d) {
  const auto [aic, bic] = information_criteria(fit.neg_loglik, fit.k, d.size());
  fit.aic = aic;
  fit.bic = bic;
  fit.reliable = fit.reliable && fit.converged && static_cast<int>(d.size()) > fit.k;
  if (static_cast<int>(d.size()) <= fit.k) {
    if (!fit.diagnostics.empty()) fit.diagnostics += "; ";
    fit.diagnostics += "n <= number of parameters";
  }
  return fit;
}

}  // namespace

std::string_view model_name(ModelId id) {
  switch (id) {
    case ModelId::exponential: return "exponential";
    case ModelId::gen_exponential: return "gen_exponential";
    case ModelId::gamma: return "gamma";
    case ModelId::weibull: return "weibull";
    case ModelId::ext_exponential: return "ext_exponential";
    case ModelId::mexed: return "mexed";
  }
  return "unknown";
}

ModelId parse_model(std::string_view name) {
  for (ModelId id : kAllModels)
    if (model_name(id) == name) return id;
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected exponential, gen_exponential, gamma, weibull, ext_exponential or mexed)");
}

int parameter_count(ModelId id) {
  switch (id) {
    case ModelId::exponential: return 1;
    case ModelId::mexed: return 3;
    default: return 2;
  }
}

std::vector<std::string> parameter_names(ModelId id) {
  switch (id) {
    case ModelId::exponential: return {"rate"};
    case ModelId::gen_exponential: return {"rate", "shape"};
    case ModelId::gamma: return {"shape", "rate"};
    case ModelId::weibull: return {"shape", "scale"};
    case ModelId::ext_exponential: return {"a", "b"};
    case ModelId::mexed: return {"alpha", "lambda", "beta"};
  }
  return {};
}

double model_log_likelihood(ModelId id, std::span<const double> p, std::span<const double> x) {
  if (p.size() != static_cast<std::size_t>(parameter_count(id)))
    throw ValidationError("wrong number of parameters for model " + std::string(model_name(id)));
  switch (id) {
    case ModelId::exponential: {
      if (!(p[0] > 0.0)) return kNegInf;
      return static_cast<double>(x.size()) * std::log(p[0]) - p[0] * sum_of(x);
    }
    case ModelId::gen_exponential: return ge_loglik(p[0], p[1], x);
    case ModelId::gamma: return gamma_loglik(p[0], p[1], x);
    case ModelId::weibull: return weibull_loglik(p[0], p[1], x);
    case ModelId::ext_exponential: return nhe_loglik(p[0], p[1], x);
    case ModelId::mexed: return log_likelihood(p[0], p[1], p[2], x);
  }
  return kNegInf;
}

double model_cdf(const ModelFit& fit, double x) {
  if (x <= 0.0) return 0.0;
  const auto& p = fit.params;
  switch (fit.model_id) {
    case ModelId::exponential: return -std::expm1(-p[0] * x);
    case ModelId::gen_exponential: return std::pow(-std::expm1(-p[0] * x), p[1]);
    case ModelId::gamma: return boost::math::gamma_p(p[0], p[1] * x);
    case ModelId::weibull: return -std::expm1(-std::pow(x / p[1], p[0]));
    case ModelId::ext_exponential: return -std::expm1(-std::expm1(p[1] * std::log1p(p[0] * x)));
    case ModelId::mexed: return cdf(Params(p[0], p[1], p[2]), x);
  }
  return kNaN;
}

std::pair<double, double> information_criteria(double neg_loglik, int k, std::size_t n) {
  if (n < 1) throw ValidationError("information criteria need n >= 1");
  return {2.0 * neg_loglik + 2.0 * k, 2.0 * neg_loglik + k * std::log(static_cast<double>(n))};
}

std::pair<double, double> information_criteria(const ModelFit& fit, std::size_t n) {
  return information_criteria(fit.neg_loglik, fit.k, n);
}

ModelFit fit_model(ModelId id, const Dataset& d) {
  const auto x = d.values();
  const double xbar = d.mean();
  ModelFit fit;
  fit.model_id = id;
  fit.k = parameter_count(id);
  fit.reliable = true;
  int evals = 0;

  switch (id) {
    case ModelId::exponential: {
      fit.params = {1.0 / xbar};
      fit.converged = true;
      break;
    }
    case ModelId::gen_exponential: {
      auto profile = [&](double u) {
        const double rate = std::exp(u);
        return ge_loglik(rate, ge_profile_shape(rate, x), x);
      };
      const auto [u, v] = maximize_1d(profile, std::log(1e-3 / xbar), std::log(1e3 / xbar), evals);
      const double rate = std::exp(u);
      fit.params = {rate, ge_profile_shape(rate, x)};
      fit.converged = std::isfinite(v);
      break;
    }
    case ModelId::gamma: {
      const double s = std::log(xbar) - sum_log(x) / static_cast<double>(x.size());
      if (!(s > 0.0)) {
        fit.params = {kNaN, kNaN};
        fit.converged = false;
        fit.diagnostics = "all observations equal; gamma shape unbounded";
        break;
      }
      bool ok = false;
      const double shape = gamma_shape_mle(s, evals, ok);
      fit.params = {shape, shape / xbar};
      fit.converged = ok;
      break;
    }
    case ModelId::weibull: {
      auto profile = [&](double u) {
        const double shape = std::exp(u);
        return weibull_loglik(shape, weibull_profile_scale(shape, x), x);
      };
      const auto [u, v] = maximize_1d(profile, std::log(0.02), std::log(50.0), evals);
      const double shape = std::exp(u);
      fit.params = {shape, weibull_profile_scale(shape, x)};
      fit.converged = std::isfinite(v);
      break;
    }
    case ModelId::ext_exponential: {
      auto profile = [&](double u) {
        const double a = std::exp(u);
        return nhe_loglik(a, nhe_profile_shape(a, x), x);
      };
      const auto [u, v] = maximize_1d(profile, std::log(1e-4 / xbar), std::log(1e4 / xbar), evals);
      const double a = std::exp(u);
      fit.params = {a, nhe_profile_shape(a, x)};
      fit.converged = std::isfinite(v);
      break;
    }
    case ModelId::mexed: {
      // the nested optimum (beta = 0) joins the start set
      FitOptions fo;
      const ModelFit nested = fit_model(ModelId::ext_exponential, d);
      if (nested.converged && std::isfinite(nested.neg_loglik)) fo.init = Params(nested.params[1], nested.params[0], 0.0);
      FitResult r = fit_mle(d, fo);
      const auto p = r.params_hat.as_array();
      fit.params = {p[0], p[1], p[2]};
      fit.converged = r.converged;
      fit.reliable = r.cov_reliable;
      if (!r.converged) fit.diagnostics = "score norm above tolerance";
      if (!r.cov_reliable) fit.diagnostics += fit.diagnostics.empty() ? "information matrix near singular"
                                                                      : "; information matrix near singular";
      fit.mexed_fit = std::move(r);
      break;
    }
  }
  fit.neg_loglik = -model_log_likelihood(id, fit.params, x);
  if (!std::isfinite(fit.neg_loglik)) fit.converged = false;
  return finalize(std::move(fit), d);
}

std::vector<ModelFit> comparison_table(const Dataset& d, std::span<const ModelId> models) {
  std::vector<ModelFit> rows(models.size());
  const long count = static_cast<long>(models.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      rows[i] = fit_model(models[i], d);
    } catch (const std::exception& e) {
      ModelFit bad;
      bad.model_id = models[i];
      bad.k = parameter_count(models[i]);
      bad.failed = true;
      bad.neg_loglik = bad.aic = bad.bic = kNaN;
      bad.diagnostics = e.what();
      rows[i] = std::move(bad);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ModelFit& a, const ModelFit& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.failed) return false;
    return a.aic < b.aic;
  });
  return rows;
}

double ecdf_at(const Dataset& d, double x) {
  std::size_t count = 0;
  for (double v : d.values())
    if (v <= x) ++count;
  return static_cast<double>(count) / static_cast<double>(d.size());
}

EcdfTable ecdf_overlay(const Dataset& d, std::span<const ModelFit> fits) {
  EcdfTable table;
  for (const auto& f : fits) table.models.push_back(f.model_id);
  const auto sorted = d.sorted();
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // emit once per distinct value, at the top of its run of ties
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    EcdfRow row;
    row.x = sorted[i];
    row.ecdf = static_cast<double>(i + 1) / n;
    for (const auto& f : fits) row.model_cdf.push_back(f.failed ? kNaN : model_cdf(f, row.x));
    table.rows.push_back(std::move(row));
  }
  return table;
}

double kolmogorov_distance(const Dataset& d, const ModelFit& fit) {
  const auto sorted = d.sorted();
  const double n = static_cast<double>(sorted.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = model_cdf(fit, sorted[i]);
    // below the jump: count of values strictly less than sorted[i]
    std::size_t below = i;
    while (below > 0 && sorted[below - 1] == sorted[i]) --below;
    std::size_t upto = i + 1;
    while (upto < sorted.size() && sorted[upto] == sorted[i]) ++upto;
    dist = std::max({dist, std::fabs(upto / n - f), std::fabs(f - below / n)});
  }
  return dist;
}

}  // namespace mexed

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mexed/mle.hpp"
#include "mexed/params.hpp"

namespace mexed {

/// Lifetime models compared against MExED.
///  exponential      rate e^{-rate x}
///  gen_exponential  rate shape e^{-rate x} (1 - e^{-rate x})^(shape - 1)
///  gamma            shape, rate
///  weibull          shape, scale
///  ext_exponential  a b (1 + a x)^(b - 1) exp(1 - (1 + a x)^b)
///  mexed            alpha, lambda, beta
enum class ModelId { exponential, gen_exponential, gamma, weibull, ext_exponential, mexed };

inline constexpr ModelId kAllModels[] = {ModelId::exponential, ModelId::gen_exponential, ModelId::gamma,
                                         ModelId::weibull,     ModelId::ext_exponential, ModelId::mexed};

std::string_view model_name(ModelId id);
/// Accepts the names returned by model_name; throws ValidationError otherwise.
ModelId parse_model(std::string_view name);
int parameter_count(ModelId id);
std::vector<std::string> parameter_names(ModelId id);

struct ModelFit {
  ModelId model_id = ModelId::exponential;
  int k = 1;
  std::vector<double> params;
  double neg_loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  /// Converged, more observations than parameters and (for mexed) a usable
  /// information matrix.
  bool reliable = false;
  /// Set when fitting threw; the numeric fields are then NaN.
  bool failed = false;
  std::string diagnostics;
  std::optional<FitResult> mexed_fit;
};

/// Log-likelihood of a model at explicit parameters; -inf outside the parameter space.
double model_log_likelihood(ModelId id, std::span<const double> params, std::span<const double> x);

/// Model CDF at x for the fitted parameters.
double model_cdf(const ModelFit& fit, double x);

/// AIC = 2 neg_loglik + 2k, BIC = 2 neg_loglik + k ln n.
std::pair<double, double> information_criteria(double neg_loglik, int k, std::size_t n);
std::pair<double, double> information_criteria(const ModelFit& fit, std::size_t n);

/// Maximum-likelihood fit of one model.  Optimizer trouble is reported through
/// converged / diagnostics rather than thrown.
ModelFit fit_model(ModelId id, const Dataset& d);

/// Fits the requested models (all six by default) and sorts by ascending AIC;
/// rows whose fit threw are kept, marked failed, and placed last.
std::vector<ModelFit> comparison_table(const Dataset& d, std::span<const ModelId> models = kAllModels);

struct EcdfRow {
  double x = 0.0;
  double ecdf = 0.0;
  std::vector<double> model_cdf;
};

struct EcdfTable {
  std::vector<ModelId> models;
  std::vector<EcdfRow> rows;
};

/// Empirical CDF (right-continuous, i/n) and fitted model CDFs at the sorted
/// distinct data points.
EcdfTable ecdf_overlay(const Dataset& d, std::span<const ModelFit> fits);

/// Empirical CDF of d evaluated at x.
double ecdf_at(const Dataset& d, double x);

/// sup_x |F_n(x) - F(x)| for the given model.
double kolmogorov_distance(const Dataset& d, const ModelFit& fit);

}  // namespace mexed

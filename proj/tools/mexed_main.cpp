#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mexed/competitors.hpp"
#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/io.hpp"
#include "mexed/lindley.hpp"
#include "mexed/mcmc.hpp"
#include "mexed/mle.hpp"
#include "mexed/sim_study.hpp"

using namespace mexed;
using io::Json;

namespace {

struct Options {
  std::string data;
  std::string model = "mexed";
  std::string method = "mcmc";
  std::string prior;
  std::vector<double> at;
  std::uint64_t seed = 1;
  std::size_t chain_length = 50000;
  std::size_t burn_in = 10000;
  std::size_t thin = 4;
  double level = 0.95;
  std::string out;
  std::string ecdf;
  std::string dump_chain;
  // simulate
  std::string config;
  std::optional<std::size_t> replications;
  std::vector<std::size_t> sample_sizes;
  std::vector<std::string> estimators;
  bool serial = false;
  // eval / sample
  std::string function;
  std::vector<double> params;
  int order = 1;
  std::string moment_method = "quadrature";
  std::size_t count = 0;
};

void emit(const Options& o, const Json& doc, const io::CsvTable* table) {
  if (o.out.empty()) {
    std::cout << io::dump(doc);
    return;
  }
  io::write_atomic(o.out, io::dump(doc));
  if (table != nullptr) io::write_atomic(io::csv_sibling(o.out), io::to_csv(*table));
}

Params params_from(const std::vector<double>& v) {
  if (v.size() != 3) throw ValidationError("--params expects alpha,lambda,beta");
  return Params(v[0], v[1], v[2]);
}

PriorHyper prior_from(const Options& o) {
  return o.prior.empty() ? PriorHyper::non_informative() : io::parse_prior(o.prior);
}

McmcConfig mcmc_from(const Options& o) {
  McmcConfig c;
  c.chain_length = o.chain_length;
  c.burn_in = o.burn_in;
  c.thin = o.thin;
  c.seed = o.seed;
  c.validate();
  return c;
}

int cmd_fit(const Options& o) {
  const Dataset d = io::ingest(o.data);
  const ModelId id = parse_model(o.model);
  Json config{{"data", o.data}, {"model", o.model}, {"level", o.level}, {"at", o.at}};
  Json results;
  if (id == ModelId::mexed) {
    FitOptions fo;
    fo.ci_level = o.level;
    const FitResult fit = fit_mle(d, fo);
    results = io::to_json(fit);
    Json plug = Json::array();
    for (double t : o.at)
      plug.push_back(Json{{"t", t}, {"reliability", plugin_reliability(fit, t)}, {"hazard", plugin_hazard(fit, t)}});
    if (!o.at.empty()) results["plugin"] = plug;
  } else {
    results = io::to_json(fit_model(id, d));
  }
  emit(o, io::make_document("fit", std::nullopt, config, results), nullptr);
  return 0;
}

int cmd_bayes(const Options& o) {
  const Dataset d = io::ingest(o.data);
  const PriorHyper h = prior_from(o);
  const bool lindley = o.method == "lindley" || o.method == "both";
  const bool mcmc = o.method == "mcmc" || o.method == "both";
  if (!lindley && !mcmc) throw ValidationError("--method must be lindley, mcmc or both");
  if (o.at.size() > 1) throw ValidationError("bayes accepts a single --at value");
  const std::optional<double> t = o.at.empty() ? std::nullopt : std::optional<double>(o.at[0]);
  if (t && !(*t > 0.0)) throw ValidationError("--at must be positive");

  Json config{{"data", o.data}, {"method", o.method}, {"prior", io::to_json(h)}, {"level", o.level}};
  if (t) config["at"] = *t;
  Json results = Json::object();
  const FitResult fit = fit_mle(d);
  results["mle"] = io::to_json(fit.params_hat);
  if (lindley) {
    const LindleyResult r = t ? lindley_all(d, h, fit, *t) : lindley_params(d, h, fit);
    results["lindley"] = io::to_json(r);
  }
  std::optional<std::uint64_t> seed;
  if (mcmc) {
    const McmcConfig cfg = mcmc_from(o);
    config["mcmc"] = io::to_json(cfg);
    seed = o.seed;
    const PosteriorChain ch = run_chain(d, h, cfg, chain_start(d, h, &fit));
    results["mcmc"] = io::chain_summary(ch, o.level, t);
    if (!o.dump_chain.empty()) {
      io::CsvTable tbl = io::chain_csv(ch);
      tbl.comments = io::config_comments(config, seed);
      io::write_atomic(o.dump_chain, io::to_csv(tbl));
    }
  }
  emit(o, io::make_document("bayes", seed, config, results), nullptr);
  return 0;
}

int cmd_compare(const Options& o) {
  const Dataset d = io::ingest(o.data);
  const auto fits = comparison_table(d);
  const bool any_ok = std::any_of(fits.begin(), fits.end(), [](const ModelFit& f) { return !f.failed; });
  Json config{{"data", o.data}, {"n", d.size()}};
  Json rows = Json::array();
  for (const auto& f : fits) rows.push_back(io::to_json(f));
  io::CsvTable tbl = io::comparison_csv(fits);
  tbl.comments = io::config_comments(config, std::nullopt);
  emit(o, io::make_document("compare", std::nullopt, config, Json{{"models", rows}}), &tbl);
  if (!o.ecdf.empty()) {
    io::CsvTable e = io::ecdf_csv(ecdf_overlay(d, fits));
    e.comments = io::config_comments(config, std::nullopt);
    io::write_atomic(o.ecdf, io::to_csv(e));
  }
  return any_ok ? 0 : 1;
}

int cmd_simulate(const Options& o, const CLI::App& sub) {
  SimConfig cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot open config file '" + o.config + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config file '" + o.config + "' is not valid JSON: " + e.what());
    }
    cfg = io::sim_config_from_json(j);
  }
  if (sub.count("--seed")) cfg.seed = o.seed;
  if (o.replications) cfg.replications = *o.replications;
  if (!o.sample_sizes.empty()) cfg.sample_sizes = o.sample_sizes;
  if (!o.estimators.empty()) {
    cfg.estimators.clear();
    for (const auto& e : o.estimators) cfg.estimators.push_back(parse_estimator(e));
  }
  if (!o.prior.empty()) cfg.priors = {{"custom", io::parse_prior(o.prior)}};
  if (sub.count("--level")) cfg.interval_level = o.level;
  if (sub.count("--chain-length")) cfg.mcmc.chain_length = o.chain_length;
  if (sub.count("--burn-in")) cfg.mcmc.burn_in = o.burn_in;
  if (sub.count("--thin")) cfg.mcmc.thin = o.thin;
  cfg.validate();

  const RiskTable tbl = run_study(cfg, o.serial ? Execution::serial : Execution::parallel);
  const auto cov = coverage_report(tbl, cfg.interval_level);
  const Json config = io::to_json(cfg);
  Json results = io::risk_json(tbl);
  results["coverage"] = io::coverage_json(cov);
  io::CsvTable csv = io::risk_csv(tbl);
  csv.comments = io::config_comments(config, cfg.seed);
  emit(o, io::make_document("simulate", cfg.seed, config, results), &csv);
  if (!o.out.empty()) {
    io::CsvTable c = io::coverage_csv(cov);
    c.comments = csv.comments;
    std::string path = io::csv_sibling(o.out);
    path.insert(path.size() - 4, ".coverage");
    io::write_atomic(path, io::to_csv(c));
  }
  return 0;
}

int cmd_eval(const Options& o) {
  const Params p = params_from(o.params);
  const std::string& fn = o.function;
  Json config{{"function", fn}, {"params", io::to_json(p)}};
  Json results = Json::array();
  auto pointwise = [&](auto&& f) {
    if (o.at.empty()) throw ValidationError("eval " + fn + " needs --at");
    config["at"] = o.at;
    for (double x : o.at) results.push_back(Json{{"x", x}, {"value", f(x)}});
  };
  if (fn == "pdf") pointwise([&](double x) { return pdf(p, x); });
  else if (fn == "log_pdf") pointwise([&](double x) { return log_pdf(p, x); });
  else if (fn == "cdf") pointwise([&](double x) { return cdf(p, x); });
  else if (fn == "survival") pointwise([&](double x) { return survival(p, x); });
  else if (fn == "hazard") pointwise([&](double x) { return hazard(p, x); });
  else if (fn == "cum_hazard") pointwise([&](double x) { return cum_hazard(p, x); });
  else if (fn == "quantile") pointwise([&](double q) { return quantile(p, q); });
  else if (fn == "median") results.push_back(Json{{"value", median(p)}});
  else if (fn == "mode") results.push_back(Json{{"value", mode(p)}});
  else if (fn == "moment") {
    MomentSpec spec;
    spec.order = o.order;
    if (o.moment_method == "series") spec.method = MomentMethod::series;
    else if (o.moment_method != "quadrature") throw ValidationError("--moment-method must be quadrature or series");
    config["order"] = o.order;
    config["moment_method"] = o.moment_method;
    results.push_back(Json{{"order", o.order}, {"value", moment(p, spec)}});
  } else if (fn == "mean_var") {
    const auto [m, v] = mean_and_variance(p);
    results.push_back(Json{{"mean", m}, {"variance", v}});
  } else {
    throw ValidationError("unknown eval function '" + fn + "'");
  }
  emit(o, io::make_document("eval", std::nullopt, config, Json{{"values", results}}), nullptr);
  return 0;
}

int cmd_sample(const Options& o) {
  const Params p = params_from(o.params);
  if (o.count < 1) throw ValidationError("--n must be >= 1");
  const Dataset d = sample(p, o.count, o.seed);
  Json config{{"params", io::to_json(p)}, {"n", o.count}};
  io::CsvTable tbl;
  tbl.comments = io::config_comments(config, o.seed);
  tbl.header = {"x"};
  for (double v : d.values()) tbl.rows.push_back({io::format_number(v)});
  const std::string text = io::to_csv(tbl);
  if (o.out.empty()) std::cout << text;
  else io::write_atomic(o.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modified extended exponential distribution: fitting, Bayes estimation and model comparison"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kVersion));
  Options o;

  auto add_data = [&](CLI::App* s) {
    s->add_option("--data", o.data, "data file, '-' for stdin, or builtin:aircond")->required();
  };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", o.out, "write results to this path"); };
  auto add_mcmc = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--chain-length", o.chain_length, "total MCMC iterations")->check(CLI::PositiveNumber);
    s->add_option("--burn-in", o.burn_in, "burn-in iterations");
    s->add_option("--thin", o.thin, "thinning interval")->check(CLI::PositiveNumber);
  };

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit");
  add_data(fit);
  fit->add_option("--model", o.model, "mexed (default) or a comparison model");
  fit->add_option("--at", o.at, "plug-in reliability/hazard times")->delimiter(',');
  fit->add_option("--level", o.level, "confidence level")->check(CLI::Range(0.0, 1.0));
  add_out(fit);

  auto* bayes = app.add_subcommand("bayes", "Bayes estimates under squared-error loss");
  add_data(bayes);
  bayes->add_option("--method", o.method, "lindley, mcmc or both")->check(CLI::IsMember({"lindley", "mcmc", "both"}));
  bayes->add_option("--prior", o.prior, "gamma hyperparameters a,b,c,d,g,f");
  bayes->add_option("--at", o.at, "time for reliability and hazard estimates");
  bayes->add_option("--level", o.level, "HPD level")->check(CLI::Range(0.0, 1.0));
  bayes->add_option("--dump-chain", o.dump_chain, "write retained draws as CSV");
  add_mcmc(bayes);
  add_out(bayes);

  auto* compare = app.add_subcommand("compare", "fit and rank the six lifetime models");
  add_data(compare);
  compare->add_option("--ecdf", o.ecdf, "write ECDF/model CDF overlay CSV");
  add_out(compare);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo risk and coverage study");
  simulate->add_option("--config", o.config, "JSON study configuration");
  simulate->add_option("--replications", o.replications, "replications per sample size");
  simulate->add_option("--sample-sizes", o.sample_sizes, "comma-separated sample sizes")->delimiter(',');
  simulate->add_option("--estimators", o.estimators, "subset of mle,lindley,mcmc")->delimiter(',');
  simulate->add_option("--prior", o.prior, "single prior a,b,c,d,g,f (replaces the configured list)");
  simulate->add_option("--level", o.level, "interval level")->check(CLI::Range(0.0, 1.0));
  simulate->add_flag("--serial", o.serial, "run replications without threads");
  add_mcmc(simulate);
  add_out(simulate);

  auto* eval = app.add_subcommand("eval", "evaluate distribution functions");
  eval->add_option("function", o.function, "pdf, log_pdf, cdf, survival, hazard, cum_hazard, quantile, median, mode, moment, mean_var")
      ->required();
  eval->add_option("--params", o.params, "alpha,lambda,beta")->delimiter(',')->required();
  eval->add_option("--at", o.at, "evaluation points")->delimiter(',');
  eval->add_option("--order", o.order, "moment order")->check(CLI::PositiveNumber);
  eval->add_option("--moment-method", o.moment_method, "quadrature or series");
  add_out(eval);

  auto* samp = app.add_subcommand("sample", "draw a seeded sample");
  samp->add_option("--params", o.params, "alpha,lambda,beta")->delimiter(',')->required();
  samp->add_option("--n", o.count, "sample size")->required();
  samp->add_option("--seed", o.seed, "random seed");
  add_out(samp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitStatus::usage);
  }

  try {
    if (*fit) return cmd_fit(o);
    if (*bayes) return cmd_bayes(o);
    if (*compare) return cmd_compare(o);
    if (*simulate) return cmd_simulate(o, *simulate);
    if (*eval) return cmd_eval(o);
    if (*samp) return cmd_sample(o);
  } catch (const Error& e) {
    std::cerr << "mexed: " << e.what() << "\n";
    return static_cast<int>(e.exit_status());
  } catch (const std::exception& e) {
    std::cerr << "mexed: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::numeric_failure);
  }
  return static_cast<int>(ExitStatus::usage);
}

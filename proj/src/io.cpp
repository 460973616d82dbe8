#include "mexed/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "mexed/error.hpp"
#include "mexed/hpd.hpp"

namespace mexed::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ',' || line[i] == ';' || line[i] == ' ' || line[i] == '\t')) {
      if (line[i] == ',' || line[i] == ';') {
        // empty field between two separators
        std::size_t j = i + 1;
        while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
        if (j < line.size() && (line[j] == ',' || line[j] == ';')) out.emplace_back();
      }
      ++i;
    }
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ',' && line[j] != ';' && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string read_stream(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

Dataset parse_dataset(std::string_view text, std::string_view origin) {
  std::vector<double> values;
  std::size_t line_no = 0;
  bool seen_content = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line);
    const bool first = !seen_content;
    seen_content = true;
    std::vector<double> parsed;
    bool numeric = true;
    for (auto f : fields) {
      double v = 0.0;
      if (!parse_double(trim(f), v)) {
        numeric = false;
        break;
      }
      parsed.push_back(v);
    }
    if (!numeric && first) {
      bool any_number = false;
      for (auto f : fields) {
        double v;
        any_number = any_number || parse_double(trim(f), v);
      }
      if (!any_number) continue;  // header line
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const std::string_view f = trim(fields[k]);
      double v = 0.0;
      std::ostringstream where;
      where << origin << ": line " << line_no << ", field " << (k + 1);
      if (!parse_double(f, v)) throw ValidationError(where.str() + ": '" + std::string(f) + "' is not a number");
      if (!std::isfinite(v)) throw ValidationError(where.str() + ": value is not finite");
      if (!(v > 0.0)) throw ValidationError(where.str() + ": lifetime " + std::string(f) + " is not positive");
      values.push_back(v);
    }
  }
  if (values.empty()) throw ValidationError(std::string(origin) + ": no observations found");
  return Dataset(std::move(values));
}

Dataset ingest(const std::string& source) {
  if (source == kBuiltinAircond) return parse_dataset(builtin_aircond_text(), kBuiltinAircond);
  if (source.rfind("builtin:", 0) == 0)
    throw ValidationError("unknown builtin dataset '" + source + "' (available: builtin:aircond)");
  if (source == "-") return parse_dataset(read_stream(std::cin), "stdin");
  std::ifstream in(source, std::ios::binary);
  if (!in) throw ValidationError("cannot open data file '" + source + "'");
  return parse_dataset(read_stream(in), source);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(static_cast<unsigned long>(std::hash<std::string>{}(path) & 0xffffff));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ValidationError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("cannot move output into place at '" + path + "'");
  }
}

std::string timestamp_utc() {
  std::time_t t = 0;
  const char* env = std::getenv("SOURCE_DATE_EPOCH");
  long long fixed = 0;
  if (env != nullptr && std::from_chars(env, env + std::strlen(env), fixed).ec == std::errc()) {
    t = static_cast<std::time_t>(fixed);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json make_document(std::string_view command, std::optional<std::uint64_t> seed, Json config, Json results) {
  Json doc;
  doc["command"] = command;
  doc["version"] = kVersion;
  doc["timestamp"] = timestamp_utc();
  doc["seed"] = seed ? Json(*seed) : Json(nullptr);
  doc["config"] = std::move(config);
  doc["results"] = std::move(results);
  return doc;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string to_csv(const CsvTable& t) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += field(cells[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

std::string csv_sibling(const std::string& json_path) {
  const std::string ext = ".json";
  if (json_path.size() > ext.size() && json_path.compare(json_path.size() - ext.size(), ext.size(), ext) == 0)
    return json_path.substr(0, json_path.size() - ext.size()) + ".csv";
  return json_path + ".csv";
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else {
    out.push_back(prefix + "=" + j.dump());
  }
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json triple(const std::array<double, 3>& v) { return Json::array({number(v[0]), number(v[1]), number(v[2])}); }

Json matrix(const Eigen::Matrix3d& m) {
  Json out = Json::array();
  for (int i = 0; i < 3; ++i) out.push_back(Json::array({number(m(i, 0)), number(m(i, 1)), number(m(i, 2))}));
  return out;
}

Json clamped(const ClampedEstimate& e) {
  return Json{{"value", number(e.value)}, {"unclamped", number(e.unclamped)}, {"clamped", e.clamped}};
}

const char* const kParamNames[3] = {"alpha", "lambda", "beta"};

}  // namespace

std::vector<std::string> config_comments(const Json& config, std::optional<std::uint64_t> seed) {
  std::vector<std::string> out;
  out.push_back("mexed " + std::string(kVersion));
  out.push_back("seed=" + (seed ? std::to_string(*seed) : std::string("none")));
  flatten(config, "", out);
  return out;
}

Json to_json(const Params& p) {
  return Json{{"alpha", number(p.alpha())}, {"lambda", number(p.lambda())}, {"beta", number(p.beta())}};
}

Json to_json(const PriorHyper& h) {
  return Json{{"a", h.a}, {"b", h.b}, {"c", h.c}, {"d", h.d}, {"g", h.g}, {"f", h.f}};
}

Json to_json(const McmcConfig& c) {
  return Json{{"chain_length", c.chain_length},
              {"burn_in", c.burn_in},
              {"thin", c.thin},
              {"seed", c.seed},
              {"proposal_scales", triple(c.proposal_scales)},
              {"adapt", c.adapt},
              {"target_accept_range", Json::array({c.target_accept_range.first, c.target_accept_range.second})}};
}

Json to_json(const FitResult& f) {
  Json ci = Json::object();
  for (int j = 0; j < 3; ++j) ci[kParamNames[j]] = Json::array({number(f.ci[j].lower), number(f.ci[j].upper)});
  Json boundary = Json::object();
  for (int j = 0; j < 3; ++j) boundary[kParamNames[j]] = f.at_boundary[j];
  return Json{{"params_hat", to_json(f.params_hat)},
              {"loglik", number(f.loglik)},
              {"neg_loglik", number(-f.loglik)},
              {"converged", f.converged},
              {"iterations", f.iterations},
              {"gradient_norm", number(f.gradient_norm)},
              {"gradient_tolerance", number(f.gradient_tolerance)},
              {"n", f.n},
              {"info_matrix", matrix(f.info_matrix)},
              {"cov_matrix", matrix(f.cov_matrix)},
              {"cov_reliable", f.cov_reliable},
              {"ci_level", f.ci_level},
              {"ci", ci},
              {"at_boundary", boundary}};
}

Json to_json(const LindleyResult& r) {
  Json out{{"alpha", number(r.alpha_bs)}, {"lambda", number(r.lambda_bs)}, {"beta", number(r.beta_bs)}};
  if (r.t) {
    out["t"] = *r.t;
    if (r.reliability_bs) out["reliability"] = clamped(*r.reliability_bs);
    if (r.hazard_bs) out["hazard"] = clamped(*r.hazard_bs);
  }
  out["mle"] = to_json(r.mle_anchor.params_hat);
  return out;
}

Json to_json(const ModelFit& m) {
  Json params = Json::object();
  const auto names = parameter_names(m.model_id);
  for (std::size_t i = 0; i < names.size() && i < m.params.size(); ++i) params[names[i]] = number(m.params[i]);
  return Json{{"model", model_name(m.model_id)},
              {"k", m.k},
              {"params", params},
              {"neg_loglik", number(m.neg_loglik)},
              {"aic", number(m.aic)},
              {"bic", number(m.bic)},
              {"converged", m.converged},
              {"reliable", m.reliable},
              {"failed", m.failed},
              {"diagnostics", m.diagnostics}};
}

Json to_json(const SimConfig& c) {
  Json priors = Json::array();
  for (const auto& p : c.priors)
    priors.push_back(Json{{"label", p.label}, {"hyper", Json::array({p.hyper.a, p.hyper.b, p.hyper.c, p.hyper.d, p.hyper.g, p.hyper.f})}});
  Json est = Json::array();
  for (auto e : c.estimators) est.push_back(estimator_name(e));
  Json mc = to_json(c.mcmc);
  mc.erase("seed");
  return Json{{"true_params", triple(c.true_params.as_array())},
              {"sample_sizes", c.sample_sizes},
              {"replications", c.replications},
              {"priors", priors},
              {"estimators", est},
              {"seed", c.seed},
              {"interval_level", c.interval_level},
              {"mcmc", mc}};
}

Json chain_summary(const PosteriorChain& ch, double level, std::optional<double> t) {
  const auto means = posterior_means(ch);
  const auto hpd = hpd_intervals(ch, level);
  Json mean_j = Json::object(), hpd_j = Json::object(), acc = Json::object(), scales = Json::object();
  for (int j = 0; j < 3; ++j) {
    mean_j[kParamNames[j]] = number(means[j]);
    hpd_j[kParamNames[j]] = Json::array({number(hpd[j].lower), number(hpd[j].upper)});
    acc[kParamNames[j]] = number(ch.accept_rates[j]);
    scales[kParamNames[j]] = number(ch.final_scales[j]);
  }
  Json out{{"posterior_mean", mean_j},
           {"hpd_level", level},
           {"hpd", hpd_j},
           {"acceptance_rates", acc},
           {"final_proposal_scales", scales},
           {"retained_draws", ch.draws.size()}};
  if (t) {
    out["t"] = *t;
    out["reliability"] = number(posterior_reliability(ch, *t));
    out["hazard"] = number(posterior_hazard(ch, *t));
  }
  return out;
}

CsvTable comparison_csv(const std::vector<ModelFit>& fits) {
  CsvTable t;
  t.header = {"model", "k", "neg_loglik", "aic", "bic", "converged", "reliable", "failed", "params", "diagnostics"};
  for (const auto& m : fits) {
    std::string params;
    const auto names = parameter_names(m.model_id);
    for (std::size_t i = 0; i < names.size() && i < m.params.size(); ++i) {
      if (i) params += ';';
      params += names[i] + "=" + format_number(m.params[i]);
    }
    t.rows.push_back({std::string(model_name(m.model_id)), std::to_string(m.k), format_number(m.neg_loglik),
                      format_number(m.aic), format_number(m.bic), m.converged ? "1" : "0", m.reliable ? "1" : "0",
                      m.failed ? "1" : "0", params, m.diagnostics});
  }
  return t;
}

CsvTable ecdf_csv(const EcdfTable& e) {
  CsvTable t;
  t.header = {"x", "ecdf"};
  for (auto m : e.models) t.header.push_back(std::string(model_name(m)));
  for (const auto& r : e.rows) {
    std::vector<std::string> row{format_number(r.x), format_number(r.ecdf)};
    for (double v : r.model_cdf) row.push_back(format_number(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable chain_csv(const PosteriorChain& ch) {
  CsvTable t;
  t.header = {"iteration", "alpha", "lambda", "beta"};
  t.rows.reserve(ch.draws.size());
  for (std::size_t k = 0; k < ch.draws.size(); ++k) {
    const auto& d = ch.draws[k];
    t.rows.push_back({std::to_string(ch.iterations[k]), format_number(d[0]), format_number(d[1]), format_number(d[2])});
  }
  return t;
}

CsvTable risk_csv(const RiskTable& tbl) {
  CsvTable t;
  t.header = {"n", "estimator", "prior", "parameter", "risk", "bias", "coverage", "mean_length", "used", "excluded"};
  for (const auto& r : tbl.rows) {
    t.rows.push_back({std::to_string(r.n), std::string(estimator_name(r.estimator)), r.prior, kParamNames[r.parameter],
                      format_number(r.risk), format_number(r.bias), r.has_interval ? format_number(r.coverage) : "",
                      r.has_interval ? format_number(r.mean_length) : "", std::to_string(r.used),
                      std::to_string(r.excluded)});
  }
  return t;
}

CsvTable coverage_csv(const std::vector<CoverageRow>& rows) {
  CsvTable t;
  t.header = {"n", "estimator", "prior", "parameter", "coverage", "mc_error", "nominal", "used", "flag"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.n), std::string(estimator_name(r.estimator)), r.prior, kParamNames[r.parameter],
                      format_number(r.coverage), format_number(r.mc_error), format_number(r.nominal),
                      std::to_string(r.used), r.flag});
  }
  return t;
}

Json risk_json(const RiskTable& tbl) {
  Json rows = Json::array();
  for (const auto& r : tbl.rows) {
    Json row{{"n", r.n},
             {"estimator", estimator_name(r.estimator)},
             {"prior", r.prior},
             {"parameter", kParamNames[r.parameter]},
             {"risk", number(r.risk)},
             {"bias", number(r.bias)},
             {"used", r.used},
             {"excluded", r.excluded}};
    if (r.has_interval) {
      row["coverage"] = number(r.coverage);
      row["mean_length"] = number(r.mean_length);
    }
    rows.push_back(std::move(row));
  }
  return Json{{"rows", rows}, {"exclusions", tbl.exclusions}};
}

Json coverage_json(const std::vector<CoverageRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"n", r.n},
                       {"estimator", estimator_name(r.estimator)},
                       {"prior", r.prior},
                       {"parameter", kParamNames[r.parameter]},
                       {"coverage", number(r.coverage)},
                       {"mc_error", number(r.mc_error)},
                       {"nominal", r.nominal},
                       {"used", r.used},
                       {"flag", r.flag}});
  }
  return out;
}

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
  throw ConfigError("simulate config " + (pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

double get_number(const Json& j, const std::string& ptr) {
  if (!j.is_number()) schema_error(ptr, "expected a number");
  return j.get<double>();
}

std::size_t get_count(const Json& j, const std::string& ptr) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    schema_error(ptr, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<double> get_numbers(const Json& j, const std::string& ptr, std::size_t expected) {
  if (!j.is_array()) schema_error(ptr, "expected an array");
  if (expected && j.size() != expected) schema_error(ptr, "expected " + std::to_string(expected) + " entries");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

void check_keys(const Json& j, const std::string& ptr, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) schema_error(ptr, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == it.key();
    if (!ok) schema_error(ptr + "/" + it.key(), "unknown key");
  }
}

}  // namespace

SimConfig sim_config_from_json(const Json& j, SimConfig cfg) {
  check_keys(j, "", {"true_params", "sample_sizes", "replications", "priors", "estimators", "seed", "interval_level", "mcmc"});
  if (j.contains("true_params")) {
    const auto v = get_numbers(j["true_params"], "/true_params", 3);
    if (!Params::valid(v[0], v[1], v[2])) schema_error("/true_params", "not a valid (alpha, lambda, beta)");
    cfg.true_params = Params(v[0], v[1], v[2]);
  }
  if (j.contains("sample_sizes")) {
    const Json& s = j["sample_sizes"];
    if (!s.is_array() || s.empty()) schema_error("/sample_sizes", "expected a non-empty array");
    cfg.sample_sizes.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string ptr = "/sample_sizes/" + std::to_string(i);
      const std::size_t n = get_count(s[i], ptr);
      if (n < 5) schema_error(ptr, "sample size must be >= 5");
      cfg.sample_sizes.push_back(n);
    }
  }
  if (j.contains("replications")) {
    cfg.replications = get_count(j["replications"], "/replications");
    if (cfg.replications < 1) schema_error("/replications", "must be >= 1");
  }
  if (j.contains("priors")) {
    const Json& p = j["priors"];
    if (!p.is_array()) schema_error("/priors", "expected an array");
    cfg.priors.clear();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string ptr = "/priors/" + std::to_string(i);
      check_keys(p[i], ptr, {"label", "hyper"});
      if (!p[i].contains("label") || !p[i]["label"].is_string()) schema_error(ptr + "/label", "expected a string");
      if (!p[i].contains("hyper")) schema_error(ptr + "/hyper", "missing");
      const auto h = get_numbers(p[i]["hyper"], ptr + "/hyper", 6);
      PriorHyper hyper{h[0], h[1], h[2], h[3], h[4], h[5]};
      try {
        hyper.validate();
      } catch (const Error& e) {
        schema_error(ptr + "/hyper", e.what());
      }
      cfg.priors.push_back({p[i]["label"].get<std::string>(), hyper});
    }
  }
  if (j.contains("estimators")) {
    const Json& e = j["estimators"];
    if (!e.is_array()) schema_error("/estimators", "expected an array");
    cfg.estimators.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string ptr = "/estimators/" + std::to_string(i);
      if (!e[i].is_string()) schema_error(ptr, "expected a string");
      try {
        cfg.estimators.push_back(parse_estimator(e[i].get<std::string>()));
      } catch (const Error& err) {
        schema_error(ptr, err.what());
      }
    }
  }
  if (j.contains("seed")) cfg.seed = get_count(j["seed"], "/seed");
  if (j.contains("interval_level")) cfg.interval_level = get_number(j["interval_level"], "/interval_level");
  if (j.contains("mcmc")) {
    const Json& m = j["mcmc"];
    check_keys(m, "/mcmc", {"chain_length", "burn_in", "thin", "proposal_scales", "adapt", "target_accept_range"});
    if (m.contains("chain_length")) cfg.mcmc.chain_length = get_count(m["chain_length"], "/mcmc/chain_length");
    if (m.contains("burn_in")) cfg.mcmc.burn_in = get_count(m["burn_in"], "/mcmc/burn_in");
    if (m.contains("thin")) cfg.mcmc.thin = get_count(m["thin"], "/mcmc/thin");
    if (m.contains("proposal_scales")) {
      const auto s = get_numbers(m["proposal_scales"], "/mcmc/proposal_scales", 3);
      cfg.mcmc.proposal_scales = {s[0], s[1], s[2]};
    }
    if (m.contains("adapt")) {
      if (!m["adapt"].is_boolean()) schema_error("/mcmc/adapt", "expected a boolean");
      cfg.mcmc.adapt = m["adapt"].get<bool>();
    }
    if (m.contains("target_accept_range")) {
      const auto r = get_numbers(m["target_accept_range"], "/mcmc/target_accept_range", 2);
      cfg.mcmc.target_accept_range = {r[0], r[1]};
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("simulate config: ") + e.what());
  }
  return cfg;
}

PriorHyper parse_prior(std::string_view text) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view f = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    double x = 0.0;
    if (!parse_double(f, x)) throw ValidationError("--prior: '" + std::string(f) + "' is not a number");
    v.push_back(x);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (v.size() != 6) throw ValidationError("--prior expects six values a,b,c,d,g,f");
  PriorHyper h{v[0], v[1], v[2], v[3], v[4], v[5]};
  h.validate();
  return h;
}

}  // namespace mexed::io

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mexed/competitors.hpp"
#include "mexed/lindley.hpp"
#include "mexed/mcmc.hpp"
#include "mexed/mle.hpp"
#include "mexed/params.hpp"
#include "mexed/sim_study.hpp"

namespace mexed::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::string_view kBuiltinAircond = "builtin:aircond";

/// Bundled air-conditioning failure times (n = 30), CSV text with provenance comments.
std::string_view builtin_aircond_text();

/// Parses newline-, comma- or whitespace-separated positive reals.  Lines
/// starting with '#' are ignored and a non-numeric first line is taken as a
/// header.  Errors name the 1-based line and field.
Dataset parse_dataset(std::string_view text, std::string_view origin = "input");

/// `source` is a file path, "-" for standard input, or "builtin:aircond".
Dataset ingest(const std::string& source);

/// Shortest decimal string that round-trips to the same double; "nan",
/// "inf", "-inf" for non-finite values.  Locale independent.
std::string format_number(double v);

/// Writes via a temporary file in the same directory followed by rename.
void write_atomic(const std::string& path, std::string_view content);

/// Seconds since the epoch, or SOURCE_DATE_EPOCH when set, as ISO-8601 UTC.
std::string timestamp_utc();

/// {command, version, timestamp, seed, config, results}.
Json make_document(std::string_view command, std::optional<std::uint64_t> seed, Json config, Json results);

/// Indented JSON text terminated by a newline.
std::string dump(const Json& j);

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comments become leading "# " lines; fields containing ',', '"' or newlines are quoted.
std::string to_csv(const CsvTable& t);

/// "path.json" -> "path.csv"; other names get ".csv" appended.
std::string csv_sibling(const std::string& json_path);

/// Flattened config as "key=value" comment lines for CSV outputs.
std::vector<std::string> config_comments(const Json& config, std::optional<std::uint64_t> seed);

Json to_json(const Params& p);
Json to_json(const PriorHyper& h);
Json to_json(const McmcConfig& c);
Json to_json(const FitResult& f);
Json to_json(const LindleyResult& r);
Json to_json(const ModelFit& m);
Json to_json(const SimConfig& c);

/// Posterior means, HPD intervals, acceptance rates and optional R(t), h(t).
Json chain_summary(const PosteriorChain& ch, double level, std::optional<double> t);

CsvTable comparison_csv(const std::vector<ModelFit>& fits);
CsvTable ecdf_csv(const EcdfTable& t);
/// iteration,alpha,lambda,beta
CsvTable chain_csv(const PosteriorChain& ch);
CsvTable risk_csv(const RiskTable& t);
CsvTable coverage_csv(const std::vector<CoverageRow>& rows);
Json risk_json(const RiskTable& t);
Json coverage_json(const std::vector<CoverageRow>& rows);

/// Parses a simulate config document; errors name the offending JSON pointer.
SimConfig sim_config_from_json(const Json& j, SimConfig base = {});

/// "a,b,c,d,g,f" -> PriorHyper; throws ValidationError on malformed input.
PriorHyper parse_prior(std::string_view text);

}  // namespace mexed::io

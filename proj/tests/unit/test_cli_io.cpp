#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mexed/error.hpp"
#include "mexed/io.hpp"
#include "mexed/random.hpp"

using namespace mexed;
namespace fs = std::filesystem;

TEST_CASE("newline separated input") {
  const Dataset d = io::parse_dataset("1.0\n2.0\n3.0");
  CHECK(d.size() == 3);
  CHECK(d[2] == 3.0);
}

TEST_CASE("header plus comma separated row") {
  const Dataset d = io::parse_dataset("x\n1,2,3\n");
  CHECK(d.size() == 3);
}

TEST_CASE("comments, blank lines, whitespace and CRLF") {
  const Dataset d = io::parse_dataset("# note\r\n\r\n 4.5 \t 6\r\n7e0\r\n");
  CHECK(d.size() == 3);
  CHECK(d[0] == 4.5);
}

TEST_CASE("row-numbered validation errors") {
  auto message = [](std::string_view text) {
    try {
      io::parse_dataset(text, "data.csv");
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("1\n2\n-3\n").find("line 3") != std::string::npos);
  CHECK(message("1\n2\n0\n").find("not positive") != std::string::npos);
  CHECK(message("x\n1\nabc\n").find("line 3, field 1") != std::string::npos);
  CHECK(message("1,2,,4\n").find("field 3") != std::string::npos);
  CHECK(message("").find("no observations") != std::string::npos);
  CHECK(message("# only a comment\n").find("no observations") != std::string::npos);
  CHECK(message("header\n").find("no observations") != std::string::npos);
}

TEST_CASE("bundled dataset") {
  const Dataset d = io::ingest("builtin:aircond");
  CHECK(d.size() == 30);
  CHECK(d.mean() == doctest::Approx(59.6));
  CHECK_THROWS_AS(io::ingest("builtin:nope"), ValidationError);
  CHECK_THROWS_AS(io::ingest("/nonexistent/file.csv"), ValidationError);
}

TEST_CASE("numbers round trip through their shortest form") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.uniform(), static_cast<int>(rng.uniform() * 200) - 100);
    const std::string s = io::format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(NAN) == "nan");
}

TEST_CASE("JSON documents round trip numeric fields") {
  const double x = 0.1 + 0.2;
  const io::Json doc = io::make_document("fit", 7, io::Json{{"k", 1}}, io::Json{{"x", x}, {"tiny", 1e-300}});
  const io::Json back = io::Json::parse(io::dump(doc));
  CHECK(back["results"]["x"].get<double>() == x);
  CHECK(back["results"]["tiny"].get<double>() == 1e-300);
  CHECK(back["seed"].get<std::uint64_t>() == 7);
  for (const char* key : {"command", "version", "timestamp", "seed", "config", "results"}) CHECK(back.contains(key));
}

TEST_CASE("timestamp honours SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  CHECK(io::timestamp_utc() == "1970-01-02T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("atomic writes and CSV quoting") {
  const fs::path dir = fs::temp_directory_path() / "mexed_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  io::CsvTable t;
  t.comments = {"seed=1"};
  t.header = {"a", "b"};
  t.rows = {{"1", "x,y"}, {"2", "say \"hi\""}};
  io::write_atomic(path, io::to_csv(t));
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "# seed=1\na,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  fs::remove_all(dir);
  CHECK(io::csv_sibling("a/b.json") == "a/b.csv");
  CHECK(io::csv_sibling("out") == "out.csv");
}

TEST_CASE("prior flag parsing") {
  const PriorHyper h = io::parse_prior("1,2,3,4,5,6");
  CHECK(h.f == 6.0);
  CHECK_THROWS_AS(io::parse_prior("1,2,3"), ValidationError);
  CHECK_THROWS_AS(io::parse_prior("1,2,3,4,5,x"), ValidationError);
  CHECK_THROWS_AS(io::parse_prior("1,2,3,4,5,-1"), ValidationError);
}

TEST_CASE("simulate config schema errors name the offending pointer") {
  auto message = [](const char* text) {
    try {
      io::sim_config_from_json(io::Json::parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"sample_sizes": [20, 3]})").find("/sample_sizes/1") != std::string::npos);
  CHECK(message(R"({"replications": "many"})").find("/replications") != std::string::npos);
  CHECK(message(R"({"priors": [{"label": "p", "hyper": [1, 0, 1]}]})").find("/priors/0/hyper") != std::string::npos);
  CHECK(message(R"({"mcmc": {"thinning": 2}})").find("/mcmc/thinning") != std::string::npos);
  CHECK(message(R"({"estimators": ["mle", "map"]})").find("/estimators/1") != std::string::npos);
  CHECK(message(R"({"colour": 1})").find("/colour") != std::string::npos);
  const SimConfig ok = io::sim_config_from_json(io::Json::parse(R"({"replications": 3, "seed": 9})"));
  CHECK(ok.replications == 3);
  CHECK(ok.seed == 9);
  // config echo parses back to the same settings
  const SimConfig again = io::sim_config_from_json(io::to_json(ok));
  CHECK(io::to_json(again) == io::to_json(ok));
}

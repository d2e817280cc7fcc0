#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "format.hpp"

using namespace pcs::cli;
using pcs::Complex;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pcs_spectra");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  if (!line.empty() && line.back() == ',') v.emplace_back();
  return v;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("pcs_test_cli_" + name);
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("shortest round-trip numbers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-HUGE_VAL) == "-inf");

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t u = bits(rng);
    double x;
    std::memcpy(&x, &u, sizeof x);
    if (!std::isfinite(x) || x == 0.0) continue;
    const std::string s = format_double(x);
    REQUIRE(std::strtod(s.c_str(), nullptr) == x);
    // Shortest: one significant digit fewer no longer round-trips. Integers
    // beyond 2^53 print in full when that is the shorter string.
    if (s.find_first_of(".e") == std::string::npos && std::abs(x) >= 0x1p53) continue;
    std::string mantissa;
    for (char ch : s.substr(0, s.find('e'))) {
      if (ch >= '0' && ch <= '9') mantissa += ch;
    }
    mantissa.erase(0, mantissa.find_first_not_of('0'));
    mantissa.erase(mantissa.find_last_not_of('0') + 1);
    const int digits = static_cast<int>(mantissa.size());
    if (digits > 1) {
      char shorter[64];
      std::snprintf(shorter, sizeof shorter, "%.*e", digits - 2, x);
      REQUIRE(std::strtod(shorter, nullptr) != x);
    }
  }
}

TEST_CASE("JSON writer") {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["z"] = complex_json(Complex(-3.75, -2.0));
  j["list"] = complex_list_json({Complex(1, 0), Complex(0, -0.0)});
  j["bad"] = std::nan("");
  j["flag"] = true;
  j["n"] = 4;
  std::ostringstream os;
  write_json(os, j);
  const std::string s = os.str();
  CHECK(s ==
        "{\n"
        "  \"schema_version\": \"1\",\n"
        "  \"z\": {\n    \"re\": -3.75,\n    \"im\": -2\n  },\n"
        "  \"list\": [\n    {\n      \"re\": 1,\n      \"im\": 0\n    },\n    {\n      \"re\": 0,\n      \"im\": 0\n    }\n  ],\n"
        "  \"bad\": null,\n"
        "  \"flag\": true,\n"
        "  \"n\": 4\n"
        "}\n");
  const Json back = Json::parse(s);
  CHECK(back["z"]["re"].get<double>() == -3.75);
  CHECK(back["bad"].is_null());

  std::ostringstream empty;
  write_json(empty, Json::object({{"a", Json::array()}, {"b", Json::object()}}));
  CHECK(Json::parse(empty.str()) == Json::object({{"a", Json::array()}, {"b", Json::object()}}));
}

TEST_CASE("CSV writer") {
  std::ostringstream os;
  write_csv(os, {{0.5, "plus", "s1", 0, Complex(-3.75, -2.0), false, 0.0},
                 {0.5, "plus", "numeric", 1, Complex(0.1, 0.0), true, 3e-12}});
  const auto l = lines(os.str());
  REQUIRE(l.size() == 3);
  CHECK(l[0] == kCsvHeader);
  CHECK(l[1] == "0.5,plus,s1,0,-3.75,-2,");
  CHECK(l[2] == "0.5,plus,numeric,1,0.1,0,3e-12");
}

TEST_CASE("config documents") {
  RunConfig c;
  apply_config(c, Json::parse(R"({"command": "bifurcation", "A": 2, "B": 3, "C_max": 0.5, "steps": 6,
                                  "numeric_C": [0, 0.5], "branch": "minus", "format": "csv"})"));
  CHECK(c.command == Command::bifurcation);
  CHECK(*c.A == 2.0);
  CHECK(c.steps == 6);
  CHECK(c.numeric_C == std::vector<double>{0.0, 0.5});
  CHECK(c.branch == pcs::Branch::minus);
  CHECK(c.resolved_format() == Format::csv);
  CHECK_NOTHROW(validate(c));

  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"A": 1, "gamma": 2})")), UsageError);
  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"A": "1"})")), UsageError);
  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"N": 4000.5})")), UsageError);
  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"branch": "up"})")), UsageError);
  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"numeric_C": [0, "x"]})")), UsageError);
  CHECK_THROWS_AS(apply_config(c, Json::parse("[1, 2]")), UsageError);

  RunConfig d;
  d.out = "levels.csv";
  CHECK(d.resolved_format() == Format::csv);
  d.out = "levels.json";
  CHECK(d.resolved_format() == Format::json);
}

TEST_CASE("validation") {
  RunConfig c;
  CHECK_THROWS_AS(validate(c), UsageError);
  c.A = 2.0;
  c.B = 3.0;
  CHECK_NOTHROW(validate(c));
  c.alpha = 0.0;
  CHECK_THROWS_AS(validate(c), UsageError);
  c.alpha = 1.0;
  c.N = 2;
  CHECK_THROWS_AS(validate(c), UsageError);
  c.N.reset();
  c.numeric_C = {0.5};
  CHECK_THROWS_AS(validate(c), UsageError);
  c.numeric_C.clear();
  c.V1 = 1.0;
  CHECK_THROWS_AS(validate(c), UsageError);
  c.A.reset();
  c.B.reset();
  c.V2 = 1.0;
  CHECK_NOTHROW(validate(c));
  c.command = Command::spectrum;
  CHECK_THROWS_AS(validate(c), UsageError);
}

TEST_CASE("analyze report") {
  const auto r = invoke({"analyze", "--A", "2", "--B", "3", "--C", "0.5"});
  REQUIRE(r.code == exit_code::ok);
  const Json j = Json::parse(r.out);
  CHECK(j["schema_version"] == "1");
  CHECK(j["command"] == "analyze");
  const Json& v = j["coefficients"]["vminus"];
  CHECK(v["t2"]["re"].get<double>() == doctest::Approx(-14.5));
  CHECK(v["t2"]["im"].get<double>() == doctest::Approx(0.5));
  CHECK(v["st"]["re"].get<double>() == doctest::Approx(-0.5));
  CHECK(v["st"]["im"].get<double>() == doctest::Approx(15.5));
  CHECK(j["pt_constraint"]["pt_symmetric"] == false);

  const auto phys = invoke({"analyze", "--V1", "15", "--V2", "0"});
  REQUIRE(phys.code == exit_code::ok);
  const Json p = Json::parse(phys.out);
  CHECK(p["factorizations"].size() >= 1);
  CHECK(p["params"]["B"].get<double>() >= 0.0);
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
  const std::vector<std::string> args{"bifurcation", "--A", "2", "--B", "3", "--numeric-C", "0.5"};
  setenv("PCS_SPECTRA_THREADS", "1", 1);
  const auto a = invoke(args);
  setenv("PCS_SPECTRA_THREADS", "3", 1);
  const auto b = invoke(args);
  unsetenv("PCS_SPECTRA_THREADS");
  const auto c = invoke(args);
  REQUIRE(a.code == exit_code::ok);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("bifurcation CSV") {
  const auto r = invoke({"bifurcation", "--A", "2", "--B", "3", "--format", "csv"});
  REQUIRE(r.code == exit_code::ok);
  const auto l = lines(r.out);
  REQUIRE(l.size() > 1);
  CHECK(l[0] == kCsvHeader);
  std::set<double> cs;
  std::set<std::string> branches;
  for (std::size_t i = 1; i < l.size(); ++i) {
    const auto f = split(l[i]);
    REQUIRE(f.size() == 7);
    cs.insert(std::strtod(f[0].c_str(), nullptr));
    branches.insert(f[1]);
  }
  CHECK(cs.size() == 11);
  CHECK(*cs.begin() == 0.0);
  CHECK(*cs.rbegin() == 1.0);
  CHECK(branches == std::set<std::string>{"minus", "plus"});
}

TEST_CASE("spectrum and verify") {
  const auto s = invoke({"spectrum", "--A", "2.5", "--B", "3.2"});
  REQUIRE(s.code == exit_code::ok);
  const Json j = Json::parse(s.out);
  CHECK(j["energies"].size() == 6);

  const auto v = invoke({"verify", "--A", "2", "--B", "3"});
  CHECK(v.code == exit_code::ok);
  CHECK(Json::parse(v.out)["summary"].get<std::string>().ends_with("PASS"));

  const auto csv = invoke({"verify", "--A", "2", "--B", "3", "--format", "csv"});
  REQUIRE(csv.code == exit_code::ok);
  int numeric = 0;
  for (const auto& l : lines(csv.out)) {
    const auto f = split(l);
    if (f.size() == 7 && f[2] == "numeric") {
      ++numeric;
      CHECK_FALSE(f[6].empty());
    }
  }
  CHECK(numeric == 5);
}

TEST_CASE("sl2 and exchange reports") {
  const auto s = invoke({"sl2", "--A", "2", "--B", "3"});
  REQUIRE(s.code == exit_code::ok);
  const Json j = Json::parse(s.out);
  CHECK(j["solutions"].size() == 4);
  CHECK(j["routes_agree"] == true);

  const auto e = invoke({"exchange", "--A", "2", "--B", "2.5"});
  REQUIRE(e.code == exit_code::ok);
  const Json x = Json::parse(e.out);
  CHECK(x["fixed_point"] == true);
  CHECK(x["involution_exact"] == true);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"--help"}).code == exit_code::ok);
  CHECK(invoke({}).code == exit_code::usage);
  CHECK(invoke({"spectrum", "--A", "2"}).code == exit_code::usage);
  CHECK(invoke({"spectrum", "--A", "2", "--B", "3", "--bogus", "1"}).code == exit_code::usage);
  CHECK(invoke({"spectrum", "--A", "2", "--B", "3", "--branch", "up"}).code == exit_code::usage);
  CHECK(invoke({"analyze", "--V1", "-15", "--V2", "0"}).code == exit_code::usage);

  const auto bad = invoke({"verify", "--A", "2", "--B", "3", "--L", "5"});
  CHECK(bad.code == exit_code::numeric);
  CHECK(bad.err.find("numeric failure") != std::string::npos);

  const auto strict = invoke({"verify", "--A", "2", "--B", "3", "--tol-match", "1e-12"});
  CHECK(strict.code == exit_code::verification_failed);

  const auto cfg = temp_file("unknown.json", R"({"A": 2, "B": 3, "colour": 1})");
  const auto r = invoke({"spectrum", "--config", cfg.string()});
  CHECK(r.code == exit_code::usage);
  CHECK(r.err.find("colour") != std::string::npos);
  std::filesystem::remove(cfg);

  CHECK(invoke({"spectrum", "--config", "/nonexistent/cfg.json"}).code == exit_code::usage);

  setenv("PCS_SPECTRA_THREADS", "zero", 1);
  CHECK(invoke({"spectrum", "--A", "2", "--B", "3"}).code == exit_code::usage);
  unsetenv("PCS_SPECTRA_THREADS");
}

TEST_CASE("config file drives a run") {
  const auto out = std::filesystem::temp_directory_path() / "pcs_test_cli_levels.csv";
  const auto cfg = temp_file("spectrum.json", R"({"command": "spectrum", "A": 2.5, "B": 3.2, "out": ")" +
                                                  out.string() + R"("})");
  const auto r = invoke({"--config", cfg.string()});
  REQUIRE(r.code == exit_code::ok);
  CHECK(r.out.empty());
  std::ifstream in(out);
  std::stringstream body;
  body << in.rdbuf();
  const auto l = lines(body.str());
  REQUIRE(l.size() == 7);
  CHECK(l[0] == kCsvHeader);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}

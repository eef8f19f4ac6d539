#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "conekit/errors.hpp"
#include "expr.hpp"
#include "json_format.hpp"

using namespace conekit;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string tmp_path(const std::string& name) { return std::string(CONEKIT_TEST_TMP) + "/" + name; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

}  // namespace

TEST_CASE("usage and unknown subcommands") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"indicial"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("obstruction dimensions on the command line") {
  const auto r = run({"obstruction", "--k", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, r.out.find('\n')) == "2 1");
  const auto j = nlohmann::json::parse(run({"obstruction", "--k", "2", "--format", "json"}).out);
  CHECK(j["dim_harmonic"] == 6);
  CHECK(j["dim_dbar_image"] == 4);
}

TEST_CASE("indicial CSV output") {
  const auto r = run({"indicial", "--sphere", "2", "--set", "D", "--modes", "3"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "set,mode_index,eigenvalue,branch,root,shift,order,log_case,exact");
  bool zero = false, minus_one = false;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 9);
    const double order = std::stod(cells[6]);
    zero = zero || order == 0.0;
    minus_one = minus_one || order == -1.0;
  }
  CHECK(zero);
  CHECK(minus_one);
  CHECK(run({"indicial", "--sphere", "3", "--lens", "2", "--set", "D"}).code == 2);
  CHECK(run({"indicial", "--sphere", "3", "--set", "Q"}).code == 2);
}

TEST_CASE("link spectrum from a JSON file") {
  const auto path = tmp_path("link.json");
  write_file(path, R"({"dim_link": 3, "volume": 19.739208802178716, "einstein_constant": 2,
    "function_modes": [[0, 1], [3, 4]], "coclosed_one_form_modes": [[4, 6]]})");
  const auto r = run({"indicial", "--link", path, "--set", "A", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.dump().find("-3") != std::string::npos);
  write_file(path, R"({"dim_link": 3, "volume": -1, "function_modes": [[0, 1]], "coclosed_one_form_modes": [[4, 6]]})");
  CHECK(run({"indicial", "--link", path, "--set", "A"}).code == 2);
  CHECK(run({"indicial", "--link", tmp_path("missing.json"), "--set", "A"}).code == 3);
}

TEST_CASE("config files and command-line precedence") {
  const auto path = tmp_path("cfg.json");
  write_file(path, R"({"k": 3, "format": "json"})");
  auto j = nlohmann::json::parse(run({"obstruction", "--config", path}).out);
  CHECK(j["dim_harmonic"] == 12);
  j = nlohmann::json::parse(run({"obstruction", "--config", path, "--k", "1"}).out);
  CHECK(j["dim_harmonic"] == 2);
  write_file(path, R"({"kk": 3})");
  CHECK(run({"obstruction", "--config", path}).code == 2);
  write_file(path, "{ not json");
  CHECK(run({"obstruction", "--config", path}).code == 2);
}

TEST_CASE("solve-mode function problem") {
  const auto r = run({"solve-mode", "--kind", "function", "--n", "4", "--lambda", "0", "--rhs", "r^-6", "--rate",
                      "-3", "--rmax", "100", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.contains("r"));
  const auto& rr = j["r"];
  const auto& v = j["value"];
  for (std::size_t i = 0; i < rr.size(); i += 16) {
    const double x = rr[i];
    CHECK(v[i].get<double>() == doctest::Approx(-std::pow(x, -4.0) / 8.0).epsilon(1e-7));
  }
  CHECK(run({"solve-mode", "--kind", "function", "--n", "4", "--lambda", "3", "--rhs", "0", "--rate", "1"}).code == 2);
  CHECK(run({"solve-mode", "--kind", "function", "--n", "4", "--lambda", "0", "--rhs", "r^", "--rate", "-3"}).code ==
        2);
}

TEST_CASE("mass subcommand") {
  const auto r = run({"mass", "--family", "burns", "--params", "c=1", "--formula"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["mass"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  CHECK(j["formula_rhs"]["rhs"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(j["normalization"] == "ac");
  CHECK(run({"mass", "--family", "burns", "--params", "q=1"}).code == 2);
  CHECK(run({"mass", "--family", "nope"}).code == 2);
}

TEST_CASE("output is deterministic and written to --out") {
  const std::vector<std::string> args = {"mass", "--family", "schwarzschild", "--params", "N=3,m=2",
                                         "--schedule", "10,2,6", "--seed", "5"};
  const auto a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto with_out = args;
  with_out.push_back("--out");
  with_out.push_back(tmp_path("mass.json"));
  CHECK(run(with_out).code == 0);
  std::ifstream f(tmp_path("mass.json"));
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == a.out);
  with_out.back() = "/nonexistent-dir/x.json";
  CHECK(run(with_out).code == 3);
}

TEST_CASE("classify with verification") {
  const auto r = run({"classify", "--sphere", "3", "--modes", "3", "--verify", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.contains("forms"));
  for (const auto& f : j["forms"]) CHECK(f["laplacian_residual"].get<double>() < 1e-8);
}

TEST_CASE("JSON formatting round-trips doubles") {
  const nlohmann::json j = {{"b", 0.1}, {"a", 1.0 / 3.0}, {"c", {1e-300, -2.5}}};
  const auto text = cli::dump_json(j);
  CHECK(text.find("\"a\"") < text.find("\"b\""));
  const auto back = nlohmann::json::parse(text);
  CHECK(back["a"].get<double>() == 1.0 / 3.0);
  CHECK(back["b"].get<double>() == 0.1);
  CHECK(back["c"][0].get<double>() == 1e-300);
  CHECK(cli::format_double(INFINITY) == "inf");
  CHECK(cli::format_double(0.5) == "0.5");
}

TEST_CASE("expression parser") {
  CHECK(cli::parse_expression("2*r^-3 + 1")(2.0) == doctest::Approx(1.25));
  CHECK(cli::parse_expression("-r^2")(3.0) == doctest::Approx(-9.0));
  CHECK(cli::parse_expression("exp(-r) * sin(pi*r/2)")(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(cli::parse_expression("sqrt(abs(-r)) / log(e)")(4.0) == doctest::Approx(2.0));
  CHECK(cli::parse_expression("atan(1)*4")(0.0) == doctest::Approx(M_PI));
  CHECK_THROWS_AS(cli::parse_expression("r +"), Error);
  CHECK_THROWS_AS(cli::parse_expression("foo(r)"), Error);
  CHECK_THROWS_AS(cli::parse_expression("(r"), Error);
}

TEST_CASE("CSV radial profiles") {
  const auto path = tmp_path("profile.csv");
  write_file(path, "r,value\n1,1\n2,0.25\n4,0.0625\n");
  const auto f = cli::load_profile_csv(path);
  CHECK(f(2.0) == doctest::Approx(0.25));
  CHECK(f(8.0) == doctest::Approx(1.0 / 64.0));
  CHECK(f(0.5) == doctest::Approx(1.0));
  CHECK(cli::parse_profile(path)(4.0) == doctest::Approx(0.0625));
  CHECK(cli::parse_profile("r^-2")(4.0) == doctest::Approx(0.0625));
  write_file(path, "r,value\n2,1\n1,0.5\n");
  CHECK_THROWS(cli::load_profile_csv(path));
}

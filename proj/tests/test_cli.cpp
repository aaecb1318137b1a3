#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fockdl/cli.hpp"

using namespace fockdl;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "fockdl_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream f(path);
  f << text;
  f.close();
  return path.string();
}

const char* kTwoModeSpec = R"json({
  "n_modes": 2,
  "seeds": [{"00": [1, 0]}],
  "alphabet": ["adag(0)", "adag(1)", "a(0)", "a(1)"],
  "depth": 3,
  "include_zero": true
})json";

const char* kFluxPiScenario = R"json({
  "defects": [{"pos": [0, 0], "flux": 3.141592653589793}],
  "i": [-1, 0], "j": [1, 0],
  "outbound": [[-1, 0], [0, -1], [1, 0]],
  "return": [[1, 0], [0, 1], [-1, 0]]
})json";

}  // namespace

TEST_CASE("the expand subcommand prints canonical normal-ordered forms") {
  unsetenv("FOCKDL_TOL");

  SECTION("golden expansions") {
    CHECK(run_cli({"expand", "a(0) adag(0)"}).out == "id + (-1) adag(0) a(0)\n");
    CHECK(run_cli({"expand", "a(0) a(0)"}).out == "zero\n");
    CHECK(run_cli({"expand", "adag(1) a(0) + a(0) adag(1)"}).out == "zero\n");
    CHECK(run_cli({"expand", "a(0) adag(0)"}).code == 0);
  }

  SECTION("json output carries the term list and is deterministic") {
    const CliResult first = run_cli({"expand", "a(0) adag(0)", "--format", "json"});
    REQUIRE(first.code == 0);
    const Json j = Json::parse(first.out);
    CHECK(j["canonical"] == "id + (-1) adag(0) a(0)");
    CHECK(j["input"] == "a(0) adag(0)");
    CHECK(j["n_modes"] == 1);
    REQUIRE(j["terms"].size() == 2);
    CHECK(j["terms"][0]["coefficient"] == Json::array({1.0, 0.0}));
    CHECK(j["terms"][0]["creators"].empty());
    CHECK(j["terms"][1]["coefficient"] == Json::array({-1.0, 0.0}));
    CHECK(j["terms"][1]["creators"] == Json::array({0}));
    CHECK(j["terms"][1]["annihilators"] == Json::array({0}));
    const CliResult second = run_cli({"expand", "a(0) adag(0)", "--format", "json"});
    CHECK(second.out == first.out);
  }

  SECTION("a mode-count hint widens the register") {
    const CliResult r = run_cli({"expand", "a(0)", "--modes", "3", "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["n_modes"] == 3);
  }

  SECTION("parse errors report the position and exit 2") {
    const CliResult r = run_cli({"expand", "a(0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("position") != std::string::npos);
    CHECK(run_cli({"expand", "a(0) - a(1)"}).code == 2);
  }
}

TEST_CASE("model-build writes a closure that check can consume") {
  unsetenv("FOCKDL_TOL");
  const std::string spec_path = write_file("two_mode_spec.json", kTwoModeSpec);
  const std::string model_path = (scratch_dir() / "two_mode_model.json").string();

  const CliResult built = run_cli({"model-build", "--spec", spec_path, "--out", model_path});
  REQUIRE(built.code == 0);
  CHECK(built.out.find("4 states + zero") != std::string::npos);
  REQUIRE(std::filesystem::exists(model_path));

  std::ifstream in(model_path);
  Json doc;
  in >> doc;
  CHECK(doc["closed"] == true);
  REQUIRE(doc["states"].size() == 4);
  CHECK(doc["states"][0]["name"] == "00");
  CHECK(doc["states"][0]["amplitudes"]["00"] == Json::array({1.0, 0.0}));

  SECTION("check reads both the built file and the raw specification") {
    for (const std::string& path : {model_path, spec_path}) {
      const CliResult r = run_cli({"check", "--model", path, "--formula", "<h(a(0))>T"});
      REQUIRE(r.code == 0);
      CHECK(r.out.find("10: true") != std::string::npos);
      CHECK(r.out.find("11: true") != std::string::npos);
      CHECK(r.out.find("00: false") != std::string::npos);
      CHECK(r.out.find("01: false") != std::string::npos);
      CHECK(r.out.find("zero: false") != std::string::npos);
      CHECK(r.out.find("valid on genuine states: no") != std::string::npos);
    }
  }

  SECTION("assertion exit codes distinguish valid from failing formulas") {
    CHECK(run_cli({"check", "--model", model_path, "--formula", "T", "--assert-valid"}).code == 0);
    CHECK(run_cli({"check", "--model", model_path, "--formula", "<h(a(0))>T", "--assert-valid"})
              .code == 1);
    const CliResult multi = run_cli({"check", "--model", model_path, "--formula", "T",
                                     "--formula", "T -> T", "--assert-valid"});
    CHECK(multi.code == 0);
    CHECK(multi.out.find("formula: T -> T") != std::string::npos);
  }

  SECTION("json reports are structured and byte-stable") {
    const std::vector<std::string> args = {"check",     "--model",      model_path,
                                           "--formula", "<h(a(0))>T",   "--format", "json"};
    const CliResult first = run_cli(args);
    REQUIRE(first.code == 0);
    const Json j = Json::parse(first.out);
    CHECK(j["n_modes"] == 2);
    CHECK(j["states"] == Json::array({"00", "10", "01", "11", "zero"}));
    REQUIRE(j["formulas"].size() == 1);
    CHECK(j["formulas"][0]["canonical"] == "<h(a(0))>T");
    REQUIRE(j["formulas"][0]["truth"].size() == 5);
    CHECK(j["formulas"][0]["truth"][1]["state"] == "10");
    CHECK(j["formulas"][0]["truth"][1]["holds"] == true);
    CHECK(j["formulas"][0]["valid_genuine"] == false);
    CHECK(j["all_valid_genuine"] == false);
    CHECK(run_cli(args).out == first.out);
  }

  SECTION("malformed formulas exit 2 with a position") {
    const CliResult r = run_cli({"check", "--model", model_path, "--formula", "<h(a(0)>T"});
    CHECK(r.code == 2);
    CHECK(r.err.find("at position") != std::string::npos);
  }

  SECTION("missing and malformed files exit 2") {
    CHECK(run_cli({"check", "--model", "/nonexistent.json", "--formula", "T"}).code == 2);
    const std::string junk = write_file("junk.json", "{not json");
    CHECK(run_cli({"check", "--model", junk, "--formula", "T"}).code == 2);
    const std::string incomplete = write_file("incomplete.json", R"json({"n_modes": 2})json");
    const CliResult r = run_cli({"check", "--model", incomplete, "--formula", "T"});
    CHECK(r.code == 2);
    CHECK(r.err.find("seeds") != std::string::npos);
  }
}

TEST_CASE("every demo passes its checked assertions") {
  unsetenv("FOCKDL_TOL");
  for (const std::string& name :
       {"vacuum", "zero", "projective", "lagrangian", "seriality", "transition-chain", "ab"}) {
    INFO("demo " << name);
    const CliResult r = run_cli({"demo", name});
    CHECK(r.code == 0);
    CHECK(r.out.find("result: ok") != std::string::npos);
    CHECK(r.out.find("FAIL ") == std::string::npos);
  }

  SECTION("the interference demo accepts a flux argument") {
    const CliResult r = run_cli({"demo", "ab", "--flux", "3.14159"});
    CHECK(r.code == 0);
    // |1 - exp(3.14159i)| = 1.9999999999982..., which is 2 at twelve significant digits.
    CHECK(r.out.find("deviation from identity: 2\n") != std::string::npos);
    CHECK(r.out.find("result: ok") != std::string::npos);
  }

  SECTION("mode counts are validated where demos accept them") {
    CHECK(run_cli({"demo", "vacuum", "--modes", "3"}).code == 0);
    CHECK(run_cli({"demo", "vacuum", "--modes", "9"}).code == 2);
    CHECK(run_cli({"demo", "ab", "--modes", "3"}).code == 0);
  }

  SECTION("unknown demo names are usage errors") {
    CHECK(run_cli({"demo", "frobnicate"}).code == 2);
  }
}

TEST_CASE("holonomy scenarios load from files and report the loop") {
  unsetenv("FOCKDL_TOL");
  const std::string path = write_file("flux_pi.json", kFluxPiScenario);

  SECTION("text report") {
    const CliResult r = run_cli({"holonomy", "--scenario", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("deviation from identity: 2\n") != std::string::npos);
    CHECK(r.out.find("winding: 1") != std::string::npos);
    CHECK(r.out.find("loop is trivial: no") != std::string::npos);
    CHECK(r.out.find("amplitudes match the loop phase: yes") != std::string::npos);
  }

  SECTION("json report") {
    const CliResult r = run_cli({"holonomy", "--scenario", path, "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["loop"]["deviation"].get<double>() == Catch::Approx(2.0).margin(1e-9));
    CHECK(j["loop"]["winding"] == Json::array({1}));
    CHECK(j["survivor_executable"] == true);
    CHECK(j["loop_is_trivial"] == false);
    CHECK(j["chain"]["whole_executable"] == true);
  }

  SECTION("schema violations exit 2") {
    const std::string missing = write_file("missing_leg.json",
                                           R"json({"defects": [], "i": [0, 0], "j": [1, 0],
                                               "outbound": [[0, 0], [1, 0]]})json");
    const CliResult r = run_cli({"holonomy", "--scenario", missing});
    CHECK(r.code == 2);
    CHECK(r.err.find("return") != std::string::npos);
  }
}

TEST_CASE("the environment variable overrides the ray tolerance") {
  unsetenv("FOCKDL_TOL");
  const std::string spec = write_file("superposed_seeds.json", R"json({
    "n_modes": 1,
    "seeds": [{"0": [1, 0]}, {"0": [0.70710678118654752, 0], "1": [0.70710678118654752, 0]}],
    "alphabet": [],
    "depth": 1,
    "include_zero": true
  })json");
  const std::string out_path = (scratch_dir() / "superposed_model.json").string();

  const CliResult strict = run_cli({"model-build", "--spec", spec, "--out", out_path});
  REQUIRE(strict.code == 0);
  CHECK(strict.out.find("2 states") != std::string::npos);

  setenv("FOCKDL_TOL", "0.45", 1);
  const CliResult coarse = run_cli({"model-build", "--spec", spec, "--out", out_path});
  unsetenv("FOCKDL_TOL");
  REQUIRE(coarse.code == 0);
  CHECK(coarse.out.find("1 states") != std::string::npos);

  setenv("FOCKDL_TOL", "banana", 1);
  const CliResult bad = run_cli({"model-build", "--spec", spec, "--out", out_path});
  unsetenv("FOCKDL_TOL");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("FOCKDL_TOL") != std::string::npos);
}

TEST_CASE("top-level usage errors exit 2") {
  unsetenv("FOCKDL_TOL");
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"check"}).code == 2);
  CHECK(run_cli({"expand", "a(0)", "--format", "yaml"}).code == 2);
  const CliResult help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("check") != std::string::npos);
}

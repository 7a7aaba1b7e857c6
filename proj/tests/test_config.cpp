#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tangle/config.hpp"
#include "tangle/runner.hpp"

using namespace tangle;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("tanglesim_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool has_error(const std::vector<std::string>& errors,
               const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const auto& e) {
    return e.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("minimal config is valid and defaults are applied") {
  const ParseResult r = parse_config(
      "mode = simulate\nlambda = 100\nh = 1\na_h = 1\nu = 1\n");
  REQUIRE(r.errors.empty());
  const RunConfig& cfg = *r.config;
  CHECK(cfg.horizon == 10.0);       // 10h
  CHECK(cfg.dt == 1.0 / 1000.0);    // h/1000
  CHECK(cfg.replicas == 50);
  CHECK(cfg.base_seed == 1);
  CHECK(cfg.max_tries == 64);
  CHECK(cfg.out == "out");
}

TEST_CASE("non-integer step products are rejected") {
  const ParseResult r = parse_config(
      "mode = simulate\nlambda = 100\nh = 0.305\na_h = 1\nu = 1\n");
  REQUIRE(!r.errors.empty());
  CHECK(has_error(r.errors, "lambda"));
  CHECK(has_error(r.errors, "whole number"));

  // 100 * 0.3 is exactly 30 steps, so this one is fine.
  const ParseResult ok = parse_config(
      "mode = simulate\nlambda = 100\nh = 0.3\na_h = 1\nu = 1\n");
  CHECK(ok.errors.empty());
}

TEST_CASE("profile values outside the band name their cell") {
  const ParseResult r = parse_config(
      "mode = fluid\nh = 1\na_h = 1\nu = 1 2.5 0.5\n");
  REQUIRE(!r.errors.empty());
  CHECK(has_error(r.errors, "u[1]"));
}

TEST_CASE("every violation is reported, each naming its key") {
  const ParseResult r = parse_config(
      "mode = sweep\n"
      "lambdas = 100 250\n"  // 250 * 0.4 = 100 ok; pair below breaks h
      "h = -1\n"
      "a_h = 0\n"
      "u = 3\n"
      "bogus = 1\n");
  CHECK(r.errors.size() >= 4);
  CHECK(has_error(r.errors, "h:"));
  CHECK(has_error(r.errors, "a_h:"));
  CHECK(has_error(r.errors, "u[0]"));
  CHECK(has_error(r.errors, "bogus"));
}

TEST_CASE("unknown, duplicate and malformed keys") {
  std::vector<std::string> errors;
  parse_config_raw("whatever = 1\n", errors);
  CHECK(has_error(errors, "unknown key"));
  errors.clear();
  parse_config_raw("h = 1\nh = 2\n", errors);
  CHECK(has_error(errors, "duplicate"));
  errors.clear();
  parse_config_raw("h 1\n", errors);
  CHECK(has_error(errors, "key = value"));
  errors.clear();
  parse_config_raw("h = abc\n", errors);
  CHECK(has_error(errors, "not a number"));
}

TEST_CASE("mode handling") {
  CHECK(parse_config("lambda = 1\n").errors.front() == "mode: missing");
  CHECK(!parse_config("h = 1\na_h = 1\nu = 1\n", Mode::fluid)
             .errors.empty() == false);
  CHECK(has_error(parse_config("mode = warp\nh = 1\n").errors,
                  "simulate|fluid|sweep|decay"));
  CHECK(mode_from_name("decay") == Mode::decay);
  CHECK(!mode_from_name("nope").has_value());
  CHECK(std::string(mode_name(Mode::sweep)) == "sweep");
}

TEST_CASE("mode-specific floors") {
  CHECK(has_error(
      parse_config("mode = fluid\nh = 1\nT = 1.5\na_h = 1\nu = 1\n").errors,
      "T:"));
  CHECK(has_error(
      parse_config("mode = decay\nh = 1\nT = 4\na_h = 1\nu = 1\n").errors,
      "T:"));
  CHECK(has_error(
      parse_config("mode = fluid\nh = 1\ndt = 0.3\na_h = 1\nu = 1\n").errors,
      "dt:"));
  CHECK(has_error(parse_config("mode = sweep\nh = 1\na_h = 1\nu = 1\n").errors,
                  "lambdas"));
  CHECK(has_error(
      parse_config("mode = sweep\nlambdas = 100 100\nh = 1\na_h = 1\nu = 1\n")
          .errors,
      "duplicate"));
}

TEST_CASE("tiny initial values warn but do not fail") {
  const ParseResult r = parse_config(
      "mode = fluid\nh = 1\na_h = 0.001\nu = 1\n");
  CHECK(r.errors.empty());
  REQUIRE(!r.warnings.empty());
  CHECK(r.warnings.front().find("a_h") != std::string::npos);
}

TEST_CASE("canonical echo is stable") {
  const ParseResult r = parse_config(
      "mode = fluid\nh = 1\na_h = 1\nu = 1 0.5\n");
  REQUIRE(r.errors.empty());
  const std::string echo = canonical_config(*r.config);
  CHECK(echo == canonical_config(*r.config));
  CHECK(echo.find("mode = fluid") != std::string::npos);
  CHECK(echo.find("u = 1 0.5") != std::string::npos);
}

TEST_CASE("fluid run writes the solution and refuses to clobber") {
  const fs::path dir = fresh_dir("fluid");
  RunConfig cfg;
  cfg.mode = Mode::fluid;
  cfg.h = 1.0;
  cfg.a_start = 1.0;
  cfg.u = {1.0};
  cfg.horizon = 4.0;
  cfg.dt = 1.0 / 100.0;
  cfg.out = dir.string();
  REQUIRE(finalize_config(cfg).empty());

  CHECK(run(cfg) == 0);
  CHECK(fs::exists(dir / "fluid.csv"));
  CHECK(fs::exists(dir / "manifest.txt"));
  CHECK(slurp(dir / "manifest.txt").find("status = ok") != std::string::npos);

  // Stationary start: the a column stays at h.
  std::istringstream csv(slurp(dir / "fluid.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,a,b,da");
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double a = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(std::fabs(a - 1.0) <= 1e-8);
  }

  CHECK(run(cfg) == 2);  // directory now exists
  cfg.force = true;
  CHECK(run(cfg) == 0);
  fs::remove_all(dir);
}

TEST_CASE("sweep runs are byte-identical under a fixed seed") {
  RunConfig cfg;
  cfg.mode = Mode::sweep;
  cfg.lambdas = {100.0, 400.0};
  cfg.h = 1.0;
  cfg.a_start = 1.0;
  cfg.u = {1.0};
  cfg.horizon = 3.0;
  cfg.replicas = 2;
  cfg.base_seed = 99;
  const fs::path dir_a = fresh_dir("sweep_a");
  const fs::path dir_b = fresh_dir("sweep_b");

  cfg.out = dir_a.string();
  REQUIRE(finalize_config(cfg).empty());
  REQUIRE(run(cfg) == 0);
  cfg.out = dir_b.string();
  cfg.workers = 2;
  REQUIRE(run(cfg) == 0);

  CHECK(slurp(dir_a / "sweep.csv") == slurp(dir_b / "sweep.csv"));
  CHECK(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"));
  const std::string sweep = slurp(dir_a / "sweep.csv");
  CHECK(sweep.find("lambda,replica,seed,tries,sup_dev_A,sup_dev_B") == 0);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("simulate and decay runs leave their artifacts") {
  {
    const fs::path dir = fresh_dir("simulate");
    RunConfig cfg;
    cfg.mode = Mode::simulate;
    cfg.lambda = 50.0;
    cfg.h = 1.0;
    cfg.a_start = 1.0;
    cfg.u = {1.0};
    cfg.horizon = 3.0;
    cfg.out = dir.string();
    REQUIRE(finalize_config(cfg).empty());
    CHECK(run(cfg) == 0);
    const std::string trace = slurp(dir / "trace.csv");
    CHECK(trace.find("n,t,X,W,L,U") == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') ==
          1 + 150 - 50 + 1);  // header + rows m..ceil(lambda T)
    const std::string coupling = slurp(dir / "coupling.csv");
    CHECK(coupling.find("lambda,xi_alpha,tries,accepted,sup_dev_init") == 0);
    CHECK(coupling.find("\n50,50,1,1,") != std::string::npos);
    fs::remove_all(dir);
  }
  {
    const fs::path dir = fresh_dir("decay");
    RunConfig cfg;
    cfg.mode = Mode::decay;
    cfg.h = 1.0;
    cfg.a_start = 2.0;
    cfg.u = {0.5};
    cfg.horizon = 8.0;
    cfg.dt = 1.0 / 200.0;
    cfg.out = dir.string();
    REQUIRE(finalize_config(cfg).empty());
    CHECK(run(cfg) == 0);
    CHECK(slurp(dir / "decay.csv").find("t,abs_a_minus_h,bound") == 0);
    fs::remove_all(dir);
  }
}

#include <fstream>

#include "doctest.h"
#include "eigentraj/config.hpp"
#include "eigentraj/errors.hpp"
#include "synthetic.hpp"

using namespace eigentraj;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an eigentraj::Error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("exit codes follow the documented contract") {
  CHECK(exit_code(ErrorKind::argument) == 2);
  CHECK(exit_code(ErrorKind::shape) == 2);
  CHECK(exit_code(ErrorKind::config) == 2);
  CHECK(exit_code(ErrorKind::parse) == 3);
  CHECK(exit_code(ErrorKind::data) == 3);
  CHECK(exit_code(ErrorKind::io) == 3);
  CHECK(exit_code(ErrorKind::numeric) == 4);
  CHECK(std::string(to_string(ErrorKind::numeric)) == "numeric");
}

TEST_CASE("parse errors carry their line") {
  const ParseError e(7, "bad");
  CHECK(e.line() == 7);
  CHECK(e.kind() == ErrorKind::parse);
  CHECK(std::string(e.what()) == "line 7: bad");
}

TEST_CASE("default config is valid and runs every fold") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.folds().size() == 5);
  CHECK(c.k == 6);
  CHECK(c.modes == 20);
  CHECK(c.col_threshold == 0.1);
  CHECK(c.nonlinear_tol == 0.02);
  CHECK(c.descriptor_path("eth") == std::filesystem::path("out") / "descriptor_eth.json");
  c.held_out = "zara2";
  CHECK(c.folds() == std::vector<std::string>{"zara2"});
  c.descriptor = "fixed.json";
  CHECK(c.descriptor_path("zara2") == "fixed.json");
}

TEST_CASE("validate rejects values downstream modules cannot use") {
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    return kind_of([&] { c.validate(); });
  };
  CHECK(bad([](RunConfig& c) { c.k = 17; }) == ErrorKind::argument);
  CHECK(bad([](RunConfig& c) { c.k = 0; }) == ErrorKind::argument);
  CHECK(bad([](RunConfig& c) { c.held_out = "nowhere"; }) == ErrorKind::config);
  CHECK(bad([](RunConfig& c) { c.scenes = {"a", "a"}; }) == ErrorKind::config);
  CHECK(bad([](RunConfig& c) { c.t_obs = 1; }) == ErrorKind::argument);
  CHECK(bad([](RunConfig& c) { c.noise_sigmas = {-0.1}; }) == ErrorKind::argument);
  CHECK(bad([](RunConfig& c) { c.frame = "sideways"; }) == ErrorKind::config);
  CHECK(bad([](RunConfig& c) { c.layout = "diagonal"; }) == ErrorKind::config);
  CHECK(bad([](RunConfig& c) { c.bspline_controls = 5; }) == ErrorKind::argument);
  CHECK(bad([](RunConfig& c) { c.unit_scale = 0.0; }) == ErrorKind::argument);
}

TEST_CASE("config json round trip and merge") {
  RunConfig c;
  c.k = 4;
  c.scenes = {"a", "b"};
  c.noise_sigmas = {0.0, 0.3};
  nlohmann::json j = c;
  RunConfig d;
  merge_from_json(j, d);
  CHECK(nlohmann::json(d) == j);

  RunConfig e;
  merge_from_json(nlohmann::json{{"k", 8}}, e);
  CHECK(e.k == 8);
  CHECK(e.modes == 20);

  CHECK(kind_of([&] { merge_from_json(nlohmann::json{{"kk", 8}}, e); }) == ErrorKind::config);
  CHECK(kind_of([&] { merge_from_json(nlohmann::json{{"k", "six"}}, e); }) == ErrorKind::config);
  CHECK(kind_of([&] { merge_from_json(nlohmann::json::array(), e); }) == ErrorKind::config);
}

TEST_CASE("load_config reads a file and reports bad ones as config errors") {
  testing::TempDir dir("config");
  const auto path = dir.path() / "run.json";
  std::ofstream(path) << R"({"k": 12, "held_out": "eth", "seed": 3})";
  const RunConfig c = load_config(path);
  CHECK(c.k == 12);
  CHECK(c.held_out == "eth");
  CHECK(c.seed == 3);

  std::ofstream(dir.path() / "broken.json") << "{";
  CHECK(kind_of([&] { load_config(dir.path() / "broken.json"); }) == ErrorKind::config);
  CHECK(kind_of([&] { load_config(dir.path() / "missing.json"); }) == ErrorKind::config);
}

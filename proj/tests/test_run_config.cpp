#include <doctest.h>

#include <fstream>

#include "kgav/error.hpp"
#include "kgav/run_config.hpp"
#include "support.hpp"

using namespace kgav;
using nlohmann::json;

TEST_CASE("defaults validate and round-trip") {
  RunConfig c;
  c.validate();
  auto back = run_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("file values and overrides") {
  fixtures::TempDir dir("cfg");
  auto path = dir.path / "run.json";
  std::ofstream(path) << R"({"seed": 9, "modes": ["nlg", "bag-of-labels"], "kgqa": {"candidates": 30},
                             "sampling": {"ratio": 50, "answer_field": "nlg"}})";
  auto c = load_run_config(path, json{{"/kgqa/candidates", 40}, {"/workers", 4}});
  CHECK(c.seed == 9);
  CHECK(c.kgqa.candidates == 40);
  CHECK(c.kgqa.max_correct_rank == 10);
  CHECK(c.workers == 4);
  CHECK(c.modes.size() == 2);
  CHECK(c.sampling_config().negatives_per_positive == 50);
  CHECK(c.sampling_config().seed == 9);
  CHECK(c.mock_kgqa_config().candidates == 40);
}

TEST_CASE("bad configs are rejected") {
  fixtures::TempDir dir("cfg");
  auto write = [&](const std::string& text) {
    auto path = dir.path / "c.json";
    std::ofstream(path, std::ios::trunc) << text;
    return path;
  };
  CHECK_THROWS_AS(load_run_config(write(R"({"sed": 1})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"kgqa": {"candidatez": 1}})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"seed": null})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"n_runs": 1})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"seed": "x"})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"kgqa": 3})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"modes": []})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"modes": ["a1"]})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"kgqa": {"backend": "remote"}})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write(R"({"classifier": {"batch_size": 300}})")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write("[1]")), ConfigError);
  CHECK_THROWS_AS(load_run_config(write("{")), ConfigError);
  CHECK_THROWS_AS(load_run_config(dir.path / "missing.json"), ConfigError);
  CHECK_THROWS_AS(load_run_config({}, json{{"/nope", 1}}), ConfigError);
  CHECK(load_run_config({}, json{{"/n_runs", 2}}).n_runs == 2);
}

TEST_CASE("config errors carry the config category") {
  try {
    load_run_config({}, json{{"/n_runs", 1}});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::config);
    CHECK(to_string(e.category()) == "config");
  }
}

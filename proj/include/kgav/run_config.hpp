#pragma once

// Resolved configuration of one experiment run: a JSON file with flag
// overrides applied on top.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgav/classifier.hpp"
#include "kgav/dataset.hpp"
#include "kgav/evaluation.hpp"
#include "kgav/synthetic.hpp"
#include "kgav/verbalizer.hpp"

namespace kgav {

inline constexpr const char* kTokenEnv = "KGAV_ENDPOINT_TOKEN";

struct RunConfig {
  std::uint64_t seed = 42;

  struct Paths {
    std::string dataset;
    std::string cache_dir;
    std::string model;
    std::string model_nlg;  ///< per-mode overrides of `model`
    std::string model_bag;
    std::string report_dir;
    std::string mapping;  ///< KGQA response mapping file
  } paths;

  struct Kgqa {
    std::string backend = "mock";  ///< mock | remote
    std::string url;
    std::string kb = "wikidata";
    std::string lang = "en";
    double timeout_seconds = 60.0;
    int concurrency = 1;
    std::size_t candidates = 60;
    int max_correct_rank = 10;
    double absent_probability = 0.2;
  } kgqa;

  struct Endpoint {
    std::string backend = "mock";  ///< mock | http
    std::string url;
    double timeout_seconds = 30.0;
    bool use_post = false;
    std::string language = "en";
  } endpoint;

  synthetic::WorldConfig world;

  std::vector<verbalizer::Mode> modes = {verbalizer::Mode::nlg};

  struct Sampling {
    int ratio = 1;
    double split = 0.67;
    bool group_by_question = false;
    dataset::AnswerField answer_field = dataset::AnswerField::sentence;
  } sampling;

  classifier::Hyperparams training;

  struct Classifier {
    std::string backend = "baseline";  ///< baseline | remote | oracle
    std::string url;
    std::string model_id;
    double timeout_seconds = 60.0;
    std::size_t batch_size = 256;
    double threshold = classifier::kDefaultThreshold;
  } classifier;

  std::vector<std::size_t> k_values = {1, 5};
  int n_runs = 10;
  int workers = 1;
  std::size_t row_cap = kg::kDefaultRowCap;
  bool drop_stripped = false;
  /// Questions evaluated by `filter`; 0 = all.
  std::size_t max_questions = 500;

  dataset::SamplingConfig sampling_config() const;
  synthetic::MockKgqaConfig mock_kgqa_config() const;
  evaluation::EvaluationConfig evaluation_config() const;

  /// Throws ConfigError.
  void validate() const;
};

/// Unknown keys are rejected. Throws ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// `overrides` is a flat object of JSON-pointer -> value, applied over the
/// file (or defaults when `path` is empty).
RunConfig load_run_config(const std::filesystem::path& path, const nlohmann::json& overrides = {});

}  // namespace kgav

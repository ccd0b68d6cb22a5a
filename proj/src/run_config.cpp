#include "kgav/run_config.hpp"

#include <fstream>

#include "kgav/error.hpp"

namespace kgav {

using nlohmann::json;

dataset::SamplingConfig RunConfig::sampling_config() const {
  dataset::SamplingConfig s;
  s.negatives_per_positive = sampling.ratio;
  s.seed = seed;
  s.split_ratio = sampling.split;
  s.group_by_question = sampling.group_by_question;
  s.answer_field = sampling.answer_field;
  return s;
}

synthetic::MockKgqaConfig RunConfig::mock_kgqa_config() const {
  synthetic::MockKgqaConfig m;
  m.candidates = kgqa.candidates;
  m.max_correct_rank = kgqa.max_correct_rank;
  m.absent_probability = kgqa.absent_probability;
  m.seed = seed;
  return m;
}

evaluation::EvaluationConfig RunConfig::evaluation_config() const {
  evaluation::EvaluationConfig e;
  e.k_values = k_values;
  return e;
}

void RunConfig::validate() const {
  if (kgqa.backend != "mock" && kgqa.backend != "remote") {
    throw ConfigError("kgqa.backend must be mock or remote");
  }
  if (kgqa.backend == "remote" && kgqa.url.empty()) throw ConfigError("kgqa.url is required for the remote backend");
  if (endpoint.backend != "mock" && endpoint.backend != "http") {
    throw ConfigError("endpoint.backend must be mock or http");
  }
  if (endpoint.backend == "http" && endpoint.url.empty()) throw ConfigError("endpoint.url is required for the http backend");
  if (classifier.backend != "baseline" && classifier.backend != "remote" &&
      classifier.backend != "oracle") {
    throw ConfigError("classifier.backend must be baseline, remote or oracle");
  }
  if (classifier.backend == "remote" && classifier.url.empty()) throw ConfigError("classifier.url is required for the remote backend");
  if (!(classifier.threshold >= 0.0 && classifier.threshold <= 1.0)) throw ConfigError("classifier.threshold must be in [0, 1]");
  if (classifier.batch_size < 1 || classifier.batch_size > 256) throw ConfigError("classifier.batch_size must be in [1, 256]");
  if (modes.empty()) throw ConfigError("at least one verbalization mode is required");
  if (n_runs < 2) throw ConfigError("n_runs must be >= 2");
  if (workers < 1 || kgqa.concurrency < 1) throw ConfigError("workers and kgqa.concurrency must be >= 1");
  if (row_cap < 1) throw ConfigError("row_cap must be >= 1");
  if (training.epochs < 1 || !(training.learning_rate > 0.0) || training.l2 < 0.0 || training.dimension < 2) {
    throw ConfigError("training hyperparameters out of range");
  }
  sampling_config().validate();
  mock_kgqa_config().validate();
  evaluation_config().validate();
  world.validate();
}

json to_json(const RunConfig& c) {
  json modes = json::array();
  for (auto m : c.modes) modes.push_back(verbalizer::to_string(m));
  return {
      {"seed", c.seed},
      {"paths",
       {{"dataset", c.paths.dataset},
        {"cache_dir", c.paths.cache_dir},
        {"model", c.paths.model},
        {"model_nlg", c.paths.model_nlg},
        {"model_bag", c.paths.model_bag},
        {"report_dir", c.paths.report_dir},
        {"mapping", c.paths.mapping}}},
      {"kgqa",
       {{"backend", c.kgqa.backend},
        {"url", c.kgqa.url},
        {"kb", c.kgqa.kb},
        {"lang", c.kgqa.lang},
        {"timeout_seconds", c.kgqa.timeout_seconds},
        {"concurrency", c.kgqa.concurrency},
        {"candidates", c.kgqa.candidates},
        {"max_correct_rank", c.kgqa.max_correct_rank},
        {"absent_probability", c.kgqa.absent_probability}}},
      {"endpoint",
       {{"backend", c.endpoint.backend},
        {"url", c.endpoint.url},
        {"timeout_seconds", c.endpoint.timeout_seconds},
        {"use_post", c.endpoint.use_post},
        {"language", c.endpoint.language}}},
      {"synthetic", {{"persons", c.world.persons}, {"seed", c.world.seed}}},
      {"modes", modes},
      {"sampling",
       {{"ratio", c.sampling.ratio},
        {"split", c.sampling.split},
        {"group_by_question", c.sampling.group_by_question},
        {"answer_field", dataset::to_string(c.sampling.answer_field)}}},
      {"training",
       {{"epochs", c.training.epochs},
        {"learning_rate", c.training.learning_rate},
        {"l2", c.training.l2},
        {"dimension", c.training.dimension}}},
      {"classifier",
       {{"backend", c.classifier.backend},
        {"url", c.classifier.url},
        {"model_id", c.classifier.model_id},
        {"timeout_seconds", c.classifier.timeout_seconds},
        {"batch_size", c.classifier.batch_size},
        {"threshold", c.classifier.threshold}}},
      {"k_values", c.k_values},
      {"n_runs", c.n_runs},
      {"workers", c.workers},
      {"row_cap", c.row_cap},
      {"drop_stripped", c.drop_stripped},
      {"max_questions", c.max_questions},
  };
}

namespace {

void reject_unknown(const json& given, const json& known, const std::string& where) {
  if (!given.is_object()) return;
  for (const auto& [key, value] : given.items()) {
    std::string path = where + "/" + key;
    if (!known.contains(key)) throw ConfigError("unknown config key " + path);
    if (value.is_null()) throw ConfigError("null value for " + path);
    if (known[key].is_object()) {
      if (!value.is_object()) throw ConfigError(path + " must be an object");
      reject_unknown(value, known[key], path);
    }
  }
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const json defaults = to_json(RunConfig{});
  reject_unknown(j, defaults, "");
  json m = defaults;
  m.merge_patch(j);
  try {
    RunConfig c;
    c.seed = m["seed"].get<std::uint64_t>();
    const auto& p = m["paths"];
    c.paths.dataset = p["dataset"].get<std::string>();
    c.paths.cache_dir = p["cache_dir"].get<std::string>();
    c.paths.model = p["model"].get<std::string>();
    c.paths.model_nlg = p["model_nlg"].get<std::string>();
    c.paths.model_bag = p["model_bag"].get<std::string>();
    c.paths.report_dir = p["report_dir"].get<std::string>();
    c.paths.mapping = p["mapping"].get<std::string>();
    const auto& q = m["kgqa"];
    c.kgqa.backend = q["backend"];
    c.kgqa.url = q["url"];
    c.kgqa.kb = q["kb"];
    c.kgqa.lang = q["lang"];
    c.kgqa.timeout_seconds = q["timeout_seconds"];
    c.kgqa.concurrency = q["concurrency"];
    c.kgqa.candidates = q["candidates"];
    c.kgqa.max_correct_rank = q["max_correct_rank"];
    c.kgqa.absent_probability = q["absent_probability"];
    const auto& e = m["endpoint"];
    c.endpoint.backend = e["backend"];
    c.endpoint.url = e["url"];
    c.endpoint.timeout_seconds = e["timeout_seconds"];
    c.endpoint.use_post = e["use_post"];
    c.endpoint.language = e["language"];
    c.world.persons = m["synthetic"]["persons"];
    c.world.seed = m["synthetic"]["seed"];
    c.modes.clear();
    for (const auto& mode : m["modes"]) c.modes.push_back(verbalizer::mode_from_string(mode.get<std::string>()));
    const auto& s = m["sampling"];
    c.sampling.ratio = s["ratio"];
    c.sampling.split = s["split"];
    c.sampling.group_by_question = s["group_by_question"];
    c.sampling.answer_field = dataset::answer_field_from_string(s["answer_field"].get<std::string>());
    const auto& t = m["training"];
    c.training.epochs = t["epochs"];
    c.training.learning_rate = t["learning_rate"];
    c.training.l2 = t["l2"];
    c.training.dimension = t["dimension"];
    const auto& k = m["classifier"];
    c.classifier.backend = k["backend"];
    c.classifier.url = k["url"];
    c.classifier.model_id = k["model_id"];
    c.classifier.timeout_seconds = k["timeout_seconds"];
    c.classifier.batch_size = k["batch_size"];
    c.classifier.threshold = k["threshold"];
    c.k_values = m["k_values"].get<std::vector<std::size_t>>();
    c.n_runs = m["n_runs"];
    c.workers = m["workers"];
    c.row_cap = m["row_cap"];
    c.drop_stripped = m["drop_stripped"];
    c.max_questions = m["max_questions"];
    return c;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad config value: ") + ex.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path, const json& overrides) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
  }
  const json known = to_json(RunConfig{});
  for (const auto& [pointer, value] : overrides.items()) {
    json::json_pointer ptr;
    try {
      ptr = json::json_pointer(pointer);
    } catch (const json::exception&) {
      throw ConfigError("bad override key " + pointer);
    }
    if (!known.contains(ptr)) throw ConfigError("unknown override " + pointer);
    j[ptr] = value;
  }
  auto config = run_config_from_json(j);
  config.validate();
  return config;
}

}  // namespace kgav

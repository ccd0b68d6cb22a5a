// kgav: answer-validation experiments over KGQA candidate lists.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "kgav/cache.hpp"
#include "kgav/classifier.hpp"
#include "kgav/dataset.hpp"
#include "kgav/error.hpp"
#include "kgav/evaluation.hpp"
#include "kgav/kg_client.hpp"
#include "kgav/pipeline.hpp"
#include "kgav/qa_client.hpp"
#include "kgav/run_config.hpp"
#include "kgav/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kgav;

namespace {

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::backend: return 3;
    case ErrorCategory::data: return 4;
  }
  return 4;
}

struct Flags {
  std::string config_path;
  json overrides = json::object();
};

template <class T>
CLI::Option* flag(CLI::App* app, Flags& f, const std::string& name, const std::string& pointer,
                  const std::string& help) {
  return app->add_option_function<T>(
      name, [&f, pointer](const T& v) { f.overrides[pointer] = v; }, help);
}

void switch_flag(CLI::App* app, Flags& f, const std::string& name, const std::string& pointer,
                 const std::string& help) {
  app->add_flag_callback(name, [&f, pointer] { f.overrides[pointer] = true; }, help);
}

void common_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON run config; flags override it");
  flag<std::uint64_t>(app, f, "--seed", "/seed", "run seed");
  flag<int>(app, f, "--workers", "/workers", "worker threads");
  flag<std::string>(app, f, "--cache-dir", "/paths/cache_dir", "response cache directory");
}

RunConfig resolve(const Flags& f) { return load_run_config(f.config_path, f.overrides); }

json provenance(const RunConfig& c) { return {{"config", to_json(c)}, {"seed", c.seed}}; }

void require_file(const std::string& path, const std::string& what, bool is_config = false) {
  if (path.empty()) throw ConfigError(what + " path is required");
  if (fs::is_regular_file(path)) return;
  if (is_config) throw ConfigError(what + " not found: " + path);
  throw IoError(what + " not found: " + path);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string markdown_footer(const RunConfig& c) {
  return "\n<!-- run-config: " + provenance(c).dump() + " -->\n";
}

std::string csv_header(const RunConfig& c) { return "# run-config: " + provenance(c).dump() + "\n"; }

std::vector<dataset::VanillaRecord> load_records(const std::string& path) {
  require_file(path, "dataset");
  auto loaded = dataset::load_vanilla(path);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return std::move(loaded.records);
}

// ---------------------------------------------------------------- backends

struct Runtime {
  std::shared_ptr<const synthetic::World> world;
  std::shared_ptr<const ResponseCache> cache;
  std::unique_ptr<qa::KgqaBackend> kgqa;
  std::shared_ptr<const kg::SparqlEndpoint> endpoint;
  std::shared_ptr<const kg::LabelSource> labels;
  std::unique_ptr<qa::QuestionCache> questions;
};

std::shared_ptr<const synthetic::World> world_for(const RunConfig& c) {
  return std::make_shared<const synthetic::World>(synthetic::build_world(c.world));
}

Runtime make_runtime(const RunConfig& c) {
  Runtime rt;
  std::string token;
  if (const char* t = std::getenv(kTokenEnv)) token = t;
  if (!c.paths.cache_dir.empty()) rt.cache = std::make_shared<ResponseCache>(c.paths.cache_dir);
  if (c.kgqa.backend == "mock" || c.endpoint.backend == "mock") rt.world = world_for(c);

  if (c.kgqa.backend == "mock") {
    rt.kgqa = std::make_unique<synthetic::MockKgqa>(rt.world, c.mock_kgqa_config());
  } else {
    qa::RemoteKgqaConfig rc;
    rc.url = c.kgqa.url;
    rc.knowledge_base = c.kgqa.kb;
    rc.language = c.kgqa.lang;
    rc.timeout_seconds = c.kgqa.timeout_seconds;
    rc.bearer_token = token;
    if (!c.paths.mapping.empty()) {
      require_file(c.paths.mapping, "response mapping", true);
      rc.mapping = qa::ResponseMapping::from_json_file(c.paths.mapping);
    }
    rt.kgqa = std::make_unique<qa::RemoteKgqa>(rc);
  }
  rt.questions = rt.cache ? std::make_unique<qa::QuestionCache>(rt.cache)
                          : std::make_unique<qa::QuestionCache>();

  std::shared_ptr<const kg::SparqlEndpoint> endpoint;
  std::shared_ptr<const kg::LabelSource> labels;
  if (c.endpoint.backend == "mock") {
    endpoint = std::make_shared<kg::MockEndpoint>(rt.world->graph, "synthetic");
    labels = std::make_shared<kg::MockLabels>(rt.world->graph);
  } else {
    kg::HttpEndpointConfig hc;
    hc.url = c.endpoint.url;
    hc.timeout_seconds = c.endpoint.timeout_seconds;
    hc.use_post = c.endpoint.use_post;
    hc.bearer_token = token;
    endpoint = std::make_shared<kg::HttpEndpoint>(hc);
    labels = std::make_shared<kg::EndpointLabels>(endpoint);
  }
  if (rt.cache) {
    endpoint = std::make_shared<kg::CachedEndpoint>(endpoint, rt.cache);
    labels = std::make_shared<kg::CachedLabels>(labels, rt.cache);
  }
  rt.endpoint = std::move(endpoint);
  rt.labels = std::move(labels);
  return rt;
}

std::unique_ptr<classifier::Scorer> make_scorer(const RunConfig& c, verbalizer::Mode mode) {
  if (c.classifier.backend == "oracle") return nullptr;
  if (c.classifier.backend == "remote") {
    classifier::RemoteConfig rc;
    rc.url = c.classifier.url;
    rc.timeout_seconds = c.classifier.timeout_seconds;
    rc.model_id = c.classifier.model_id;
    rc.batch_size = c.classifier.batch_size;
    return std::make_unique<classifier::RemoteScorer>(rc);
  }
  std::string path = c.paths.model;
  if (mode == verbalizer::Mode::nlg && !c.paths.model_nlg.empty()) path = c.paths.model_nlg;
  if (mode == verbalizer::Mode::bag_of_labels && !c.paths.model_bag.empty()) path = c.paths.model_bag;
  require_file(path, "model for mode " + verbalizer::to_string(mode));
  return std::make_unique<classifier::BaselineModel>(classifier::BaselineModel::load(path));
}

// ---------------------------------------------------------------- commands

struct IngestArgs {
  std::string out;
  bool synthetic = false;
  std::size_t holdout = 0;
  std::string holdout_out;
};

int cmd_ingest(const Flags& f, const IngestArgs& a) {
  auto c = resolve(f);
  std::vector<dataset::VanillaRecord> records, holdout;
  json manifest = provenance(c);
  if (a.synthetic) {
    records = synthetic::build_world(c.world).records;
    manifest["source"] = "synthetic";
  } else {
    require_file(c.paths.dataset, "dataset");
    auto loaded = dataset::load_vanilla(c.paths.dataset);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    records = std::move(loaded.records);
    manifest["source"] = c.paths.dataset;
    manifest["skipped"] = loaded.skipped;
    manifest["warnings"] = loaded.warnings.size();
  }
  if (a.holdout > 0) {
    if (a.holdout_out.empty()) throw ConfigError("--holdout needs --holdout-out");
    if (a.holdout >= records.size()) throw ConfigError("holdout must be smaller than the record count");
    std::mt19937_64 rng(c.seed);
    std::shuffle(records.begin(), records.end(), rng);
    holdout.assign(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(a.holdout));
    records.erase(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(a.holdout));
    std::ostringstream h;
    dataset::write_records_jsonl(h, holdout);
    write_file(a.holdout_out, h.str());
    manifest["holdout"] = {{"path", a.holdout_out}, {"records", holdout.size()}, {"sha256", sha256_hex(h.str())}};
  }
  std::ostringstream out;
  dataset::write_records_jsonl(out, records);
  write_file(a.out, out.str());
  manifest["records"] = records.size();
  manifest["sha256"] = sha256_hex(out.str());
  write_file(a.out + ".manifest.json", manifest.dump(2) + "\n");
  std::cerr << "ingested " << records.size() << " records";
  if (!holdout.empty()) std::cerr << " (+" << holdout.size() << " held out)";
  std::cerr << "\n";
  return 0;
}

json label_counts(const std::vector<dataset::LabeledQAPair>& pairs) {
  std::size_t correct = 0;
  for (const auto& p : pairs) correct += p.label == dataset::Label::correct ? 1 : 0;
  return {{"pairs", pairs.size()}, {"correct", correct}, {"incorrect", pairs.size() - correct}};
}

int cmd_sample(const Flags& f, const std::string& out_dir) {
  auto c = resolve(f);
  auto records = load_records(c.paths.dataset);
  auto cfg = c.sampling_config();
  auto pairs = dataset::negative_sample(records, cfg);
  auto parts = dataset::split(pairs, cfg);
  std::ostringstream train, test;
  dataset::write_pairs_jsonl(train, parts.train);
  dataset::write_pairs_jsonl(test, parts.test);
  write_file(fs::path(out_dir) / "train.jsonl", train.str());
  write_file(fs::path(out_dir) / "test.jsonl", test.str());
  json manifest = provenance(c);
  manifest["ratio"] = "1:" + std::to_string(cfg.negatives_per_positive);
  manifest["records"] = records.size();
  manifest["train"] = label_counts(parts.train);
  manifest["train"]["sha256"] = sha256_hex(train.str());
  manifest["test"] = label_counts(parts.test);
  manifest["test"]["sha256"] = sha256_hex(test.str());
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  std::cerr << "sampled " << pairs.size() << " pairs: " << parts.train.size() << " train, "
            << parts.test.size() << " test\n";
  return 0;
}

json metrics_json(const classifier::Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

int cmd_train(const Flags& f, const std::string& train_path, const std::string& test_path) {
  auto c = resolve(f);
  require_file(train_path, "training pairs");
  if (c.paths.model.empty()) throw ConfigError("--model is required");
  auto pairs = dataset::read_pairs_jsonl(train_path);
  auto model = classifier::train(pairs, c.training, c.seed);
  model.set_threshold(c.classifier.threshold);
  json cfg = to_json(c);
  cfg["train_pairs"] = train_path;
  model.meta().run_config = cfg.dump();
  model.save(c.paths.model);
  json summary = provenance(c);
  summary["model"] = c.paths.model;
  summary["examples"] = model.meta().examples;
  summary["epoch_loss"] = model.meta().epoch_loss;
  if (!test_path.empty()) {
    require_file(test_path, "test pairs");
    summary["test"] = metrics_json(classifier::evaluate(model, dataset::read_pairs_jsonl(test_path),
                                                        c.classifier.threshold));
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_eval_classifier(const Flags& f, bool sweep) {
  auto c = resolve(f);
  if (c.classifier.backend == "oracle") throw ConfigError("eval-classifier needs a baseline or remote classifier");
  auto records = load_records(c.paths.dataset);
  const auto sampling = c.sampling_config();
  std::unique_ptr<classifier::Scorer> remote;
  if (c.classifier.backend == "remote") remote = make_scorer(c, verbalizer::Mode::nlg);

  auto test_scores = [&](std::uint64_t seed, std::vector<double>& scores,
                         std::vector<dataset::Label>& labels) {
    auto s = sampling;
    s.seed = seed;
    auto parts = dataset::split(dataset::negative_sample(records, s), s);
    std::vector<classifier::QAInput> inputs;
    for (const auto& p : parts.test) {
      inputs.push_back({p.question, p.answer_text});
      labels.push_back(p.label);
    }
    if (remote) {
      scores = remote->score_batch(inputs);
    } else {
      auto model = classifier::train(parts.train, c.training, seed);
      scores = model.score_batch(inputs);
    }
  };
  auto run_once = [&](std::uint64_t seed) {
    std::vector<double> scores;
    std::vector<dataset::Label> labels;
    test_scores(seed, scores, labels);
    return classifier::evaluate_scores(scores, labels, c.classifier.threshold);
  };
  auto report = classifier::repeated_eval(run_once, c.seed, c.n_runs, c.workers);

  const std::string approach = c.classifier.backend + " / " +
                               dataset::to_string(c.sampling.answer_field) + " / 1:" +
                               std::to_string(c.sampling.ratio);
  std::ostringstream md;
  md << "| Approach | Precision | Recall | F1 |\n|---|---:|---:|---:|\n"
     << "| " << approach << " | " << classifier::format_mean_std(report.precision) << " | "
     << classifier::format_mean_std(report.recall) << " | "
     << classifier::format_mean_std(report.f1) << " |\n"
     << "\nmean ± population std over " << c.n_runs << " seeds (" << c.seed << ".."
     << c.seed + static_cast<std::uint64_t>(c.n_runs) - 1 << ")\n";

  json out = provenance(c);
  out["approach"] = approach;
  json runs = json::array();
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    auto row = metrics_json(report.runs[i]);
    row["seed"] = c.seed + i;
    runs.push_back(row);
  }
  out["runs"] = runs;
  out["summary"] = {{"precision", {{"mean", report.precision.mean}, {"std", report.precision.std}}},
                    {"recall", {{"mean", report.recall.mean}, {"std", report.recall.std}}},
                    {"f1", {{"mean", report.f1.mean}, {"std", report.f1.std}}}};

  std::string sweep_csv;
  if (sweep) {
    std::vector<double> scores;
    std::vector<dataset::Label> labels;
    test_scores(c.seed, scores, labels);
    std::vector<double> thresholds;
    for (int t = 5; t <= 95; t += 5) thresholds.push_back(t / 100.0);
    std::ostringstream csv;
    csv << csv_header(c) << "# threshold sweep on the seed " << c.seed
        << " test split; diagnostic only\nthreshold,precision,recall,f1\n";
    for (const auto& row : classifier::threshold_sweep(scores, labels, thresholds)) {
      char line[128];
      std::snprintf(line, sizeof line, "%.2f,%.6f,%.6f,%.6f\n", row.threshold,
                    row.metrics.precision, row.metrics.recall, row.metrics.f1);
      csv << line;
    }
    sweep_csv = csv.str();
  }

  if (c.paths.report_dir.empty()) {
    std::cout << md.str();
    if (sweep) std::cout << "\n" << sweep_csv;
  } else {
    fs::path dir = c.paths.report_dir;
    write_file(dir / "classifier.md", md.str() + markdown_footer(c));
    write_file(dir / "classifier.json", out.dump(2) + "\n");
    if (sweep) write_file(dir / "threshold_sweep.csv", sweep_csv);
    std::cout << md.str();
  }
  return 0;
}

int cmd_ask(const Flags& f, const std::vector<std::string>& asked, const std::string& out_path) {
  auto c = resolve(f);
  std::vector<std::string> questions = asked;
  if (questions.empty()) {
    for (const auto& r : load_records(c.paths.dataset)) questions.push_back(r.question);
    if (c.max_questions > 0 && questions.size() > c.max_questions) questions.resize(c.max_questions);
  }
  if (questions.empty()) throw ConfigError("no questions: pass --question or --input");
  auto rt = make_runtime(c);
  auto lists = qa::ask_batch(questions, *rt.kgqa, *rt.questions, c.kgqa.concurrency);
  std::ostringstream out;
  for (const auto& list : lists) {
    json candidates = json::array();
    for (const auto& q : list.candidates) {
      candidates.push_back({{"id", q.id}, {"rank", q.rank}, {"query", sparql::serialize(q)}});
    }
    out << json{{"question", list.question}, {"candidates", candidates}, {"warnings", list.warnings}}.dump()
        << "\n";
    for (const auto& w : list.warnings) std::cerr << "warning: " << w << "\n";
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    write_file(out_path, out.str());
    write_file(out_path + ".manifest.json", provenance(c).dump(2) + "\n");
  }
  return 0;
}

std::string approach_name(verbalizer::Mode mode, const std::string& classifier) {
  return (mode == verbalizer::Mode::nlg ? "A2 nlg" : "A3 bag-of-labels") + std::string(" (") +
         classifier + ")";
}

int cmd_filter(const Flags& f) {
  auto c = resolve(f);
  if (c.paths.report_dir.empty()) throw ConfigError("--report-dir is required");
  auto rt = make_runtime(c);
  std::vector<dataset::VanillaRecord> questions;
  if (!c.paths.dataset.empty()) {
    questions = load_records(c.paths.dataset);
  } else if (rt.world) {
    questions = rt.world->records;
    std::mt19937_64 rng(c.seed);
    std::shuffle(questions.begin(), questions.end(), rng);
  } else {
    throw ConfigError("--input is required unless the KGQA backend is mock");
  }
  if (c.max_questions > 0 && questions.size() > c.max_questions) questions.resize(c.max_questions);
  if (rt.world) {
    auto unknown = std::count_if(questions.begin(), questions.end(), [&](const dataset::VanillaRecord& r) {
      return !rt.world->by_question.contains(r.question);
    });
    if (unknown > 0) {
      std::cerr << "warning: " << unknown << " of " << questions.size()
                << " questions are not in the synthetic world and get no correct candidate"
                   " (check --persons / --world-seed)\n";
    }
  }

  pipeline::PipelineConfig pc;
  pc.row_cap = c.row_cap;
  pc.drop_stripped = c.drop_stripped;
  pc.threshold = c.classifier.threshold;
  pc.evaluation = c.evaluation_config();
  pc.workers = c.workers;
  pipeline::Backends backends{*rt.kgqa, *rt.questions, *rt.endpoint,
                              verbalizer::make_label_lookup(*rt.labels, c.endpoint.language)};

  std::vector<evaluation::QualityReport> reports;
  json runs = json::array();
  std::ostringstream rows;
  for (auto mode : c.modes) {
    pc.mode = mode;
    auto scorer = make_scorer(c, mode);
    auto result = pipeline::run(questions, backends, scorer.get(), pc,
                                approach_name(mode, c.classifier.backend));
    evaluation::write_question_rows_jsonl(rows, result.report);
    json failures = json::array();
    for (const auto& q : result.questions) {
      if (q.failure) {
        failures.push_back({{"question_id", q.question_id}, {"error", *q.failure}});
        std::cerr << "question " << q.question_id << " failed: " << *q.failure << "\n";
      }
    }
    auto j = evaluation::to_json(result.report);
    j["mode"] = verbalizer::to_string(mode);
    j["failed_questions"] = result.failed;
    j["failures"] = failures;
    j["candidate_warnings"] = result.warnings;
    j["stripped_candidates"] = result.stripped;
    j["dropped_candidates"] = result.dropped;
    runs.push_back(j);
    std::cerr << result.report.approach << ": " << questions.size() << " questions, "
              << result.failed << " failed, " << result.stripped << " stripped candidates\n";
    reports.push_back(std::move(result.report));
  }
  if (rt.cache) {
    std::cerr << "cache: " << rt.cache->hits() << " hits, " << rt.cache->misses() << " misses, "
              << rt.cache->corrupt_entries() << " corrupt\n";
  }

  fs::path dir = c.paths.report_dir;
  json quality = provenance(c);
  quality["reports"] = runs;
  write_file(dir / "quality.json", quality.dump(2) + "\n");
  write_file(dir / "report.md", evaluation::render_markdown(reports) + markdown_footer(c));
  write_file(dir / "report.csv", csv_header(c) + evaluation::render_csv(reports));
  write_file(dir / "questions.jsonl", rows.str());
  std::cout << evaluation::render_markdown(reports);
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& format,
               const std::string& out_path) {
  std::vector<evaluation::QualityReport> reports;
  for (const auto& path : inputs) {
    require_file(path, "quality report");
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw FormatError(path + " is not JSON: " + e.what());
    }
    if (!j.contains("reports") || !j["reports"].is_array()) throw FormatError(path + " has no reports array");
    for (const auto& r : j["reports"]) reports.push_back(evaluation::quality_report_from_json(r));
  }
  std::string text;
  if (format == "md") {
    text = evaluation::render_markdown(reports);
  } else if (format == "csv") {
    text = evaluation::render_csv(reports);
  } else {
    throw ConfigError("--format must be md or csv");
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Answer validation for KGQA candidate lists"};
  app.require_subcommand(1);
  std::function<int()> action;

  Flags ingest_flags;
  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "load a VANiLLa dump (or the synthetic world) into records JSON-lines");
  common_flags(ingest_cmd, ingest_flags);
  flag<std::string>(ingest_cmd, ingest_flags, "--input", "/paths/dataset", "VANiLLa JSON or JSON-lines");
  flag<std::size_t>(ingest_cmd, ingest_flags, "--persons", "/synthetic/persons", "synthetic persons");
  flag<std::uint64_t>(ingest_cmd, ingest_flags, "--world-seed", "/synthetic/seed", "synthetic world seed");
  ingest_cmd->add_option("--out", ingest.out, "records JSON-lines")->required();
  ingest_cmd->add_flag("--synthetic", ingest.synthetic, "emit the synthetic world's records");
  ingest_cmd->add_option("--holdout", ingest.holdout, "records moved to --holdout-out after a seeded shuffle");
  ingest_cmd->add_option("--holdout-out", ingest.holdout_out, "held-out records JSON-lines");
  ingest_cmd->callback([&] { action = [&] { return cmd_ingest(ingest_flags, ingest); }; });

  Flags sample_flags;
  std::string sample_out;
  auto* sample_cmd = app.add_subcommand("sample", "negative-sample labeled pairs and split train/test");
  common_flags(sample_cmd, sample_flags);
  flag<std::string>(sample_cmd, sample_flags, "--input", "/paths/dataset", "records");
  flag<int>(sample_cmd, sample_flags, "--ratio", "/sampling/ratio", "negatives per positive");
  flag<double>(sample_cmd, sample_flags, "--split", "/sampling/split", "train fraction");
  flag<std::string>(sample_cmd, sample_flags, "--answer-field", "/sampling/answer_field",
                    "sentence | nlg | bag-of-labels");
  switch_flag(sample_cmd, sample_flags, "--group-by-question", "/sampling/group_by_question",
              "keep all pairs of a question on one side");
  sample_cmd->add_option("--out-dir", sample_out, "output directory")->required();
  sample_cmd->callback([&] { action = [&] { return cmd_sample(sample_flags, sample_out); }; });

  Flags train_flags;
  std::string train_in, train_test;
  auto* train_cmd = app.add_subcommand("train", "train the built-in baseline classifier");
  common_flags(train_cmd, train_flags);
  train_cmd->add_option("--train", train_in, "training pairs JSON-lines")->required();
  train_cmd->add_option("--test", train_test, "optional held-out pairs");
  flag<std::string>(train_cmd, train_flags, "--model", "/paths/model", "output model file");
  flag<int>(train_cmd, train_flags, "--epochs", "/training/epochs", "SGD epochs");
  flag<double>(train_cmd, train_flags, "--lr", "/training/learning_rate", "initial learning rate");
  flag<double>(train_cmd, train_flags, "--l2", "/training/l2", "L2 penalty");
  flag<double>(train_cmd, train_flags, "--threshold", "/classifier/threshold", "decision threshold");
  train_cmd->callback([&] { action = [&] { return cmd_train(train_flags, train_in, train_test); }; });

  Flags eval_flags;
  bool sweep = false;
  auto* eval_cmd = app.add_subcommand("eval-classifier", "precision/recall/F1 as mean ± std over seeds");
  common_flags(eval_cmd, eval_flags);
  flag<std::string>(eval_cmd, eval_flags, "--input", "/paths/dataset", "records");
  flag<int>(eval_cmd, eval_flags, "--n-runs", "/n_runs", "seeds (>= 2)");
  flag<int>(eval_cmd, eval_flags, "--ratio", "/sampling/ratio", "negatives per positive");
  flag<double>(eval_cmd, eval_flags, "--split", "/sampling/split", "train fraction");
  flag<std::string>(eval_cmd, eval_flags, "--answer-field", "/sampling/answer_field",
                    "sentence | nlg | bag-of-labels");
  flag<std::string>(eval_cmd, eval_flags, "--classifier", "/classifier/backend", "baseline | remote");
  flag<std::string>(eval_cmd, eval_flags, "--classifier-url", "/classifier/url", "remote classifier base URL");
  flag<double>(eval_cmd, eval_flags, "--threshold", "/classifier/threshold", "decision threshold");
  flag<std::string>(eval_cmd, eval_flags, "--report-dir", "/paths/report_dir", "output directory");
  eval_cmd->add_flag("--sweep", sweep, "also write a threshold sweep table");
  eval_cmd->callback([&] { action = [&] { return cmd_eval_classifier(eval_flags, sweep); }; });

  Flags ask_flags;
  std::vector<std::string> ask_questions;
  std::string ask_out;
  auto* ask_cmd = app.add_subcommand("ask", "fetch ranked query candidates for questions");
  common_flags(ask_cmd, ask_flags);
  ask_cmd->add_option("--question", ask_questions, "question text (repeatable)");
  flag<std::string>(ask_cmd, ask_flags, "--input", "/paths/dataset", "records whose questions to ask");
  flag<std::string>(ask_cmd, ask_flags, "--backend", "/kgqa/backend", "mock | remote");
  flag<std::string>(ask_cmd, ask_flags, "--endpoint", "/kgqa/url", "KGQA API URL");
  flag<std::string>(ask_cmd, ask_flags, "--kb", "/kgqa/kb", "knowledge base name");
  flag<std::string>(ask_cmd, ask_flags, "--mapping", "/paths/mapping", "response mapping file");
  flag<int>(ask_cmd, ask_flags, "--concurrency", "/kgqa/concurrency", "parallel distinct questions");
  flag<std::size_t>(ask_cmd, ask_flags, "--max-questions", "/max_questions", "0 = all");
  flag<std::size_t>(ask_cmd, ask_flags, "--persons", "/synthetic/persons", "synthetic persons");
  flag<std::uint64_t>(ask_cmd, ask_flags, "--world-seed", "/synthetic/seed", "synthetic world seed");
  ask_cmd->add_option("--out", ask_out, "JSON-lines output (default stdout)");
  ask_cmd->callback([&] { action = [&] { return cmd_ask(ask_flags, ask_questions, ask_out); }; });

  Flags filter_flags;
  auto* filter_cmd = app.add_subcommand("filter", "run the candidate filtering comparison");
  common_flags(filter_cmd, filter_flags);
  flag<std::string>(filter_cmd, filter_flags, "--input", "/paths/dataset", "question records");
  flag<std::vector<std::string>>(filter_cmd, filter_flags, "--mode", "/modes", "nlg and/or bag-of-labels")
      ->delimiter(',');
  flag<std::string>(filter_cmd, filter_flags, "--classifier", "/classifier/backend", "baseline | remote | oracle");
  flag<std::string>(filter_cmd, filter_flags, "--classifier-url", "/classifier/url", "remote classifier base URL");
  flag<std::string>(filter_cmd, filter_flags, "--model-id", "/classifier/model_id", "remote model id");
  flag<std::string>(filter_cmd, filter_flags, "--model", "/paths/model", "baseline model");
  flag<std::string>(filter_cmd, filter_flags, "--model-nlg", "/paths/model_nlg", "baseline model for nlg");
  flag<std::string>(filter_cmd, filter_flags, "--model-bag", "/paths/model_bag", "baseline model for bag-of-labels");
  flag<double>(filter_cmd, filter_flags, "--threshold", "/classifier/threshold", "decision threshold");
  flag<std::string>(filter_cmd, filter_flags, "--kgqa", "/kgqa/backend", "mock | remote");
  flag<std::string>(filter_cmd, filter_flags, "--kgqa-url", "/kgqa/url", "KGQA API URL");
  flag<std::string>(filter_cmd, filter_flags, "--kb", "/kgqa/kb", "knowledge base name");
  flag<std::string>(filter_cmd, filter_flags, "--sparql", "/endpoint/backend", "mock | http");
  flag<std::string>(filter_cmd, filter_flags, "--sparql-url", "/endpoint/url", "SPARQL endpoint URL");
  flag<std::size_t>(filter_cmd, filter_flags, "--candidates", "/kgqa/candidates", "mock candidates per question");
  flag<double>(filter_cmd, filter_flags, "--absent", "/kgqa/absent_probability", "mock absent probability");
  flag<std::size_t>(filter_cmd, filter_flags, "--max-questions", "/max_questions", "0 = all");
  flag<std::size_t>(filter_cmd, filter_flags, "--persons", "/synthetic/persons", "synthetic persons");
  flag<std::uint64_t>(filter_cmd, filter_flags, "--world-seed", "/synthetic/seed", "synthetic world seed");
  flag<std::vector<std::size_t>>(filter_cmd, filter_flags, "--k", "/k_values", "cutoffs")->delimiter(',');
  switch_flag(filter_cmd, filter_flags, "--drop-stripped", "/drop_stripped",
              "drop candidates with unsupported modifiers instead of executing them stripped");
  flag<std::string>(filter_cmd, filter_flags, "--report-dir", "/paths/report_dir", "output directory");
  filter_cmd->callback([&] { action = [&] { return cmd_filter(filter_flags); }; });

  std::vector<std::string> report_inputs;
  std::string report_format = "md", report_out;
  auto* report_cmd = app.add_subcommand("report", "render saved quality.json files as one table");
  report_cmd->add_option("--input", report_inputs, "quality.json (repeatable)")->required();
  report_cmd->add_option("--format", report_format, "md | csv");
  report_cmd->add_option("--out", report_out, "output file (default stdout)");
  report_cmd->callback([&] {
    action = [&] { return cmd_report(report_inputs, report_format, report_out); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.category()) << "): " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (data): " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

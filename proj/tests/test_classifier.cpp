#include <doctest.h>

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <mutex>

#include "kgav/classifier.hpp"
#include "kgav/error.hpp"
#include "support.hpp"
#include "test_server.hpp"

using namespace kgav;
using namespace kgav::classifier;
using dataset::Label;

namespace {

std::vector<dataset::VanillaRecord> records(std::size_t n) {
  const std::vector<std::string> names = {"Ada", "Bruno", "Chloe", "Dmitri", "Elena", "Farid", "Greta", "Hugo"};
  const std::vector<std::string> families = {"Lovel", "Marsh", "Noor", "Ortiz", "Petit", "Quint", "Rossi"};
  const std::vector<std::string> relations = {"place of birth", "employer", "occupation", "educated at"};
  std::vector<dataset::VanillaRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string entity = names[i % names.size()] + " " + families[(i / names.size()) % families.size()] +
                         " " + std::to_string(i);
    std::string relation = relations[i % relations.size()];
    std::string answer = "Answer" + std::to_string(i * 7 % 97);
    out.push_back({"q" + std::to_string(i), "What is the " + relation + " of " + entity + "?", answer,
                   "The " + relation + " of " + entity + " is " + answer + ".", entity, relation});
  }
  return out;
}

Hyperparams small() {
  Hyperparams hp;
  hp.dimension = 1u << 16;
  return hp;
}

struct ConstantScorer final : Scorer {
  double value;
  explicit ConstantScorer(double v) : value(v) {}
  std::vector<double> score_batch(std::span<const QAInput> inputs) const override {
    return std::vector<double>(inputs.size(), value);
  }
  std::string describe() const override { return "constant"; }
};

}  // namespace

TEST_CASE("threshold is inclusive") {
  CHECK(apply_threshold(0.5, 0.5).label == Label::correct);
  CHECK(apply_threshold(0.4999, 0.5).label == Label::incorrect);
  CHECK(predict(ConstantScorer(0.7), "q", "a", 0.7).label == Label::correct);
}

TEST_CASE("features are sorted, unique and normalised") {
  auto x = featurize("Who founded Acme?", "Acme was founded by Ada.", 1u << 12);
  REQUIRE(x.nonzero() > 0);
  double norm = 0;
  for (std::size_t i = 0; i < x.entries.size(); ++i) {
    if (i) CHECK(x.entries[i - 1].first < x.entries[i].first);
    CHECK(x.entries[i].first < (1u << 12));
    norm += x.entries[i].second * x.entries[i].second;
  }
  CHECK(norm == doctest::Approx(1.0));
  auto strings = feature_strings("Who founded Acme?", "Acme");
  CHECK(std::find(strings.begin(), strings.end(), "q:acme") != strings.end());
  CHECK(tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
}

TEST_CASE("untrained model scores one half") {
  BaselineModel m(1u << 10);
  CHECK(m.predict_score("a", "b") == 0.5);
}

TEST_CASE("training separates correct from shuffled answers") {
  dataset::SamplingConfig cfg;
  cfg.seed = 1;
  cfg.answer_field = dataset::AnswerField::nlg;
  auto s = dataset::split(dataset::negative_sample(records(600), cfg), cfg);
  auto model = train(s.train, small(), 1);
  auto m = evaluate(model, s.test);
  CHECK(m.f1 >= 0.9);
  CHECK(model.meta().epoch_loss.size() == 5);
  CHECK(model.meta().epoch_loss.back() < model.meta().epoch_loss.front());
  auto again = train(s.train, small(), 1);
  CHECK(again.weights() == model.weights());
  CHECK(again.bias() == model.bias());
}

TEST_CASE("training needs both labels") {
  std::vector<dataset::LabeledQAPair> only_correct = {{"q", "a", Label::correct, "1", "1"}};
  CHECK_THROWS_AS(train(only_correct, small(), 1), DegenerateData);
  CHECK_THROWS_AS(train({}, small(), 1), DegenerateData);
}

TEST_CASE("save and load reproduce scores") {
  fixtures::TempDir dir("model");
  dataset::SamplingConfig cfg;
  auto pairs = dataset::negative_sample(records(100), cfg);
  auto model = train(pairs, small(), 3);
  model.set_threshold(0.4);
  model.meta().run_config = R"({"seed":3})";
  auto path = dir.path / "m.bin";
  model.save(path);
  auto back = BaselineModel::load(path);
  CHECK(back.dimension() == model.dimension());
  CHECK(back.threshold() == 0.4);
  CHECK(back.meta().run_config == model.meta().run_config);
  CHECK(back.meta().examples == pairs.size());
  for (const auto& p : pairs) CHECK(back.predict_score(p.question, p.answer_text) == model.predict_score(p.question, p.answer_text));

  std::ofstream(dir.path / "bad.bin") << "not a model";
  CHECK_THROWS_AS(BaselineModel::load(dir.path / "bad.bin"), FormatError);
  CHECK_THROWS_AS(BaselineModel::load(dir.path / "missing.bin"), IoError);
  auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 8);
  CHECK_THROWS_AS(BaselineModel::load(path), FormatError);
}

TEST_CASE("metrics") {
  std::vector<double> scores = {0.9, 0.8, 0.2, 0.6, 0.1};
  std::vector<Label> labels = {Label::correct, Label::incorrect, Label::correct, Label::correct, Label::incorrect};
  auto c = confusion(scores, labels);
  CHECK(c.tp == 2);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 1);
  auto m = evaluate_scores(scores, labels);
  CHECK(m.precision == doctest::Approx(2.0 / 3));
  CHECK(m.recall == doctest::Approx(2.0 / 3));
  CHECK(m.f1 == doctest::Approx(2.0 / 3));
  CHECK(metrics_from({}) == Metrics{});
  std::vector<double> thresholds = {0.0, 0.5, 1.0};
  auto sweep = threshold_sweep(scores, labels, thresholds);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].metrics.recall == 1.0);
  CHECK(sweep[2].metrics.recall == 0.0);
}

TEST_CASE("summary uses the population deviation") {
  std::vector<double> two = {0.9, 1.0};
  auto s = summarize(two);
  CHECK(s.mean == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(s.std == doctest::Approx(0.05).epsilon(1e-12));
  std::vector<double> same = {0.7, 0.7, 0.7};
  CHECK(summarize(same).std == 0.0);
  CHECK(format_mean_std({0.9968, 0.0089}) == "0.9968 \xC2\xB1 0.0089");
}

TEST_CASE("repeated_eval passes consecutive seeds and orders runs") {
  std::mutex m;
  std::vector<std::uint64_t> seen;
  auto report = repeated_eval(
      [&](std::uint64_t seed) {
        std::lock_guard lock(m);
        seen.push_back(seed);
        return Metrics{static_cast<double>(seed), 0, 0};
      },
      100, 6, 3);
  REQUIRE(report.runs.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(report.runs[static_cast<std::size_t>(i)].precision == 100 + i);
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<std::uint64_t>{100, 101, 102, 103, 104, 105});
  CHECK_THROWS_AS(repeated_eval([](std::uint64_t) { return Metrics{}; }, 0, 1), ConfigError);
}

TEST_CASE("classify wire shapes") {
  std::vector<QAInput> in = {{"Who?", "Ada."}, {"Wo?", "\xC3\xBC"}};
  auto body = nlohmann::json::parse(encode_classify_request(in, "m1"));
  CHECK(body["model_id"] == "m1");
  REQUIRE(body["pairs"].size() == 2);
  CHECK(body["pairs"][1]["answer"] == "\xC3\xBC");
  CHECK_FALSE(nlohmann::json::parse(encode_classify_request(in, "")).contains("model_id"));
  CHECK(decode_classify_response(R"({"scores":[0,1],"model_id":"m","latency_ms":3})", 2) == std::vector<double>{0, 1});
  for (const char* bad : {"x", "{}", R"({"scores":[0.5]})", R"({"scores":[0.5,1.5]})", R"({"scores":[0.5,"a"]})",
                          R"({"scores":[0.5,-0.1]})", R"({"scores":[0,1],"model_id":3})"}) {
    CHECK_THROWS_AS_MESSAGE(decode_classify_response(bad, 2), RemoteProtocolError, bad);
  }
}

TEST_CASE("remote scorer batches and keeps order") {
  LoopbackServer srv;
  std::atomic<int> requests{0};
  std::atomic<std::size_t> largest{0};
  srv.server.Post("/classify", [&](const httplib::Request& req, httplib::Response& res) {
    ++requests;
    auto body = nlohmann::json::parse(req.body);
    std::size_t n = body["pairs"].size();
    if (n > 256) {
      res.status = 413;
      return;
    }
    if (n > largest) largest = n;
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& p : body["pairs"]) scores.push_back(std::stoi(p["answer"].get<std::string>()) / 1000.0);
    res.set_content(nlohmann::json{{"scores", scores}, {"model_id", "echo"}, {"latency_ms", 0}}.dump(),
                    "application/json");
  });
  srv.server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"model_id":"echo"})", "application/json");
  });
  srv.start();

  RemoteScorer scorer({srv.url(), 5.0, "", 256});
  CHECK(scorer.health() == "echo");
  std::vector<QAInput> in;
  for (int i = 0; i < 600; ++i) in.push_back({"q", std::to_string(i)});
  auto scores = scorer.score_batch(in);
  REQUIRE(scores.size() == 600);
  for (int i = 0; i < 600; ++i) CHECK(scores[static_cast<std::size_t>(i)] == i / 1000.0);
  CHECK(requests == 3);
  CHECK(largest == 256);
  CHECK(scorer.score_batch({}).empty());
  CHECK_THROWS_AS(RemoteScorer({srv.url(), 5.0, "", 300}), ConfigError);
}

TEST_CASE("remote scorer failures") {
  LoopbackServer srv;
  srv.server.Post("/loading/classify", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  srv.server.Post("/bad/classify", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  srv.server.Post("/range/classify", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"scores":[1.2]})", "application/json");
  });
  srv.start();
  std::vector<QAInput> one = {{"q", "a"}};
  CHECK_THROWS_AS(RemoteScorer({srv.url("/loading"), 5.0, "", 8}).score_batch(one), RemoteUnavailable);
  CHECK_THROWS_AS(RemoteScorer({srv.url("/bad"), 5.0, "", 8}).score_batch(one), RemoteProtocolError);
  CHECK_THROWS_AS(RemoteScorer({srv.url("/range"), 5.0, "", 8}).score_batch(one), RemoteProtocolError);
  CHECK_THROWS_AS(RemoteScorer({srv.url("/loading"), 5.0, "", 8}).health(), RemoteUnavailable);
  int port = srv.port;
  srv.server.stop();
  srv.thread.join();
  CHECK_THROWS_AS(RemoteScorer({"http://127.0.0.1:" + std::to_string(port), 2.0, "", 8}).score_batch(one),
                  RemoteUnavailable);
}

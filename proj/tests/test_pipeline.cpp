#include <doctest.h>

#include <sstream>

#include "kgav/error.hpp"
#include "kgav/pipeline.hpp"
#include "kgav/synthetic.hpp"
#include "support.hpp"

using namespace kgav;
using namespace kgav::pipeline;

namespace {

std::shared_ptr<const synthetic::World> world() {
  static auto w = std::make_shared<const synthetic::World>(synthetic::build_world({200, 7}));
  return w;
}

std::vector<dataset::VanillaRecord> sample_questions(std::size_t n) {
  const auto& records = world()->records;
  std::vector<dataset::VanillaRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(records[(i * 37) % records.size()]);
  return out;
}

struct Harness {
  synthetic::MockKgqa kgqa;
  qa::QuestionCache questions;
  kg::MockEndpoint endpoint;
  kg::MockLabels labels;
  explicit Harness(std::uint64_t seed = 0)
      : kgqa(world(), [seed] {
          synthetic::MockKgqaConfig c;
          c.seed = seed;
          return c;
        }()),
        endpoint(world()->graph),
        labels(world()->graph) {}
  Backends backends() { return {kgqa, questions, endpoint, verbalizer::make_label_lookup(labels)}; }
};

std::string report_text(const RunResult& r) {
  std::ostringstream out;
  out << evaluation::render_csv({r.report});
  evaluation::write_question_rows_jsonl(out, r.report);
  return out.str();
}

}  // namespace

TEST_CASE("synthetic world shape") {
  auto w = world();
  CHECK(w->persons.size() == 200);
  CHECK(w->relations.size() == 8);
  CHECK(w->records.size() == w->facts.size());
  CHECK(w->records.size() == 200 * 8);
  for (std::size_t i = 0; i < w->records.size(); i += 97) {
    CHECK(w->by_question.at(w->records[i].question) == i);
    CHECK_FALSE(w->records[i].answer_sentence.empty());
  }
  auto again = synthetic::build_world({200, 7});
  CHECK(again.records == w->records);
  CHECK(synthetic::keyed_seed(1, "a") != synthetic::keyed_seed(1, "b"));
  CHECK(synthetic::keyed_seed(1, "a") != synthetic::keyed_seed(2, "a"));
}

TEST_CASE("the correct candidate sits at the drawn rank") {
  Harness h(5);
  PipelineConfig cfg;
  for (const auto& gold : sample_questions(60)) {
    auto list = qa::ask_once(gold.question, h.kgqa, h.questions);
    auto result = process_question(gold, list, h.endpoint, verbalizer::make_label_lookup(h.labels), nullptr, cfg);
    CHECK_FALSE(result.failure.has_value());
    auto draw = h.kgqa.draw(gold.question);
    auto rel = result.before.relevance();
    auto first = std::find(rel.begin(), rel.end(), true);
    if (draw.absent) {
      CHECK(first == rel.end());
    } else {
      REQUIRE(first != rel.end());
      CHECK(first - rel.begin() + 1 == draw.correct_rank);
      CHECK(result.after.entries.size() == result.before.ideal_relevant);
    }
  }
}

TEST_CASE("oracle run lifts P@1 to the present fraction") {
  Harness h;
  PipelineConfig cfg;
  auto questions = sample_questions(150);
  auto result = run(questions, h.backends(), nullptr, cfg, "oracle");
  std::size_t present = 0;
  for (const auto& q : questions) present += h.kgqa.draw(q.question).absent ? 0 : 1;
  auto p1 = result.report.find("P@1");
  REQUIRE(p1);
  CHECK(p1->after == doctest::Approx(static_cast<double>(present) / 150.0));
  CHECK(p1->before < p1->after);
  CHECK(result.failed == 0);
  CHECK(result.stripped > 0);
  CHECK(h.kgqa.calls() == 150);
}

TEST_CASE("results do not depend on the worker count") {
  auto questions = sample_questions(80);
  Harness a, b;
  PipelineConfig one;
  PipelineConfig many;
  many.workers = 6;
  auto ra = run(questions, a.backends(), nullptr, one, "x");
  auto rb = run(questions, b.backends(), nullptr, many, "x");
  CHECK(report_text(ra) == report_text(rb));
}

TEST_CASE("dropping stripped candidates never adds entries") {
  auto questions = sample_questions(40);
  Harness a, b;
  PipelineConfig keep;
  PipelineConfig drop;
  drop.drop_stripped = true;
  auto ra = run(questions, a.backends(), nullptr, keep, "x");
  auto rb = run(questions, b.backends(), nullptr, drop, "x");
  CHECK(rb.dropped == ra.stripped);
  for (std::size_t i = 0; i < questions.size(); ++i) {
    CHECK(rb.questions[i].before.entries.size() <= ra.questions[i].before.entries.size());
  }
}

TEST_CASE("a scorer that rejects everything empties every list") {
  struct Zero final : classifier::Scorer {
    std::vector<double> score_batch(std::span<const classifier::QAInput> in) const override {
      return std::vector<double>(in.size(), 0.0);
    }
    std::string describe() const override { return "zero"; }
  } zero;
  Harness h;
  auto result = run(sample_questions(20), h.backends(), &zero, {}, "zero");
  CHECK(result.report.empty_after == 20);
  CHECK(result.report.find("P@1")->after == 0.0);
}

TEST_CASE("backend failures become empty lists") {
  struct Broken final : qa::KgqaBackend {
    qa::ResponseMapping m;
    sparql::ParseOptions o;
    std::string fetch(const std::string&) const override { throw TransportError("down"); }
    std::string describe() const override { return "broken"; }
    const qa::ResponseMapping& mapping() const override { return m; }
    const sparql::ParseOptions& parse_options() const override { return o; }
  } broken;
  qa::QuestionCache cache;
  kg::MockEndpoint endpoint(world()->graph);
  kg::MockLabels labels(world()->graph);
  Backends backends{broken, cache, endpoint, verbalizer::make_label_lookup(labels)};
  auto result = run(sample_questions(5), backends, nullptr, {}, "broken");
  CHECK(result.failed == 5);
  CHECK(result.report.questions == 5);
  CHECK(result.report.empty_before == 5);
  REQUIRE(result.questions[0].failure.has_value());
}

TEST_CASE("pipeline config validation") {
  PipelineConfig cfg;
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.threshold = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.row_cap = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("an unusable classifier aborts the run") {
  struct Down final : classifier::Scorer {
    std::vector<double> score_batch(std::span<const classifier::QAInput>) const override {
      throw RemoteUnavailable("loading");
    }
    std::string describe() const override { return "down"; }
  } down;
  Harness h;
  PipelineConfig cfg;
  cfg.workers = 3;
  CHECK_THROWS_AS(run(sample_questions(10), h.backends(), &down, cfg, "down"), RemoteUnavailable);
}

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "kgav/dataset.hpp"
#include "kgav/error.hpp"
#include "support.hpp"

using namespace kgav;
using namespace kgav::dataset;

namespace {

std::vector<VanillaRecord> records(std::size_t n) {
  std::vector<VanillaRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = std::to_string(i);
    out.push_back({"q" + s, "What is the p of e" + s + "?", "a" + s, "The p of e" + s + " is a" + s + ".",
                   "e" + s, "p"});
  }
  return out;
}

std::string dump(const std::vector<LabeledQAPair>& pairs) {
  std::ostringstream out;
  write_pairs_jsonl(out, pairs);
  return out.str();
}

}  // namespace

TEST_CASE("parse a JSON array and JSON lines") {
  const std::string obj =
      R"({"question_id":7,"question":"What was the cause of death of John Kennedy?","answer":"assassination",)"
      R"("answer_sentence":"The cause of death of John Kennedy was assassination.",)"
      R"("question_entity_label":"John F. Kennedy","question_relation":"cause of death"})";
  auto a = parse_vanilla("[" + obj + "," + obj + "]");
  auto b = parse_vanilla(obj + "\n\n" + obj + "\n");
  REQUIRE(a.records.size() == 2);
  CHECK(a.records == b.records);
  CHECK(a.records[0].question_id == "7");
  CHECK(a.records[0].question_relation == "cause of death");
}

TEST_CASE("bad records are skipped with warnings") {
  auto r = parse_vanilla(
      R"([{"question_id":"1","question":"q","answer":"a","answer_sentence":"s","question_entity_label":"e","question_relation":"r"},)"
      R"({"question_id":"2","question":"q","answer":"a","answer_sentence":"  ","question_entity_label":"e","question_relation":"r"},)"
      R"({"question_id":"3","question":"q","answer":"a","answer_sentence":"s","question_entity_label":"e"},)"
      R"({"question_id":"4","question":{"x":1},"answer":"a","answer_sentence":"s","question_entity_label":"e","question_relation":"r"},)"
      R"(5])");
  CHECK(r.records.size() == 1);
  CHECK(r.skipped == 4);
  CHECK(r.warnings.size() == 4);
}

TEST_CASE("unparseable input is a format error") {
  CHECK_THROWS_AS(parse_vanilla("[{"), FormatError);
  CHECK_THROWS_AS(parse_vanilla("{\"a\":1}\nnope\n"), FormatError);
  CHECK(parse_vanilla("").warnings.size() == 1);
  CHECK_THROWS_AS(load_vanilla("/nonexistent/kgav.json"), IoError);
}

TEST_CASE("answer renderings") {
  VanillaRecord r{"1", "Who?", "male", "He is male.", "Claude-Nicolas Le Cat", "sex or gender"};
  CHECK(answer_text(r, AnswerField::sentence) == "He is male.");
  CHECK(answer_text(r, AnswerField::nlg) == "Claude-Nicolas Le Cat's sex or gender is male.");
  CHECK(answer_text(r, AnswerField::bag_of_labels) == "Claude-Nicolas Le Cat sex or gender male");
  r.question_relation = "given name";
  r.answer = "Claude-Nicolas";
  CHECK(answer_text(r, AnswerField::nlg) == "Claude-Nicolas Le Cat is given name Claude-Nicolas.");
}

TEST_CASE("exact label ratios and no self-pairs") {
  auto recs = records(300);
  for (int ratio : {1, 3, 50}) {
    SamplingConfig cfg;
    cfg.negatives_per_positive = ratio;
    cfg.seed = 5;
    auto pairs = negative_sample(recs, cfg);
    std::size_t correct = 0;
    for (const auto& p : pairs) {
      if (p.label == Label::correct) {
        ++correct;
        CHECK(p.source_question_id == p.source_answer_id);
      } else {
        CHECK(p.source_question_id != p.source_answer_id);
      }
    }
    CHECK(correct == recs.size());
    CHECK(pairs.size() - correct == recs.size() * static_cast<std::size_t>(ratio));
  }
}

TEST_CASE("duplicate question ids never pair with each other") {
  auto recs = records(3);
  recs.push_back(recs[0]);
  SamplingConfig cfg;
  cfg.negatives_per_positive = 20;
  for (const auto& p : negative_sample(recs, cfg)) {
    if (p.label == Label::incorrect) CHECK(p.source_question_id != p.source_answer_id);
  }
}

TEST_CASE("sampling is a pure function of the seed") {
  auto recs = records(200);
  SamplingConfig cfg;
  cfg.seed = 17;
  cfg.negatives_per_positive = 4;
  CHECK(dump(negative_sample(recs, cfg)) == dump(negative_sample(recs, cfg)));
  auto other = cfg;
  other.seed = 18;
  CHECK(dump(negative_sample(recs, cfg)) != dump(negative_sample(recs, other)));
}

TEST_CASE("too few records") {
  SamplingConfig cfg;
  CHECK_THROWS_AS(negative_sample(records(1), cfg), InsufficientRecords);
  auto same = records(2);
  same[1].question_id = same[0].question_id;
  CHECK_THROWS_AS(negative_sample(same, cfg), InsufficientRecords);
  cfg.negatives_per_positive = 0;
  CHECK_THROWS_AS(negative_sample(records(5), cfg), ConfigError);
}

TEST_CASE("split sizes and grouping") {
  SamplingConfig cfg;
  cfg.seed = 3;
  cfg.split_ratio = 0.67;
  auto pairs = negative_sample(records(100), cfg);
  auto s = split(pairs, cfg);
  CHECK(s.train.size() == 134);
  CHECK(s.test.size() == 66);
  cfg.group_by_question = true;
  auto g = split(pairs, cfg);
  CHECK(g.train.size() + g.test.size() == pairs.size());
  std::set<std::string> train_q;
  for (const auto& p : g.train) train_q.insert(p.question);
  for (const auto& p : g.test) CHECK_FALSE(train_q.contains(p.question));
  CHECK(dump(split(pairs, cfg).train) == dump(g.train));
}

TEST_CASE("pairs and records survive JSON lines") {
  fixtures::TempDir dir("dataset");
  SamplingConfig cfg;
  auto pairs = negative_sample(records(20), cfg);
  auto path = dir.path / "pairs.jsonl";
  {
    std::ofstream out(path);
    write_pairs_jsonl(out, pairs);
  }
  CHECK(read_pairs_jsonl(path) == pairs);
  std::ostringstream out;
  write_records_jsonl(out, records(4));
  CHECK(parse_vanilla(out.str()).records == records(4));
  std::ofstream(dir.path / "bad.jsonl") << "{\"question\":1}\n";
  CHECK_THROWS_AS(read_pairs_jsonl(dir.path / "bad.jsonl"), FormatError);
}

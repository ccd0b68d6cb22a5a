#include <doctest.h>

#include <random>
#include <sstream>

#include "kgav/error.hpp"
#include "kgav/evaluation.hpp"
#include "support.hpp"

using namespace kgav;
using namespace kgav::evaluation;

namespace {

Entry entry(const std::string& id, bool relevant, std::optional<double> score = std::nullopt) {
  Entry e;
  e.candidate.id = id;
  e.answer = verbalizer::AnswerText{"text " + id, verbalizer::Mode::nlg, id, 0};
  e.judgment = {id, relevant, relevant ? MatchedVia::object_label : MatchedVia::none};
  if (score) e.score = classifier::apply_threshold(*score);
  return e;
}

RankedAnswerList list_of(const std::string& qid, const std::vector<bool>& rel) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < rel.size(); ++i) entries.push_back(entry(qid + "#" + std::to_string(i + 1), rel[i]));
  return RankedAnswerList::from_entries(qid, std::move(entries));
}

dataset::VanillaRecord kennedy_gold() {
  return {"1", "What was the cause of death of John Kennedy?", "Assassination of John F. Kennedy",
          "John F. Kennedy died by assassination.", "John F. Kennedy", "death cause"};
}

}  // namespace

TEST_CASE("precision examples") {
  CHECK(precision_at_k({true, false, false, false, false}, 5) == 0.2);
  CHECK(precision_at_k({false, true, true}, 5) == 0.4);
  CHECK(precision_at_k(std::vector<bool>{}, 1) == 0.0);
  CHECK_THROWS_AS(precision_at_k({true}, 0), ConfigError);
}

TEST_CASE("ndcg examples") {
  CHECK(ndcg_at_k({false, true, false}, 3, 1) == doctest::Approx(0.6309297535714575).epsilon(1e-12));
  CHECK(ndcg_at_k({false, false}, 3, 0) == 0.0);
  CHECK(ndcg_at_k({true, true}, 5, 2) == doctest::Approx(1.0));
  CHECK(ndcg_at_k({true}, 5, 3) < 1.0);
}

TEST_CASE("judge matches object or subject labels") {
  auto graph = fixtures::kennedy_graph();
  kg::MockEndpoint endpoint(graph);
  kg::MockLabels source(graph);
  auto labels = verbalizer::make_label_lookup(source);
  auto q = sparql::rewrite_select_all(sparql::parse_query(fixtures::kKennedyQuery));
  q.id = "c1";
  auto rs = kg::execute(q, endpoint);
  auto j = judge(q, rs, kennedy_gold(), labels);
  CHECK(j.relevant);
  CHECK(j.matched_via == MatchedVia::object_label);
  CHECK(j.candidate_id == "c1");

  auto subject_gold = kennedy_gold();
  subject_gold.answer = "  john f.   KENNEDY ";
  j = judge(q, rs, subject_gold, labels);
  CHECK(j.relevant);
  CHECK(j.matched_via == MatchedVia::subject_label);

  auto wrong_answer = kennedy_gold();
  wrong_answer.answer = "Heart attack";
  CHECK_FALSE(judge(q, rs, wrong_answer, labels).relevant);
  auto wrong_relation = kennedy_gold();
  wrong_relation.question_relation = "spouse";
  CHECK_FALSE(judge(q, rs, wrong_relation, labels).relevant);
  j = judge(q, kg::ResultSet{}, kennedy_gold(), labels);
  CHECK_FALSE(j.relevant);
  CHECK(j.matched_via == MatchedVia::none);
}

TEST_CASE("oracle filtering keeps exactly the relevant entries") {
  auto list = list_of("q", {false, true, false, true, true});
  auto kept = filter(list, oracle_score);
  REQUIRE(kept.entries.size() == 3);
  CHECK(kept.entries[0].candidate.id == "q#2");
  CHECK(kept.entries[2].candidate.id == "q#5");
  CHECK(kept.removed == 2);
  CHECK(kept.ideal_relevant == 3);
  CHECK(filter(list, [](const Entry&) { return 0.0; }).entries.empty());
}

TEST_CASE("sixty entries with fifty-seven removed leaves three in order") {
  std::vector<Entry> entries;
  for (int i = 1; i <= 60; ++i) entries.push_back(entry("c" + std::to_string(i), false, (i % 20 == 7) ? 0.9 : 0.1));
  auto list = RankedAnswerList::from_entries("q", std::move(entries));
  auto kept = filter_by_stored_scores(list);
  REQUIRE(kept.entries.size() == 3);
  CHECK(kept.entries[0].candidate.id == "c7");
  CHECK(kept.entries[1].candidate.id == "c27");
  CHECK(kept.entries[2].candidate.id == "c47");
  CHECK(kept.removed == 57);
}

TEST_CASE("entries without text or score are dropped") {
  auto e = entry("a", true);
  e.answer.reset();
  auto list = RankedAnswerList::from_entries("q", {e, entry("b", true, 0.8), entry("c", true)});
  auto kept = filter_by_stored_scores(list);
  REQUIRE(kept.entries.size() == 1);
  CHECK(kept.entries[0].candidate.id == "b");
}

TEST_CASE("compare macro-averages and reports relative change") {
  std::vector<RankedAnswerList> before = {list_of("a", {false, true}), list_of("b", {false, false, true})};
  std::vector<RankedAnswerList> after;
  for (const auto& l : before) after.push_back(filter(l, oracle_score));
  auto report = compare(before, after, {}, "oracle");
  CHECK(report.questions == 2);
  auto p1 = report.find("P@1");
  REQUIRE(p1);
  CHECK(p1->before == 0.0);
  CHECK(p1->after == 1.0);
  CHECK_FALSE(p1->relative_change.has_value());
  auto n5 = report.find("NDCG@5");
  REQUIRE(n5);
  CHECK(n5->after == doctest::Approx(1.0));
  CHECK(*n5->relative_change == doctest::Approx((1.0 - n5->before) / n5->before));
  CHECK(report.mean_removed == doctest::Approx(1.5));
  CHECK(report.mean_candidates == doctest::Approx(2.5));
  CHECK(report.per_question.size() == 2);
}

TEST_CASE("compare rejects mismatched question sets") {
  std::vector<RankedAnswerList> before = {list_of("a", {true}), list_of("b", {true})};
  std::vector<RankedAnswerList> after = {list_of("a", {true}), list_of("c", {true})};
  CHECK_THROWS_AS(compare(before, after), MismatchedQuestions);
  after = {list_of("a", {true})};
  CHECK_THROWS_AS(compare(before, after), MismatchedQuestions);
  after = {list_of("a", {true}), list_of("a", {true})};
  CHECK_THROWS_AS(compare(before, after), MismatchedQuestions);
}

TEST_CASE("empty lists count as zero") {
  std::vector<RankedAnswerList> before = {list_of("a", {}), list_of("b", {true})};
  auto report = compare(before, before);
  CHECK(report.empty_before == 1);
  CHECK(report.find("P@1")->before == 0.5);
}

TEST_CASE("markdown, csv and json renderings") {
  std::vector<RankedAnswerList> before = {list_of("a", {false, true})};
  std::vector<RankedAnswerList> after = {filter(before[0], oracle_score)};
  auto report = compare(before, after, {}, "A2 nlg");
  auto md = render_markdown({report});
  CHECK(md.find("| Approach |") == 0);
  CHECK(md.find("P@1 = NDCG@1") != std::string::npos);
  CHECK(md.find("| A2 nlg |") != std::string::npos);
  auto csv = render_csv({report});
  CHECK(csv.find("A2 nlg,P@1,0.000000,1.000000,,1,") != std::string::npos);
  auto back = quality_report_from_json(to_json(report));
  CHECK(back.approach == report.approach);
  REQUIRE(back.metrics.size() == report.metrics.size());
  for (std::size_t i = 0; i < back.metrics.size(); ++i) {
    CHECK(back.metrics[i].before == report.metrics[i].before);
    CHECK(back.metrics[i].relative_change == report.metrics[i].relative_change);
  }
  CHECK_THROWS_AS(quality_report_from_json(nlohmann::json::array()), FormatError);
  std::ostringstream rows;
  write_question_rows_jsonl(rows, report);
  CHECK(nlohmann::json::parse(rows.str())["question_id"] == "a");
}

// Independent reference implementations agree on random lists.
TEST_CASE("property: metrics agree with the reference implementations") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 2000; ++i) {
    std::size_t n = rng() % 30;
    std::vector<bool> rel(n);
    for (std::size_t j = 0; j < n; ++j) rel[j] = rng() % 3 == 0;
    std::size_t ideal = static_cast<std::size_t>(std::count(rel.begin(), rel.end(), true)) + rng() % 3;
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, 1 + rng() % 40}) {
      CHECK(std::abs(precision_at_k(rel, k) - oracle::precision_at_k(rel, k)) <= 1e-12);
      CHECK(std::abs(ndcg_at_k(rel, k, ideal) - oracle::ndcg_at_k(rel, k, ideal)) <= 1e-12);
    }
    CHECK(precision_at_k(rel, 1) == ndcg_at_k(rel, 1, std::max<std::size_t>(ideal, 1)));
  }
}

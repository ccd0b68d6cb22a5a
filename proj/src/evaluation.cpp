#include "kgav/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "kgav/error.hpp"

namespace kgav::evaluation {

using nlohmann::json;

std::string to_string(MatchedVia via) {
  switch (via) {
    case MatchedVia::none: return "none";
    case MatchedVia::object_label: return "object-label";
    case MatchedVia::subject_label: return "subject-label";
  }
  return "none";
}

std::string normalize_label(std::string_view text) {
  std::string out;
  bool space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

RelevanceJudgment judge(const sparql::QueryCandidate& candidate, const kg::ResultSet& rs,
                        const dataset::VanillaRecord& gold,
                        const verbalizer::LabelLookup& labels) {
  RelevanceJudgment j{candidate.id, false, MatchedVia::none};
  const std::string relation = normalize_label(gold.question_relation);
  const std::string answer = normalize_label(gold.answer);
  std::map<sparql::Term, std::string> memo;
  auto label = [&](const sparql::Term& t) -> const std::string& {
    auto it = memo.find(t);
    if (it == memo.end()) {
      it = memo.emplace(t, normalize_label(verbalizer::term_label(t, labels))).first;
    }
    return it->second;
  };
  MatchedVia best = MatchedVia::none;
  for (const auto& row : rs.rows) {
    std::vector<sparql::GroundedTriple> triples;
    try {
      triples = sparql::ground_patterns(candidate, row);
    } catch (const UnboundVariable&) {
      continue;
    }
    for (const auto& t : triples) {
      if (label(t.predicate) != relation) continue;
      if (label(t.object) == answer) {
        j.relevant = true;
        j.matched_via = MatchedVia::object_label;
        return j;
      }
      if (best == MatchedVia::none && label(t.subject) == answer) best = MatchedVia::subject_label;
    }
  }
  if (best != MatchedVia::none) {
    j.relevant = true;
    j.matched_via = best;
  }
  return j;
}

RankedAnswerList RankedAnswerList::from_entries(std::string question_id,
                                                std::vector<Entry> entries) {
  RankedAnswerList list;
  list.question_id = std::move(question_id);
  list.entries = std::move(entries);
  list.ideal_relevant = static_cast<std::size_t>(
      std::count_if(list.entries.begin(), list.entries.end(),
                    [](const Entry& e) { return e.judgment.relevant; }));
  return list;
}

std::vector<bool> RankedAnswerList::relevance() const {
  std::vector<bool> rel;
  rel.reserve(entries.size());
  for (const auto& e : entries) rel.push_back(e.judgment.relevant);
  return rel;
}

RankedAnswerList filter(const RankedAnswerList& list, const EntryScorer& scorer,
                        double threshold) {
  RankedAnswerList out;
  out.question_id = list.question_id;
  out.ideal_relevant = list.ideal_relevant;
  for (const auto& e : list.entries) {
    if (e.answer && scorer(e) >= threshold) out.entries.push_back(e);
  }
  out.removed = list.removed + (list.entries.size() - out.entries.size());
  return out;
}

RankedAnswerList filter_by_stored_scores(const RankedAnswerList& list, double threshold) {
  return filter(
      list, [](const Entry& e) { return e.score ? e.score->score : -1.0; }, threshold);
}

double oracle_score(const Entry& entry) { return entry.judgment.relevant ? 1.0 : 0.0; }

double precision_at_k(const std::vector<bool>& relevance, std::size_t k) {
  if (k == 0) throw ConfigError("k must be >= 1");
  std::size_t n = std::min(k, relevance.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += relevance[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double ndcg_at_k(const std::vector<bool>& relevance, std::size_t k, std::size_t ideal_relevant) {
  if (k == 0) throw ConfigError("k must be >= 1");
  if (ideal_relevant == 0) return 0.0;
  double dcg = 0.0;
  std::size_t n = std::min(k, relevance.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (relevance[i]) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double idcg = 0.0;
  std::size_t m = std::min(k, ideal_relevant);
  for (std::size_t i = 0; i < m; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

double precision_at_k(const RankedAnswerList& list, std::size_t k) {
  return precision_at_k(list.relevance(), k);
}

double ndcg_at_k(const RankedAnswerList& list, std::size_t k) {
  return ndcg_at_k(list.relevance(), k, list.ideal_relevant);
}

void EvaluationConfig::validate() const {
  if (k_values.empty()) throw ConfigError("at least one k value is required");
  for (auto k : k_values) {
    if (k < 1) throw ConfigError("k values must be >= 1");
  }
}

const MetricRow* QualityReport::find(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

QualityReport compare(const std::vector<RankedAnswerList>& before,
                      const std::vector<RankedAnswerList>& after, const EvaluationConfig& config,
                      std::string approach) {
  config.validate();
  std::map<std::string, const RankedAnswerList*> after_by_id;
  for (const auto& a : after) {
    if (!after_by_id.emplace(a.question_id, &a).second) {
      throw MismatchedQuestions("duplicate question id " + a.question_id);
    }
  }
  if (after_by_id.size() != before.size()) {
    throw MismatchedQuestions("before has " + std::to_string(before.size()) +
                              " questions, after has " + std::to_string(after.size()));
  }
  std::vector<std::string> names;
  for (auto k : config.k_values) {
    names.push_back("P@" + std::to_string(k));
    names.push_back("NDCG@" + std::to_string(k));
  }

  QualityReport report;
  report.approach = std::move(approach);
  report.questions = before.size();
  std::vector<double> sum_before(names.size(), 0.0), sum_after(names.size(), 0.0);
  double total_candidates = 0.0, total_removed = 0.0;
  std::set<std::string> seen;
  for (const auto& b : before) {
    auto it = after_by_id.find(b.question_id);
    if (it == after_by_id.end() || !seen.insert(b.question_id).second) {
      throw MismatchedQuestions("question " + b.question_id + " missing or duplicated");
    }
    const auto& a = *it->second;
    QuestionRow row;
    row.question_id = b.question_id;
    row.candidates_before = b.entries.size();
    row.candidates_after = a.entries.size();
    row.relevant = b.ideal_relevant;
    std::size_t m = 0;
    for (auto k : config.k_values) {
      double pb = precision_at_k(b, k), pa = precision_at_k(a, k);
      double nb = ndcg_at_k(b, k), na = ndcg_at_k(a, k);
      row.values.emplace_back(pb, pa);
      row.values.emplace_back(nb, na);
      sum_before[m] += pb;
      sum_after[m] += pa;
      sum_before[m + 1] += nb;
      sum_after[m + 1] += na;
      m += 2;
    }
    if (b.entries.empty()) ++report.empty_before;
    if (a.entries.empty()) ++report.empty_after;
    total_candidates += static_cast<double>(b.entries.size());
    total_removed += static_cast<double>(b.entries.size() - std::min(b.entries.size(), a.entries.size()));
    report.per_question.push_back(std::move(row));
  }
  double n = before.empty() ? 1.0 : static_cast<double>(before.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    MetricRow row{names[i], sum_before[i] / n, sum_after[i] / n, std::nullopt};
    if (row.before > 0.0) row.relative_change = (row.after - row.before) / row.before;
    report.metrics.push_back(row);
  }
  report.mean_candidates = total_candidates / n;
  report.mean_removed = total_removed / n;
  return report;
}

namespace {

std::string fixed(double v, int digits = 4) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%+.1f%%", *v * 100.0);
  return buffer;
}

// Columns shown in the table: P@1 and NDCG@1 collapse into one.
std::vector<std::pair<std::string, std::string>> columns(const QualityReport& r) {
  std::vector<std::pair<std::string, std::string>> cols;
  for (const auto& m : r.metrics) {
    if (m.name == "NDCG@1") continue;
    cols.emplace_back(m.name == "P@1" ? "P@1 = NDCG@1" : m.name, m.name);
  }
  return cols;
}

}  // namespace

std::string render_markdown(const std::vector<QualityReport>& reports) {
  if (reports.empty()) return {};
  auto cols = columns(reports.front());
  std::ostringstream out;
  out << "| Approach |";
  for (const auto& [title, name] : cols) out << " " << title << " Before AV | " << title << " After AV |";
  out << "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out << "---:|---:|";
  out << "\n";
  for (const auto& r : reports) {
    out << "| " << r.approach << " |";
    for (const auto& [title, name] : cols) {
      const auto* m = r.find(name);
      out << " " << (m ? fixed(m->before) : "") << " | " << (m ? fixed(m->after) : "") << " |";
    }
    out << "\n";
  }
  out << "\n| Approach |";
  for (const auto& [title, name] : cols) out << " " << title << " change |";
  out << " questions | empty before | empty after | mean candidates | mean removed |\n|---|";
  for (std::size_t i = 0; i < cols.size() + 5; ++i) out << "---:|";
  out << "\n";
  for (const auto& r : reports) {
    out << "| " << r.approach << " |";
    for (const auto& [title, name] : cols) {
      const auto* m = r.find(name);
      out << " " << (m ? percent(m->relative_change) : "") << " |";
    }
    out << " " << r.questions << " | " << r.empty_before << " | " << r.empty_after << " | "
        << fixed(r.mean_candidates, 2) << " | " << fixed(r.mean_removed, 2) << " |\n";
  }
  return out.str();
}

std::string render_csv(const std::vector<QualityReport>& reports) {
  std::ostringstream out;
  out << "approach,metric,before,after,relative_change,questions,empty_before,empty_after,"
         "mean_candidates,mean_removed\n";
  for (const auto& r : reports) {
    for (const auto& m : r.metrics) {
      out << r.approach << "," << m.name << "," << fixed(m.before, 6) << "," << fixed(m.after, 6)
          << "," << (m.relative_change ? fixed(*m.relative_change, 6) : "") << "," << r.questions
          << "," << r.empty_before << "," << r.empty_after << "," << fixed(r.mean_candidates, 4)
          << "," << fixed(r.mean_removed, 4) << "\n";
    }
  }
  return out.str();
}

void write_question_rows_jsonl(std::ostream& out, const QualityReport& report) {
  for (const auto& row : report.per_question) {
    json j = {{"approach", report.approach},
              {"question_id", row.question_id},
              {"candidates_before", row.candidates_before},
              {"candidates_after", row.candidates_after},
              {"relevant", row.relevant}};
    for (std::size_t i = 0; i < row.values.size() && i < report.metrics.size(); ++i) {
      j[report.metrics[i].name] = {{"before", row.values[i].first},
                                   {"after", row.values[i].second}};
    }
    out << j.dump() << '\n';
  }
}

json to_json(const QualityReport& report) {
  json metrics = json::array();
  for (const auto& m : report.metrics) {
    metrics.push_back({{"name", m.name},
                       {"before", m.before},
                       {"after", m.after},
                       {"relative_change", m.relative_change ? json(*m.relative_change) : json()}});
  }
  return {{"approach", report.approach},
          {"metrics", metrics},
          {"questions", report.questions},
          {"empty_before", report.empty_before},
          {"empty_after", report.empty_after},
          {"mean_candidates", report.mean_candidates},
          {"mean_removed", report.mean_removed}};
}

QualityReport quality_report_from_json(const json& j) {
  try {
    QualityReport r;
    r.approach = j.at("approach").get<std::string>();
    for (const auto& m : j.at("metrics")) {
      MetricRow row{m.at("name").get<std::string>(), m.at("before").get<double>(),
                    m.at("after").get<double>(), std::nullopt};
      if (m.contains("relative_change") && !m["relative_change"].is_null()) {
        row.relative_change = m["relative_change"].get<double>();
      }
      r.metrics.push_back(row);
    }
    r.questions = j.at("questions").get<std::size_t>();
    r.empty_before = j.at("empty_before").get<std::size_t>();
    r.empty_after = j.at("empty_after").get<std::size_t>();
    r.mean_candidates = j.at("mean_candidates").get<double>();
    r.mean_removed = j.at("mean_removed").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad quality report: ") + e.what());
  }
}

}  // namespace kgav::evaluation

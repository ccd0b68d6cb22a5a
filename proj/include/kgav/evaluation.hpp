#pragma once

// Relevance judgments, order-preserving filtering of ranked candidate lists,
// and the before/after ranked-retrieval comparison (P@k, NDCG@k).

#include <json.hpp>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgav/classifier.hpp"
#include "kgav/dataset.hpp"
#include "kgav/kg_client.hpp"
#include "kgav/sparql.hpp"
#include "kgav/verbalizer.hpp"

namespace kgav::evaluation {

enum class MatchedVia { none, object_label, subject_label };

std::string to_string(MatchedVia via);

struct RelevanceJudgment {
  std::string candidate_id;
  bool relevant = false;
  MatchedVia matched_via = MatchedVia::none;
};

/// Lowercased, whitespace collapsed and trimmed.
std::string normalize_label(std::string_view text);

/// Relevant iff, in some row, a grounded triple's predicate label equals the
/// gold relation and its object (or else subject) label equals the gold
/// answer. Any entity carrying the matching label counts.
RelevanceJudgment judge(const sparql::QueryCandidate& candidate, const kg::ResultSet& rs,
                        const dataset::VanillaRecord& gold,
                        const verbalizer::LabelLookup& labels);

struct Entry {
  sparql::QueryCandidate candidate;
  /// Absent when the candidate produced no rows (nothing to verbalize).
  std::optional<verbalizer::AnswerText> answer;
  RelevanceJudgment judgment;
  std::optional<classifier::PairScore> score;
};

struct RankedAnswerList {
  std::string question_id;
  std::vector<Entry> entries;
  /// Relevant entries in the original, unfiltered list: the ideal basis for
  /// NDCG on both sides of a comparison.
  std::size_t ideal_relevant = 0;
  std::size_t removed = 0;

  /// Entries must already be in rank order.
  static RankedAnswerList from_entries(std::string question_id, std::vector<Entry> entries);
  std::vector<bool> relevance() const;
};

using EntryScorer = std::function<double(const Entry&)>;

/// Keeps entries with an answer text and score >= threshold, in their
/// original relative order.
RankedAnswerList filter(const RankedAnswerList& list, const EntryScorer& scorer,
                        double threshold = classifier::kDefaultThreshold);

/// filter() using each entry's stored PairScore (entries without one drop).
RankedAnswerList filter_by_stored_scores(const RankedAnswerList& list,
                                         double threshold = classifier::kDefaultThreshold);

/// Scores 1 for relevant entries, 0 otherwise. For bounding experiments.
double oracle_score(const Entry& entry);

double precision_at_k(const std::vector<bool>& relevance, std::size_t k);
/// Binary gains; IDCG from `ideal_relevant` relevant items; 0 if none.
double ndcg_at_k(const std::vector<bool>& relevance, std::size_t k, std::size_t ideal_relevant);

struct EvaluationConfig {
  std::vector<std::size_t> k_values = {1, 5};
  /// Throws ConfigError.
  void validate() const;
};

double precision_at_k(const RankedAnswerList& list, std::size_t k);
double ndcg_at_k(const RankedAnswerList& list, std::size_t k);

struct MetricRow {
  std::string name;  ///< "P@1", "NDCG@5", ...
  double before = 0.0;
  double after = 0.0;
  /// (after - before) / before; absent when before == 0.
  std::optional<double> relative_change;
};

struct QuestionRow {
  std::string question_id;
  std::size_t candidates_before = 0;
  std::size_t candidates_after = 0;
  std::size_t relevant = 0;
  std::vector<std::pair<double, double>> values;  ///< per metric: before, after
};

struct QualityReport {
  std::string approach;
  std::vector<MetricRow> metrics;
  std::size_t questions = 0;
  std::size_t empty_before = 0;  ///< questions with no candidates at all
  std::size_t empty_after = 0;
  double mean_candidates = 0.0;
  double mean_removed = 0.0;
  std::vector<QuestionRow> per_question;

  const MetricRow* find(const std::string& name) const;
};

/// Macro-averages every metric over questions. Throws MismatchedQuestions
/// unless both sides hold the same question ids.
QualityReport compare(const std::vector<RankedAnswerList>& before,
                      const std::vector<RankedAnswerList>& after,
                      const EvaluationConfig& config = {}, std::string approach = {});

/// Before/After columns per metric, one row per approach; P@1 and NDCG@1
/// share a column.
std::string render_markdown(const std::vector<QualityReport>& reports);
std::string render_csv(const std::vector<QualityReport>& reports);
void write_question_rows_jsonl(std::ostream& out, const QualityReport& report);

/// Aggregate fields only; per-question rows are left out.
nlohmann::json to_json(const QualityReport& report);
/// Throws FormatError.
QualityReport quality_report_from_json(const nlohmann::json& j);

}  // namespace kgav::evaluation

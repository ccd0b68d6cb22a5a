#include "kgav/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "kgav/error.hpp"

namespace kgav::pipeline {

void PipelineConfig::validate() const {
  if (row_cap < 1) throw ConfigError("row cap must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in [0, 1]");
  evaluation.validate();
}

void score_entries(std::vector<evaluation::Entry>& entries, const std::string& question,
                   const classifier::Scorer* scorer, double threshold) {
  if (!scorer) {
    for (auto& e : entries) {
      if (e.answer) e.score = classifier::apply_threshold(evaluation::oracle_score(e), threshold);
    }
    return;
  }
  std::vector<classifier::QAInput> inputs;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].answer) continue;
    inputs.push_back({question, entries[i].answer->text});
    index.push_back(i);
  }
  if (inputs.empty()) return;
  auto scores = scorer->score_batch(inputs);
  if (scores.size() != inputs.size()) throw MalformedResponse("scorer returned wrong count");
  for (std::size_t j = 0; j < index.size(); ++j) {
    entries[index[j]].score = classifier::apply_threshold(scores[j], threshold);
  }
}

QuestionResult process_question(const dataset::VanillaRecord& gold,
                                const qa::CandidateList& candidates,
                                const kg::SparqlEndpoint& endpoint,
                                const verbalizer::LabelLookup& labels,
                                const classifier::Scorer* scorer, const PipelineConfig& config) {
  QuestionResult result;
  result.question_id = gold.question_id;
  result.warnings = candidates.warnings;
  std::vector<evaluation::Entry> entries;
  for (const auto& original : candidates.candidates) {
    auto stripped = sparql::strip_unsupported(original);
    if (stripped.modifiers.size() != original.modifiers.size() ||
        stripped.projection.variables != original.projection.variables) {
      if (config.drop_stripped) {
        ++result.dropped;
        continue;
      }
      ++result.stripped;
    }
    auto runnable = sparql::rewrite_select_all(stripped);
    auto rs = kg::execute(runnable, endpoint, config.row_cap);
    evaluation::Entry e;
    e.candidate = original;
    auto texts = verbalizer::verbalize_all(runnable, rs, config.mode, labels, 1);
    if (!texts.empty()) {
      e.answer = std::move(texts.front());
      e.answer->candidate_id = original.id;
    }
    e.judgment = evaluation::judge(runnable, rs, gold, labels);
    e.judgment.candidate_id = original.id;
    entries.push_back(std::move(e));
  }
  score_entries(entries, gold.question, scorer, config.threshold);
  result.before = evaluation::RankedAnswerList::from_entries(gold.question_id, std::move(entries));
  result.after = evaluation::filter_by_stored_scores(result.before, config.threshold);
  return result;
}

RunResult run(const std::vector<dataset::VanillaRecord>& questions, const Backends& backends,
              const classifier::Scorer* scorer, const PipelineConfig& config,
              std::string approach) {
  config.validate();
  std::vector<QuestionResult> results(questions.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < questions.size() && !stop; i = next++) {
      const auto& gold = questions[i];
      try {
        auto candidates = qa::ask_once(gold.question, backends.kgqa, backends.questions);
        results[i] = process_question(gold, candidates, backends.endpoint, backends.labels,
                                      scorer, config);
      } catch (const RemoteUnavailable&) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        stop = true;
      } catch (const RemoteProtocolError&) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        stop = true;
      } catch (const Error& e) {
        QuestionResult failed;
        failed.question_id = gold.question_id;
        failed.before.question_id = gold.question_id;
        failed.after.question_id = gold.question_id;
        failed.failure = std::string(to_string(e.category())) + ": " + e.what();
        results[i] = std::move(failed);
      }
    }
  };
  const int threads = std::min<int>(config.workers, std::max<int>(1, static_cast<int>(questions.size())));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (fatal) std::rethrow_exception(fatal);

  RunResult out;
  std::vector<evaluation::RankedAnswerList> before, after;
  before.reserve(results.size());
  after.reserve(results.size());
  for (const auto& r : results) {
    before.push_back(r.before);
    after.push_back(r.after);
    out.failed += r.failure ? 1 : 0;
    out.warnings += r.warnings.size();
    out.stripped += r.stripped;
    out.dropped += r.dropped;
  }
  out.report = evaluation::compare(before, after, config.evaluation, std::move(approach));
  out.questions = std::move(results);
  return out;
}

}  // namespace kgav::pipeline

#pragma once

// Per-question flow: candidates -> strip/rewrite -> execute -> verbalize ->
// score -> judge, then filter and compare across the question set.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kgav/classifier.hpp"
#include "kgav/dataset.hpp"
#include "kgav/evaluation.hpp"
#include "kgav/kg_client.hpp"
#include "kgav/qa_client.hpp"
#include "kgav/verbalizer.hpp"

namespace kgav::pipeline {

struct PipelineConfig {
  verbalizer::Mode mode = verbalizer::Mode::nlg;
  std::size_t row_cap = kg::kDefaultRowCap;
  /// Drop candidates carrying unsupported modifiers instead of executing
  /// their stripped form.
  bool drop_stripped = false;
  double threshold = classifier::kDefaultThreshold;
  evaluation::EvaluationConfig evaluation;
  int workers = 1;
  /// Throws ConfigError.
  void validate() const;
};

struct Backends {
  const qa::KgqaBackend& kgqa;
  qa::QuestionCache& questions;
  const kg::SparqlEndpoint& endpoint;
  verbalizer::LabelLookup labels;
};

struct QuestionResult {
  std::string question_id;
  evaluation::RankedAnswerList before;
  evaluation::RankedAnswerList after;
  std::vector<std::string> warnings;
  /// Set when the question could not be processed; both lists are then empty.
  std::optional<std::string> failure;
  std::size_t stripped = 0;
  std::size_t dropped = 0;
};

struct RunResult {
  evaluation::QualityReport report;
  std::vector<QuestionResult> questions;  ///< input order
  std::size_t failed = 0;
  std::size_t warnings = 0;
  std::size_t stripped = 0;
  std::size_t dropped = 0;
};

/// Scores every entry that has an answer. A null scorer is the oracle.
void score_entries(std::vector<evaluation::Entry>& entries, const std::string& question,
                   const classifier::Scorer* scorer, double threshold);

/// Unfiltered list for one question, entries in candidate rank order.
QuestionResult process_question(const dataset::VanillaRecord& gold,
                                const qa::CandidateList& candidates,
                                const kg::SparqlEndpoint& endpoint,
                                const verbalizer::LabelLookup& labels,
                                const classifier::Scorer* scorer, const PipelineConfig& config);

/// Questions are processed independently on `config.workers` threads;
/// results do not depend on the worker count. A question whose KGQA or
/// endpoint call fails ends up with empty lists. RemoteUnavailable and
/// RemoteProtocolError from the scorer abort the whole run.
RunResult run(const std::vector<dataset::VanillaRecord>& questions, const Backends& backends,
              const classifier::Scorer* scorer, const PipelineConfig& config,
              std::string approach);

}  // namespace kgav::pipeline

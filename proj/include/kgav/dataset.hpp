#pragma once

// VANiLLa-shaped records and the labeled question/answer pairs built from
// them by random negative sampling.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kgav/verbalizer.hpp"

namespace kgav::dataset {

struct VanillaRecord {
  std::string question_id;
  std::string question;
  std::string answer;
  std::string answer_sentence;
  std::string question_entity_label;
  std::string question_relation;
  friend bool operator==(const VanillaRecord&, const VanillaRecord&) = default;
};

enum class Label { correct, incorrect };

std::string to_string(Label label);
Label label_from_string(std::string_view text);

struct LabeledQAPair {
  std::string question;
  std::string answer_text;
  Label label = Label::incorrect;
  std::string source_question_id;
  std::string source_answer_id;
  friend bool operator==(const LabeledQAPair&, const LabeledQAPair&) = default;
};

/// Which rendering of a record's answer a pair carries.
enum class AnswerField {
  sentence,       ///< the dataset's answer_sentence, verbatim
  nlg,            ///< "{entity}'s {relation} is {answer}."
  bag_of_labels,  ///< "{entity} {relation} {answer}"
};

AnswerField answer_field_from_string(std::string_view text);
std::string to_string(AnswerField field);

std::string answer_text(const VanillaRecord& record, AnswerField field,
                        const verbalizer::TemplateTable& table = {});

struct SamplingConfig {
  int negatives_per_positive = 1;
  std::uint64_t seed = 0;
  double split_ratio = 0.67;
  /// Keep every question string on one side of the split.
  bool group_by_question = false;
  AnswerField answer_field = AnswerField::sentence;

  /// Throws ConfigError.
  void validate() const;
};

struct LoadResult {
  std::vector<VanillaRecord> records;
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
};

/// JSON array or JSON-lines. Throws IoError / FormatError.
LoadResult load_vanilla(const std::filesystem::path& path);
LoadResult parse_vanilla(std::string_view content);

/// One correct pair per record plus `negatives_per_positive` incorrect pairs
/// drawn uniformly from other records, shuffled. Pure function of its
/// arguments. Throws InsufficientRecords.
std::vector<LabeledQAPair> negative_sample(const std::vector<VanillaRecord>& records,
                                           const SamplingConfig& cfg);

struct Split {
  std::vector<LabeledQAPair> train;
  std::vector<LabeledQAPair> test;
};

/// |train| = round(split_ratio * N) (approximately, when grouping).
Split split(const std::vector<LabeledQAPair>& pairs, const SamplingConfig& cfg);

void write_pairs_jsonl(std::ostream& out, const std::vector<LabeledQAPair>& pairs);
std::vector<LabeledQAPair> read_pairs_jsonl(const std::filesystem::path& path);

void write_records_jsonl(std::ostream& out, const std::vector<VanillaRecord>& records);

}  // namespace kgav::dataset

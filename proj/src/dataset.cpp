#include "kgav/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "kgav/error.hpp"

namespace kgav::dataset {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 6> kFields = {
    "question_id", "question", "answer", "answer_sentence", "question_entity_label",
    "question_relation"};

// Seeds for the two random streams derived from one user seed.
constexpr std::uint64_t kSplitStream = 0x9e3779b97f4a7c15ULL;

std::string field_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) return value.dump();
  if (value.is_array() && value.size() == 1) return field_string(value.front());
  throw FormatError("unsupported value " + value.dump());
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

void add_record(const json& obj, std::size_t index, LoadResult& result) {
  if (!obj.is_object()) {
    result.warnings.push_back("record " + std::to_string(index) + ": not an object");
    ++result.skipped;
    return;
  }
  std::array<std::string, 6> values;
  for (std::size_t f = 0; f < kFields.size(); ++f) {
    auto it = obj.find(kFields[f]);
    if (it == obj.end() || it->is_null()) {
      result.warnings.push_back("record " + std::to_string(index) + ": missing field '" +
                                kFields[f] + "'");
      ++result.skipped;
      return;
    }
    try {
      values[f] = field_string(*it);
    } catch (const FormatError& e) {
      result.warnings.push_back("record " + std::to_string(index) + ": field '" + kFields[f] +
                                "': " + e.what());
      ++result.skipped;
      return;
    }
  }
  VanillaRecord r{values[0], values[1], values[2], values[3], values[4], values[5]};
  if (blank(r.question) || blank(r.answer_sentence)) {
    result.warnings.push_back("record " + std::to_string(index) +
                              ": empty question or answer_sentence");
    ++result.skipped;
    return;
  }
  result.records.push_back(std::move(r));
}

}  // namespace

std::string to_string(Label label) { return label == Label::correct ? "correct" : "incorrect"; }

Label label_from_string(std::string_view text) {
  if (text == "correct" || text == "1") return Label::correct;
  if (text == "incorrect" || text == "0") return Label::incorrect;
  throw FormatError("unknown label '" + std::string(text) + "'");
}

AnswerField answer_field_from_string(std::string_view text) {
  if (text == "sentence" || text == "a1") return AnswerField::sentence;
  if (text == "nlg" || text == "a2") return AnswerField::nlg;
  if (text == "bag-of-labels" || text == "a3") return AnswerField::bag_of_labels;
  throw ConfigError("unknown answer field '" + std::string(text) + "'");
}

std::string to_string(AnswerField field) {
  switch (field) {
    case AnswerField::sentence: return "sentence";
    case AnswerField::nlg: return "nlg";
    case AnswerField::bag_of_labels: return "bag-of-labels";
  }
  return "sentence";
}

std::string answer_text(const VanillaRecord& record, AnswerField field,
                        const verbalizer::TemplateTable& table) {
  using verbalizer::single_line;
  switch (field) {
    case AnswerField::sentence:
      return single_line(record.answer_sentence);
    case AnswerField::nlg:
      return verbalizer::render_clause(record.question_entity_label, record.question_relation,
                                       record.answer, table) +
             ".";
    case AnswerField::bag_of_labels:
      return single_line(record.question_entity_label + " " + record.question_relation + " " +
                         record.answer);
  }
  return record.answer_sentence;
}

void SamplingConfig::validate() const {
  if (negatives_per_positive < 1) throw ConfigError("negatives per positive must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");
}

LoadResult parse_vanilla(std::string_view content) {
  LoadResult result;
  auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    result.warnings.push_back("no records");
    return result;
  }
  if (content[first] == '[') {
    json doc;
    try {
      doc = json::parse(content);
    } catch (const json::exception& e) {
      throw FormatError(std::string("invalid JSON array: ") + e.what());
    }
    for (std::size_t i = 0; i < doc.size(); ++i) add_record(doc[i], i, result);
  } else if (content[first] == '{') {
    std::size_t index = 0, line_no = 0, pos = 0;
    while (pos <= content.size()) {
      auto end = content.find('\n', pos);
      if (end == std::string_view::npos) end = content.size();
      auto line = content.substr(pos, end - pos);
      ++line_no;
      pos = end + 1;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::exception& e) {
        throw FormatError("line " + std::to_string(line_no) + " is not a JSON object: " + e.what());
      }
      add_record(obj, index++, result);
    }
  } else {
    throw FormatError("expected a JSON array or JSON-lines objects");
  }
  if (result.records.empty() && result.skipped == 0) result.warnings.push_back("no records");
  return result;
}

LoadResult load_vanilla(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_vanilla(buffer.str());
}

std::vector<LabeledQAPair> negative_sample(const std::vector<VanillaRecord>& records,
                                           const SamplingConfig& cfg) {
  cfg.validate();
  if (records.size() < 2) {
    throw InsufficientRecords("negative sampling needs at least 2 records, got " +
                              std::to_string(records.size()));
  }
  std::set<std::string_view> ids;
  for (const auto& r : records) ids.insert(r.question_id);
  if (ids.size() < 2) throw InsufficientRecords("all records share one question_id");

  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& r : records) texts.push_back(answer_text(r, cfg.answer_field));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
  std::vector<LabeledQAPair> pairs;
  pairs.reserve(records.size() * static_cast<std::size_t>(cfg.negatives_per_positive + 1));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    pairs.push_back({r.question, texts[i], Label::correct, r.question_id, r.question_id});
    for (int n = 0; n < cfg.negatives_per_positive; ++n) {
      std::size_t k;
      do {
        k = pick(rng);
      } while (k == i || records[k].question_id == r.question_id);
      pairs.push_back({r.question, texts[k], Label::incorrect, r.question_id,
                       records[k].question_id});
    }
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  return pairs;
}

Split split(const std::vector<LabeledQAPair>& pairs, const SamplingConfig& cfg) {
  cfg.validate();
  Split out;
  if (pairs.empty()) return out;
  const auto target = static_cast<std::size_t>(
      std::llround(cfg.split_ratio * static_cast<double>(pairs.size())));
  std::mt19937_64 rng(cfg.seed ^ kSplitStream);

  if (!cfg.group_by_question) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i < target ? out.train : out.test).push_back(pairs[order[i]]);
    }
    return out;
  }

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pairs.size(); ++i) groups[pairs[i].question].push_back(i);
  std::vector<const std::vector<std::size_t>*> order;
  order.reserve(groups.size());
  for (const auto& [question, members] : groups) order.push_back(&members);
  std::shuffle(order.begin(), order.end(), rng);
  for (const auto* members : order) {
    auto& side = out.train.size() < target ? out.train : out.test;
    for (std::size_t i : *members) side.push_back(pairs[i]);
  }
  return out;
}

void write_pairs_jsonl(std::ostream& out, const std::vector<LabeledQAPair>& pairs) {
  for (const auto& p : pairs) {
    json j = {{"question", p.question},
              {"answer", p.answer_text},
              {"label", to_string(p.label)},
              {"source_question_id", p.source_question_id},
              {"source_answer_id", p.source_answer_id}};
    out << j.dump() << '\n';
  }
}

std::vector<LabeledQAPair> read_pairs_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<LabeledQAPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      pairs.push_back({j.at("question").get<std::string>(), j.at("answer").get<std::string>(),
                       label_from_string(j.at("label").get<std::string>()),
                       j.value("source_question_id", ""), j.value("source_answer_id", "")});
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

void write_records_jsonl(std::ostream& out, const std::vector<VanillaRecord>& records) {
  for (const auto& r : records) {
    json j = {{"question_id", r.question_id},
              {"question", r.question},
              {"answer", r.answer},
              {"answer_sentence", r.answer_sentence},
              {"question_entity_label", r.question_entity_label},
              {"question_relation", r.question_relation}};
    out << j.dump() << '\n';
  }
}

}  // namespace kgav::dataset

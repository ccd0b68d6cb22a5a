#include "kgav/verbalizer.hpp"

#include <algorithm>
#include <cctype>

#include "kgav/error.hpp"

namespace kgav::verbalizer {

namespace {
std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}
}  // namespace

std::string to_string(Mode mode) {
  return mode == Mode::nlg ? "nlg" : "bag-of-labels";
}

Mode mode_from_string(std::string_view text) {
  auto t = lower(text);
  if (t == "nlg" || t == "a2") return Mode::nlg;
  if (t == "bag-of-labels" || t == "a3") return Mode::bag_of_labels;
  throw ConfigError("unknown verbalization mode '" + std::string(text) + "'");
}

LabelLookup make_label_lookup(const kg::LabelSource& source, std::string language) {
  return [&source, language = std::move(language)](const std::string& iri) {
    return source.resolve(iri, language).label;
  };
}

bool TemplateTable::uses_copula(std::string_view predicate_label) const {
  auto label = lower(single_line(predicate_label));
  return std::any_of(copula_predicates.begin(), copula_predicates.end(),
                     [&](const std::string& p) { return lower(p) == label; });
}

std::string single_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += ch;
  }
  return out;
}

std::string render_clause(std::string_view subject, std::string_view predicate,
                          std::string_view object, const TemplateTable& table) {
  std::string s = single_line(subject), p = single_line(predicate), o = single_line(object);
  if (table.uses_copula(p)) return s + " is " + p + " " + o;
  return s + "'s " + p + " is " + o;
}

std::string term_label(const sparql::Term& term, const LabelLookup& labels) {
  if (term.is_literal()) return term.value;
  return labels(term.value);
}

std::string verbalize_triple(const sparql::GroundedTriple& triple, const LabelLookup& labels,
                             const TemplateTable& table) {
  return render_clause(term_label(triple.subject, labels), term_label(triple.predicate, labels),
                       term_label(triple.object, labels), table);
}

AnswerText verbalize_candidate(const sparql::QueryCandidate& q, const sparql::Binding& b,
                               const LabelLookup& labels, const TemplateTable& table) {
  std::string text;
  for (const auto& triple : sparql::ground_patterns(q, b)) {
    if (!text.empty()) text += " and ";
    text += verbalize_triple(triple, labels, table);
  }
  text += ".";
  return AnswerText{single_line(text), Mode::nlg, q.id, 0};
}

AnswerText verbalize_bag_of_labels(const sparql::QueryCandidate& q, const sparql::Binding& b,
                                   const LabelLookup& labels) {
  std::vector<sparql::Term> seen;
  std::string text;
  auto emit = [&](const sparql::Term& t) {
    if (std::find(seen.begin(), seen.end(), t) != seen.end()) return;
    seen.push_back(t);
    std::string label = single_line(term_label(t, labels));
    if (label.empty()) return;
    if (!text.empty()) text += ' ';
    text += label;
  };
  for (const auto& triple : sparql::ground_patterns(q, b)) {
    emit(triple.subject);
    emit(triple.predicate);
    emit(triple.object);
  }
  return AnswerText{text, Mode::bag_of_labels, q.id, 0};
}

AnswerText verbalize(Mode mode, const sparql::QueryCandidate& q, const sparql::Binding& b,
                     const LabelLookup& labels, const TemplateTable& table) {
  return mode == Mode::nlg ? verbalize_candidate(q, b, labels, table)
                           : verbalize_bag_of_labels(q, b, labels);
}

std::vector<AnswerText> verbalize_all(const sparql::QueryCandidate& q, const kg::ResultSet& rs,
                                      Mode mode, const LabelLookup& labels,
                                      std::size_t row_cap, const TemplateTable& table) {
  std::vector<AnswerText> out;
  std::size_t n = std::min(row_cap, rs.rows.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto answer = verbalize(mode, q, rs.rows[i], labels, table);
    answer.binding_index = i;
    out.push_back(std::move(answer));
  }
  return out;
}

}  // namespace kgav::verbalizer

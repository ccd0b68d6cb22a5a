#pragma once

// Natural-language renderings of grounded query candidates: a templated
// sentence per candidate (nlg) or the concatenated labels of everything it
// mentions (bag-of-labels).

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "kgav/kg_client.hpp"
#include "kgav/sparql.hpp"

namespace kgav::verbalizer {

enum class Mode { nlg, bag_of_labels };

/// "nlg" / "bag-of-labels".
std::string to_string(Mode mode);
/// Accepts "nlg", "a2", "bag-of-labels", "a3" (case-insensitive).
Mode mode_from_string(std::string_view text);

struct AnswerText {
  std::string text;
  Mode mode = Mode::nlg;
  std::string candidate_id;
  std::size_t binding_index = 0;
  friend bool operator==(const AnswerText&, const AnswerText&) = default;
};

/// Label for an IRI. Must never return an empty string.
using LabelLookup = std::function<std::string(const std::string& iri)>;

LabelLookup make_label_lookup(const kg::LabelSource& source, std::string language = "en");

/// Predicates rendered as "{S} is {P} {O}"; all others as "{S}'s {P} is {O}".
/// Matched against the predicate label, case-insensitively.
struct TemplateTable {
  std::vector<std::string> copula_predicates = {"given name", "family name", "name"};
  bool uses_copula(std::string_view predicate_label) const;
};

std::string render_clause(std::string_view subject, std::string_view predicate,
                          std::string_view object, const TemplateTable& table = {});

/// Label of an IRI via `labels`; lexical form of a literal.
std::string term_label(const sparql::Term& term, const LabelLookup& labels);

std::string verbalize_triple(const sparql::GroundedTriple& triple, const LabelLookup& labels,
                             const TemplateTable& table = {});

/// Clauses in pattern order joined by " and ", terminated by ".".
/// Throws UnboundVariable.
AnswerText verbalize_candidate(const sparql::QueryCandidate& q, const sparql::Binding& b,
                               const LabelLookup& labels, const TemplateTable& table = {});

/// Labels of every IRI and literal in the grounded triples (subject,
/// predicate, object; pattern order), first occurrence only, space-joined.
AnswerText verbalize_bag_of_labels(const sparql::QueryCandidate& q, const sparql::Binding& b,
                                   const LabelLookup& labels);

AnswerText verbalize(Mode mode, const sparql::QueryCandidate& q, const sparql::Binding& b,
                     const LabelLookup& labels, const TemplateTable& table = {});

/// One AnswerText per row, at most `row_cap` of them, in row order.
std::vector<AnswerText> verbalize_all(const sparql::QueryCandidate& q, const kg::ResultSet& rs,
                                      Mode mode, const LabelLookup& labels,
                                      std::size_t row_cap = 1, const TemplateTable& table = {});

/// Collapses whitespace (including newlines) to single spaces and trims.
std::string single_line(std::string_view text);

}  // namespace kgav::verbalizer

#pragma once

// Analyzable form of SPARQL SELECT query candidates.
//
// Only the subset produced by typical KGQA systems is understood: PREFIX and
// BASE declarations, SELECT [DISTINCT] over variables or `*`, one basic graph
// pattern, and FILTER / aggregate / solution-modifier clauses, which are kept
// as opaque strings so they can be stripped before execution.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgav::sparql {

enum class TermKind : std::uint8_t { iri, variable, literal };

struct Term {
  TermKind kind = TermKind::iri;
  /// Absolute IRI, variable name without the leading `?`, or lexical form.
  std::string value;
  std::optional<std::string> language;
  std::optional<std::string> datatype;

  static Term iri(std::string value);
  static Term variable(std::string name);
  static Term literal(std::string lexical,
                      std::optional<std::string> language = std::nullopt,
                      std::optional<std::string> datatype = std::nullopt);

  bool is_variable() const noexcept { return kind == TermKind::variable; }
  bool is_iri() const noexcept { return kind == TermKind::iri; }
  bool is_literal() const noexcept { return kind == TermKind::literal; }

  friend auto operator<=>(const Term&, const Term&) = default;
};

/// N-Triples style rendering (`<iri>`, `?v`, `"lex"@en`). Also the sort key
/// for result rows.
std::string to_ntriples(const Term& term);

struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const TriplePattern&, const TriplePattern&) = default;
};

/// A pattern whose three positions hold only IRIs and literals.
using GroundedTriple = TriplePattern;

struct Projection {
  bool all = false;
  std::vector<std::string> variables;

  static Projection star() { return Projection{true, {}}; }
  friend bool operator==(const Projection&, const Projection&) = default;
};

struct QueryCandidate {
  std::string id;
  int rank = 1;
  Projection projection;
  bool distinct = false;
  std::vector<TriplePattern> patterns;
  /// FILTER, aggregate projection expressions and solution modifiers,
  /// verbatim, in source order.
  std::vector<std::string> modifiers;
  std::map<std::string, std::string> prefixes;
  std::string raw_text;

  friend bool operator==(const QueryCandidate&, const QueryCandidate&) = default;
};

/// Equality over what the query means: ignores id, rank and raw_text.
bool structurally_equal(const QueryCandidate& a, const QueryCandidate& b);

struct Binding {
  std::map<std::string, Term> assignments;

  /// Throws std::invalid_argument for variable-kind values.
  void set(const std::string& variable, Term value);
  const Term* find(const std::string& variable) const;

  friend auto operator<=>(const Binding&, const Binding&) = default;
};

struct ParseOptions {
  /// Consulted for prefixed names whose prefix is not declared in the text
  /// (public endpoints predefine e.g. `wd:`). Prefixes taken from here are
  /// recorded in the candidate's prefix map.
  std::map<std::string, std::string> predeclared;
};

/// Throws ParseError carrying the byte offset of the problem.
QueryCandidate parse_query(std::string_view text, const ParseOptions& options = {});

/// Removes COUNT/MAX/MIN/SUM/AVG aggregates, FILTER, LIMIT, OFFSET, ORDER BY,
/// GROUP BY and HAVING clauses. A projection left empty becomes `*`.
QueryCandidate strip_unsupported(const QueryCandidate& q);

/// `SELECT ... WHERE` becomes `SELECT DISTINCT * WHERE`.
QueryCandidate rewrite_select_all(const QueryCandidate& q);

bool is_unsupported_modifier(std::string_view modifier);

std::string serialize(const QueryCandidate& q);

/// Variables of the patterns in first-occurrence order.
std::vector<std::string> pattern_variables(const std::vector<TriplePattern>& patterns);

/// Throws UnboundVariable for the first pattern variable missing from `b`.
std::vector<GroundedTriple> ground_patterns(const QueryCandidate& q, const Binding& b);

namespace vocab {
inline constexpr std::string_view rdf_type =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view rdfs_label =
    "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
}  // namespace vocab

}  // namespace kgav::sparql

#pragma once

// Executing query candidates and resolving labels, against either a remote
// SPARQL 1.1 endpoint or the in-memory MockGraph.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgav/cache.hpp"
#include "kgav/sparql.hpp"

namespace kgav::kg {

using sparql::Binding;
using sparql::QueryCandidate;
using sparql::Term;
using sparql::TriplePattern;

inline constexpr std::size_t kDefaultRowCap = 1000;

struct ResultSet {
  std::vector<std::string> variables;
  std::vector<Binding> rows;

  bool empty() const noexcept { return rows.empty(); }
  friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

/// Drops duplicate rows, sorts by the N-Triples rendering of each row's
/// values (in `variables` order) and keeps at most `row_cap` rows.
void canonicalize(ResultSet& rs, std::size_t row_cap);

/// `application/sparql-results+json`. Parsing throws MalformedResponse.
ResultSet parse_results_json(const std::string& body);
std::string to_results_json(const ResultSet& rs);

// ---- in-memory graph ---------------------------------------------------

class MockGraph {
 public:
  struct Triple {
    std::string subject;
    std::string predicate;
    Term object;
    friend auto operator<=>(const Triple&, const Triple&) = default;
  };

  /// Returns false if the triple was already present. Throws
  /// std::invalid_argument for a variable object.
  bool add(std::string subject, std::string predicate, Term object);
  void add_label(const std::string& iri, const std::string& language, std::string label);

  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }

  /// Indices of triples with the given subject/predicate/object (nullptr
  /// when none).
  const std::vector<std::size_t>* with_subject(const std::string& iri) const;
  const std::vector<std::size_t>* with_predicate(const std::string& iri) const;
  const std::vector<std::size_t>* with_object(const Term& term) const;

  /// language tag -> label
  const std::map<std::string, std::string>* labels_of(const std::string& iri) const;

 private:
  std::vector<Triple> triples_;
  std::set<Triple> present_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_subject_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_predicate_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_object_;
  std::unordered_map<std::string, std::map<std::string, std::string>> labels_;
};

/// Conjunctive BGP evaluation: one row per distinct assignment of the
/// pattern variables that satisfies every pattern. Rows are canonicalized
/// with no cap.
ResultSet match_bgp(const std::vector<TriplePattern>& patterns, const MockGraph& g);

// ---- endpoints ---------------------------------------------------------

class SparqlEndpoint {
 public:
  virtual ~SparqlEndpoint() = default;
  /// Raw evaluation; row order and duplicates are the endpoint's business.
  virtual ResultSet select(const QueryCandidate& q, std::size_t row_cap) const = 0;
  /// Stable identity used in cache keys.
  virtual std::string describe() const = 0;
};

class MockEndpoint final : public SparqlEndpoint {
 public:
  MockEndpoint(std::shared_ptr<const MockGraph> graph, std::string name = "mock");
  ResultSet select(const QueryCandidate& q, std::size_t row_cap) const override;
  std::string describe() const override { return "mock:" + name_; }
  const MockGraph& graph() const noexcept { return *graph_; }

 private:
  std::shared_ptr<const MockGraph> graph_;
  std::string name_;
};

struct HttpEndpointConfig {
  std::string url;
  double timeout_seconds = 30.0;
  bool use_post = false;
  /// Sent as `Authorization: Bearer ...` when non-empty.
  std::string bearer_token;
};

/// SPARQL 1.1 Protocol client. Queries without a LIMIT get `LIMIT row_cap`
/// appended on the wire.
class HttpEndpoint final : public SparqlEndpoint {
 public:
  explicit HttpEndpoint(HttpEndpointConfig config);
  ResultSet select(const QueryCandidate& q, std::size_t row_cap) const override;
  std::string describe() const override { return "http:" + config_.url; }

 private:
  HttpEndpointConfig config_;
};

/// Replays responses from a ResponseCache; misses go to the inner endpoint.
class CachedEndpoint final : public SparqlEndpoint {
 public:
  CachedEndpoint(std::shared_ptr<const SparqlEndpoint> inner,
                 std::shared_ptr<const ResponseCache> cache);
  ResultSet select(const QueryCandidate& q, std::size_t row_cap) const override;
  std::string describe() const override { return inner_->describe(); }

 private:
  std::shared_ptr<const SparqlEndpoint> inner_;
  std::shared_ptr<const ResponseCache> cache_;
};

/// Distinct rows in deterministic order, at most `row_cap` of them.
ResultSet execute(const QueryCandidate& q, const SparqlEndpoint& endpoint,
                  std::size_t row_cap = kDefaultRowCap);

// ---- labels ------------------------------------------------------------

enum class LabelOrigin { endpoint_label, any_language_label, uri_fallback };

std::string to_string(LabelOrigin origin);

struct LabelRecord {
  std::string iri;
  std::string label;
  LabelOrigin source = LabelOrigin::uri_fallback;
  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

/// Final IRI segment after the last '/' or '#', underscores to spaces,
/// percent-escapes decoded. Falls back to the whole IRI if that is empty.
std::string uri_fallback_label(const std::string& iri);

/// The label fallback chain over one entity's language -> label map.
LabelRecord choose_label(const std::string& iri,
                         const std::map<std::string, std::string>* labels,
                         const std::string& preferred_language);

class LabelSource {
 public:
  virtual ~LabelSource() = default;
  virtual LabelRecord resolve(const std::string& iri, const std::string& language) const = 0;
  virtual std::string describe() const = 0;
};

LabelRecord resolve_label(const std::string& iri, const std::string& language,
                          const MockGraph& graph);

class MockLabels final : public LabelSource {
 public:
  explicit MockLabels(std::shared_ptr<const MockGraph> graph) : graph_(std::move(graph)) {}
  LabelRecord resolve(const std::string& iri, const std::string& language) const override {
    return resolve_label(iri, language, *graph_);
  }
  std::string describe() const override { return "mock"; }

 private:
  std::shared_ptr<const MockGraph> graph_;
};

/// Looks up rdfs:label through any SparqlEndpoint.
class EndpointLabels final : public LabelSource {
 public:
  explicit EndpointLabels(std::shared_ptr<const SparqlEndpoint> endpoint)
      : endpoint_(std::move(endpoint)) {}
  LabelRecord resolve(const std::string& iri, const std::string& language) const override;
  std::string describe() const override { return endpoint_->describe(); }

 private:
  std::shared_ptr<const SparqlEndpoint> endpoint_;
};

class CachedLabels final : public LabelSource {
 public:
  CachedLabels(std::shared_ptr<const LabelSource> inner,
               std::shared_ptr<const ResponseCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}
  LabelRecord resolve(const std::string& iri, const std::string& language) const override;
  std::string describe() const override { return inner_->describe(); }

 private:
  std::shared_ptr<const LabelSource> inner_;
  std::shared_ptr<const ResponseCache> cache_;
};

}  // namespace kgav::kg

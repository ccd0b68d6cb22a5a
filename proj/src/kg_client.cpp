#include "kgav/kg_client.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kgav/error.hpp"
#include "kgav/http.hpp"

namespace kgav::kg {

using nlohmann::json;
using sparql::TermKind;

// ---- result sets -------------------------------------------------------

namespace {

// Three-way comparison of N-Triples renderings; a missing term renders as
// the empty string.
int compare_rendered(const Term* a, const Term* b) {
  if (!a || !b) return (a ? 1 : 0) - (b ? 1 : 0);
  if (a->is_iri() && b->is_iri()) {
    // "<x>" against "<y>": the closing bracket takes part once one IRI ends.
    const std::string& x = a->value;
    const std::string& y = b->value;
    std::size_t n = std::min(x.size(), y.size());
    int c = n ? std::memcmp(x.data(), y.data(), n) : 0;
    if (c != 0) return c < 0 ? -1 : 1;
    if (x.size() == y.size()) return 0;
    unsigned char next = x.size() < y.size() ? static_cast<unsigned char>(y[n]) : static_cast<unsigned char>(x[n]);
    bool x_first = x.size() < y.size() ? '>' <= next : next < '>';
    return x_first ? -1 : 1;
  }
  int c = sparql::to_ntriples(*a).compare(sparql::to_ntriples(*b));
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

void canonicalize(ResultSet& rs, std::size_t row_cap) {
  if (rs.rows.size() <= 1) {
    if (rs.rows.size() > row_cap) rs.rows.clear();
    return;
  }
  const std::size_t width = rs.variables.size();
  std::vector<const Term*> cells;
  cells.reserve(rs.rows.size() * width);
  for (const auto& row : rs.rows) {
    for (const auto& v : rs.variables) cells.push_back(row.find(v));
  }
  auto compare = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < width; ++k) {
      if (int c = compare_rendered(cells[i * width + k], cells[j * width + k])) return c;
    }
    return 0;
  };
  std::vector<std::size_t> order(rs.rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return compare(i, j) < 0; });
  order.erase(std::unique(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return compare(i, j) == 0; }),
              order.end());
  if (order.size() > row_cap) order.resize(row_cap);
  std::vector<Binding> rows;
  rows.reserve(order.size());
  for (std::size_t index : order) rows.push_back(std::move(rs.rows[index]));
  rs.rows = std::move(rows);
}

ResultSet parse_results_json(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("invalid JSON: ") + e.what());
  }
  try {
    ResultSet rs;
    const auto& vars = doc.at("head").at("vars");
    if (!vars.is_array()) throw MalformedResponse("head.vars is not an array");
    for (const auto& v : vars) rs.variables.push_back(v.get<std::string>());
    const auto& bindings = doc.at("results").at("bindings");
    if (!bindings.is_array()) throw MalformedResponse("results.bindings is not an array");
    for (const auto& row : bindings) {
      if (!row.is_object()) throw MalformedResponse("binding row is not an object");
      Binding b;
      for (const auto& [name, cell] : row.items()) {
        if (std::find(rs.variables.begin(), rs.variables.end(), name) == rs.variables.end()) {
          throw MalformedResponse("binding for undeclared variable " + name);
        }
        auto type = cell.at("type").get<std::string>();
        auto value = cell.at("value").get<std::string>();
        if (type == "uri") {
          b.set(name, Term::iri(value));
        } else if (type == "bnode") {
          b.set(name, Term::iri("_:" + value));
        } else if (type == "literal" || type == "typed-literal") {
          std::optional<std::string> lang, datatype;
          if (cell.contains("xml:lang")) lang = cell["xml:lang"].get<std::string>();
          if (cell.contains("datatype")) datatype = cell["datatype"].get<std::string>();
          b.set(name, Term::literal(value, lang, datatype));
        } else {
          throw MalformedResponse("unknown term type " + type);
        }
      }
      rs.rows.push_back(std::move(b));
    }
    return rs;
  } catch (const json::exception& e) {
    throw MalformedResponse(e.what());
  }
}

std::string to_results_json(const ResultSet& rs) {
  json bindings = json::array();
  for (const auto& row : rs.rows) {
    json obj = json::object();
    for (const auto& [name, t] : row.assignments) {
      json cell;
      if (t.is_iri() && t.value.starts_with("_:")) {
        cell = {{"type", "bnode"}, {"value", t.value.substr(2)}};
      } else if (t.is_iri()) {
        cell = {{"type", "uri"}, {"value", t.value}};
      } else {
        cell = {{"type", "literal"}, {"value", t.value}};
        if (t.language) cell["xml:lang"] = *t.language;
        if (t.datatype) cell["datatype"] = *t.datatype;
      }
      obj[name] = std::move(cell);
    }
    bindings.push_back(std::move(obj));
  }
  json doc = {{"head", {{"vars", rs.variables}}}, {"results", {{"bindings", bindings}}}};
  return doc.dump();
}

// ---- MockGraph ---------------------------------------------------------

bool MockGraph::add(std::string subject, std::string predicate, Term object) {
  if (object.is_variable()) throw std::invalid_argument("variable stored in MockGraph");
  Triple t{std::move(subject), std::move(predicate), std::move(object)};
  if (!present_.insert(t).second) return false;
  std::size_t index = triples_.size();
  by_subject_[t.subject].push_back(index);
  by_predicate_[t.predicate].push_back(index);
  by_object_[sparql::to_ntriples(t.object)].push_back(index);
  triples_.push_back(std::move(t));
  return true;
}

void MockGraph::add_label(const std::string& iri, const std::string& language,
                          std::string label) {
  labels_[iri][language] = std::move(label);
}

namespace {
const std::vector<std::size_t>* lookup(
    const std::unordered_map<std::string, std::vector<std::size_t>>& index,
    const std::string& key) {
  auto it = index.find(key);
  return it == index.end() ? nullptr : &it->second;
}
}  // namespace

const std::vector<std::size_t>* MockGraph::with_subject(const std::string& iri) const {
  return lookup(by_subject_, iri);
}
const std::vector<std::size_t>* MockGraph::with_predicate(const std::string& iri) const {
  return lookup(by_predicate_, iri);
}
const std::vector<std::size_t>* MockGraph::with_object(const Term& term) const {
  return lookup(by_object_, sparql::to_ntriples(term));
}

const std::map<std::string, std::string>* MockGraph::labels_of(const std::string& iri) const {
  auto it = labels_.find(iri);
  return it == labels_.end() ? nullptr : &it->second;
}

// ---- BGP matching ------------------------------------------------------

namespace {

class BgpMatcher {
 public:
  BgpMatcher(const std::vector<TriplePattern>& patterns, std::vector<std::string>& variables,
             const MockGraph& g)
      : patterns_(patterns), variables_(variables), graph_(g), done_(patterns.size(), false) {
    variables.reserve(3 * patterns.size());
    auto slot = [&](const Term& t) {
      if (!t.is_variable()) return -1;
      for (std::size_t v = 0; v < variables.size(); ++v) {
        if (variables[v] == t.value) return static_cast<int>(v);
      }
      variables.push_back(t.value);
      return static_cast<int>(variables.size()) - 1;
    };
    slots_.reserve(patterns.size());
    for (const auto& p : patterns) {
      int s = slot(p.subject);
      int pr = slot(p.predicate);
      slots_.push_back({s, pr, slot(p.object)});
    }
    values_.resize(variables.size());
  }

  void run(std::vector<Binding>& out) {
    out_ = &out;
    extend(0);
  }

 private:
  // A bound value points either at an IRI string or at a full term, both
  // owned by the graph or the patterns.
  struct Value {
    const std::string* iri = nullptr;
    const Term* term = nullptr;
    bool bound() const { return iri || term; }
    bool is_iri() const { return iri || term->is_iri(); }
    const std::string& text() const { return iri ? *iri : term->value; }
  };

  static bool same(const Value& a, const Value& b) {
    if (a.term && b.term) return *a.term == *b.term;
    if (!a.is_iri() || !b.is_iri()) return false;
    return a.text() == b.text();
  }

  Value position(const Term& t, int slot) const {
    if (slot < 0) return {nullptr, &t};
    return values_[static_cast<std::size_t>(slot)];
  }

  std::size_t bound_count(std::size_t i) const {
    const auto& s = slots_[i];
    return (s[0] < 0 || values_[s[0]].bound()) + (s[1] < 0 || values_[s[1]].bound()) +
           (s[2] < 0 || values_[s[2]].bound());
  }

  // Smallest index list usable for the pattern, or nullptr for a full scan.
  // `impossible` is set when a bound position cannot match anything.
  const std::vector<std::size_t>* candidates(std::size_t i, bool& impossible) const {
    impossible = false;
    if (graph_.size() <= kScanBelow) return nullptr;
    const auto& p = patterns_[i];
    const std::vector<std::size_t>* best = nullptr;
    auto consider = [&](const std::vector<std::size_t>* list) {
      if (!list) {
        impossible = true;
        return;
      }
      if (!best || list->size() < best->size()) best = list;
    };
    Value s = position(p.subject, slots_[i][0]);
    if (s.bound()) {
      if (!s.is_iri()) {
        impossible = true;
        return nullptr;
      }
      consider(graph_.with_subject(s.text()));
    }
    Value pr = position(p.predicate, slots_[i][1]);
    if (pr.bound()) {
      if (!pr.is_iri()) {
        impossible = true;
        return nullptr;
      }
      consider(graph_.with_predicate(pr.text()));
    }
    Value o = position(p.object, slots_[i][2]);
    if (o.bound() && !best && !impossible) {
      consider(o.term ? graph_.with_object(*o.term) : graph_.with_object(Term::iri(*o.iri)));
    }
    return best;
  }

  bool unify(const Term& pattern_term, int slot, Value value, int* newly, int& count) {
    if (slot < 0) return same({nullptr, &pattern_term}, value);
    auto& v = values_[static_cast<std::size_t>(slot)];
    if (v.bound()) return same(v, value);
    v = value;
    newly[count++] = slot;
    return true;
  }

  void try_triple(std::size_t i, const MockGraph::Triple& t, std::size_t depth) {
    const auto& p = patterns_[i];
    int newly[3];
    int count = 0;
    bool ok = unify(p.subject, slots_[i][0], {&t.subject, nullptr}, newly, count) &&
              unify(p.predicate, slots_[i][1], {&t.predicate, nullptr}, newly, count) &&
              unify(p.object, slots_[i][2], {nullptr, &t.object}, newly, count);
    if (ok) extend(depth + 1);
    for (int k = 0; k < count; ++k) values_[static_cast<std::size_t>(newly[k])] = {};
  }

  void emit() {
    Binding b;
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      const auto& value = values_[v];
      b.assignments.emplace(variables_[v], value.term ? *value.term : Term::iri(*value.iri));
    }
    out_->push_back(std::move(b));
  }

  void extend(std::size_t depth) {
    if (depth == patterns_.size()) {
      emit();
      return;
    }
    // Most-bound pattern first; ties keep source order.
    std::size_t next = patterns_.size();
    std::size_t most = 0;
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (done_[i]) continue;
      std::size_t b = bound_count(i);
      if (next == patterns_.size() || b > most) {
        next = i;
        most = b;
      }
    }
    done_[next] = true;
    bool impossible = false;
    const auto* list = candidates(next, impossible);
    if (!impossible) {
      if (list) {
        for (std::size_t index : *list) try_triple(next, graph_.triples()[index], depth);
      } else {
        for (const auto& t : graph_.triples()) try_triple(next, t, depth);
      }
    }
    done_[next] = false;
  }

  // Tiny graphs are scanned; hashing the key costs more than it saves.
  static constexpr std::size_t kScanBelow = 16;

  const std::vector<TriplePattern>& patterns_;
  const std::vector<std::string>& variables_;
  const MockGraph& graph_;
  std::vector<bool> done_;
  std::vector<std::array<int, 3>> slots_;
  std::vector<Value> values_;
  std::vector<Binding>* out_ = nullptr;
};

}  // namespace

ResultSet match_bgp(const std::vector<TriplePattern>& patterns, const MockGraph& g) {
  ResultSet rs;
  if (patterns.empty()) return rs;
  // Variables in first-occurrence order, as pattern_variables gives them.
  BgpMatcher(patterns, rs.variables, g).run(rs.rows);
  canonicalize(rs, std::numeric_limits<std::size_t>::max());
  return rs;
}

// ---- endpoints ---------------------------------------------------------

MockEndpoint::MockEndpoint(std::shared_ptr<const MockGraph> graph, std::string name)
    : graph_(std::move(graph)), name_(std::move(name)) {}

ResultSet MockEndpoint::select(const QueryCandidate& q, std::size_t) const {
  ResultSet rs = match_bgp(q.patterns, *graph_);
  if (!q.projection.all) {
    for (auto& row : rs.rows) {
      std::erase_if(row.assignments, [&](const auto& kv) {
        return std::find(q.projection.variables.begin(), q.projection.variables.end(),
                         kv.first) == q.projection.variables.end();
      });
    }
    rs.variables = q.projection.variables;
  }
  return rs;
}

HttpEndpoint::HttpEndpoint(HttpEndpointConfig config) : config_(std::move(config)) {
  http::split_url(config_.url);
}

ResultSet HttpEndpoint::select(const QueryCandidate& q, std::size_t row_cap) const {
  std::string text = sparql::serialize(q);
  bool has_limit = std::any_of(q.modifiers.begin(), q.modifiers.end(), [](const std::string& m) {
    return m.size() >= 5 && std::equal(m.begin(), m.begin() + 5, "LIMIT",
                                       [](char a, char b) { return std::toupper(static_cast<unsigned char>(a)) == b; });
  });
  if (!has_limit) text += " LIMIT " + std::to_string(row_cap);

  http::Request request;
  request.method = config_.use_post ? "POST" : "GET";
  request.url = config_.url;
  request.timeout_seconds = config_.timeout_seconds;
  request.headers = {{"Accept", "application/sparql-results+json"},
                     {"User-Agent", "kgav/1.0"}};
  if (!config_.bearer_token.empty()) {
    request.headers.emplace_back("Authorization", "Bearer " + config_.bearer_token);
  }
  request.params = {{"query", text}};
  auto response = http::send(request);
  if (response.status >= 400) {
    throw EndpointError(response.status, response.body.substr(0, 200));
  }
  return parse_results_json(response.body);
}

CachedEndpoint::CachedEndpoint(std::shared_ptr<const SparqlEndpoint> inner,
                               std::shared_ptr<const ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

ResultSet CachedEndpoint::select(const QueryCandidate& q, std::size_t row_cap) const {
  std::string key = "select\n" + inner_->describe() + "\n" + std::to_string(row_cap) + "\n" +
                    sparql::serialize(q);
  if (auto hit = cache_->get(key)) {
    try {
      return parse_results_json(*hit);
    } catch (const MalformedResponse&) {
      // Falls through to a refetch.
    }
  }
  ResultSet rs = inner_->select(q, row_cap);
  cache_->put(key, to_results_json(rs));
  return rs;
}

ResultSet execute(const QueryCandidate& q, const SparqlEndpoint& endpoint, std::size_t row_cap) {
  ResultSet rs = endpoint.select(q, row_cap);
  canonicalize(rs, row_cap);
  return rs;
}

// ---- labels ------------------------------------------------------------

std::string to_string(LabelOrigin origin) {
  switch (origin) {
    case LabelOrigin::endpoint_label: return "endpoint-label";
    case LabelOrigin::any_language_label: return "any-language-label";
    case LabelOrigin::uri_fallback: return "uri-fallback";
  }
  return "uri-fallback";
}

namespace {
LabelOrigin origin_from_string(const std::string& s) {
  if (s == "endpoint-label") return LabelOrigin::endpoint_label;
  if (s == "any-language-label") return LabelOrigin::any_language_label;
  if (s == "uri-fallback") return LabelOrigin::uri_fallback;
  throw MalformedResponse("unknown label source " + s);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string uri_fallback_label(const std::string& iri) {
  auto cut = iri.find_last_of("/#");
  std::string segment = cut == std::string::npos ? iri : iri.substr(cut + 1);
  std::string out;
  out.reserve(segment.size());
  for (std::size_t i = 0; i < segment.size(); ++i) {
    char c = segment[i];
    if (c == '_') {
      out += ' ';
    } else if (c == '%' && i + 2 < segment.size() && hex_value(segment[i + 1]) >= 0 &&
               hex_value(segment[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(segment[i + 1]) * 16 + hex_value(segment[i + 2]));
      i += 2;
    } else {
      out += c;
    }
  }
  bool blank = std::all_of(out.begin(), out.end(),
                           [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  return blank ? iri : out;
}

LabelRecord choose_label(const std::string& iri,
                         const std::map<std::string, std::string>* labels,
                         const std::string& preferred_language) {
  if (labels) {
    auto it = labels->find(preferred_language);
    if (it != labels->end() && !it->second.empty()) {
      return {iri, it->second, LabelOrigin::endpoint_label};
    }
    for (const auto& [language, label] : *labels) {
      if (!label.empty()) return {iri, label, LabelOrigin::any_language_label};
    }
  }
  return {iri, uri_fallback_label(iri), LabelOrigin::uri_fallback};
}

LabelRecord resolve_label(const std::string& iri, const std::string& language,
                          const MockGraph& graph) {
  return choose_label(iri, graph.labels_of(iri), language);
}

LabelRecord EndpointLabels::resolve(const std::string& iri, const std::string& language) const {
  QueryCandidate q;
  q.id = "label";
  q.distinct = true;
  q.projection.variables = {"label"};
  q.patterns = {TriplePattern{Term::iri(iri), Term::iri(std::string(sparql::vocab::rdfs_label)),
                              Term::variable("label")}};
  ResultSet rs = execute(q, *endpoint_, kDefaultRowCap);
  std::map<std::string, std::string> labels;
  for (const auto& row : rs.rows) {
    const Term* t = row.find("label");
    if (!t || !t->is_literal() || t->value.empty()) continue;
    labels.emplace(t->language.value_or(""), t->value);
  }
  return choose_label(iri, &labels, language);
}

LabelRecord CachedLabels::resolve(const std::string& iri, const std::string& language) const {
  std::string key = "label\n" + inner_->describe() + "\n" + language + "\n" + iri;
  if (auto hit = cache_->get(key)) {
    try {
      auto j = json::parse(*hit);
      LabelRecord record{j.at("iri").get<std::string>(), j.at("label").get<std::string>(),
                         origin_from_string(j.at("source").get<std::string>())};
      if (!record.label.empty()) return record;
    } catch (const std::exception&) {
      // Refetch below.
    }
  }
  LabelRecord record = inner_->resolve(iri, language);
  json j = {{"iri", record.iri}, {"label", record.label}, {"source", to_string(record.source)}};
  cache_->put(key, j.dump());
  return record;
}

}  // namespace kgav::kg

#pragma once

// Fixtures and independent reference implementations shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "kgav/kg_client.hpp"
#include "kgav/sparql.hpp"
#include "kgav/verbalizer.hpp"

namespace fixtures {

inline const std::string kKennedyQuery =
    "# question: \n"
    "#     What was the cause of death of John Kennedy?\n"
    "# query:\n"
    "PREFIX dbr: <http://dbpedia.org/resource/>\n"
    "PREFIX dbo: <http://dbpedia.org/ontology/>\n"
    "SELECT ?answer WHERE { \n"
    "    dbr:John_F._Kennedy dbo:deathCause ?answer . \n"
    "}\n"
    "# the result is dbr:Assassination_of_John_F._Kennedy\n";

inline const std::string kLeCatQuery =
    "PREFIX wd: <http://www.wikidata.org/entity/>\n"
    "PREFIX wdt: <http://www.wikidata.org/prop/direct/>\n"
    "SELECT DISTINCT ?o2 WHERE {\n"
    "    ?s1  ?p1  wd:Q57747377 .\n"
    "    ?s1  wdt:P21 ?o2 .\n"
    "}  LIMIT 1000\n";

inline const std::string dbr = "http://dbpedia.org/resource/";
inline const std::string dbo = "http://dbpedia.org/ontology/";
inline const std::string wd = "http://www.wikidata.org/entity/";
inline const std::string wdt = "http://www.wikidata.org/prop/direct/";

// Two persons sharing the given name Claude-Nicolas.
inline std::shared_ptr<kgav::kg::MockGraph> le_cat_graph() {
  using kgav::sparql::Term;
  auto g = std::make_shared<kgav::kg::MockGraph>();
  for (const char* s : {"Q16027703", "Q2976815"}) {
    g->add(wd + s, wdt + "P735", Term::iri(wd + "Q57747377"));
    g->add(wd + s, wdt + "P21", Term::iri(wd + "Q6581097"));
  }
  g->add_label(wd + "Q16027703", "en", "Claude-Nicolas Le Cat");
  g->add_label(wd + "Q2976815", "en", "Claude-Nicolas Lebas");
  g->add_label(wd + "Q57747377", "en", "Claude-Nicolas");
  g->add_label(wd + "Q6581097", "en", "male");
  g->add_label(wdt + "P735", "en", "given name");
  g->add_label(wdt + "P21", "en", "sex or gender");
  return g;
}

// The answer resource has no stored label.
inline std::shared_ptr<kgav::kg::MockGraph> kennedy_graph() {
  using kgav::sparql::Term;
  auto g = std::make_shared<kgav::kg::MockGraph>();
  g->add(dbr + "John_F._Kennedy", dbo + "deathCause",
         Term::iri(dbr + "Assassination_of_John_F._Kennedy"));
  g->add_label(dbr + "John_F._Kennedy", "en", "John F. Kennedy");
  g->add_label(dbo + "deathCause", "en", "death cause");
  return g;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("kgav-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace fixtures

namespace oracle {

// Relevant hits among the first k positions, positions past the end count as
// misses.
inline double precision_at_k(const std::vector<bool>& rel, std::size_t k) {
  double hits = 0;
  for (std::size_t pos = 1; pos <= k; ++pos) {
    bool r = pos <= rel.size() && rel[pos - 1];
    if (r) hits += 1;
  }
  return hits / static_cast<double>(k);
}

inline double dcg(const std::vector<int>& gains, std::size_t k) {
  double total = 0;
  for (std::size_t pos = 1; pos <= k && pos <= gains.size(); ++pos) {
    total += gains[pos - 1] / (std::log(static_cast<double>(pos) + 1.0) / std::log(2.0));
  }
  return total;
}

// Ideal list = `ideal_relevant` ones followed by the list's zeros.
inline double ndcg_at_k(const std::vector<bool>& rel, std::size_t k, std::size_t ideal_relevant) {
  std::vector<int> gains(rel.begin(), rel.end());
  std::vector<int> ideal(ideal_relevant, 1);
  double best = dcg(ideal, k);
  if (best == 0) return 0;
  return dcg(gains, k) / best;
}

// Every assignment of the pattern variables to graph terms that grounds all
// patterns into stored triples.
inline std::set<kgav::sparql::Binding> enumerate_bgp(
    const std::vector<kgav::sparql::TriplePattern>& patterns, const kgav::kg::MockGraph& g) {
  using kgav::sparql::Term;
  std::set<Term> universe;
  std::set<std::tuple<Term, Term, Term>> stored;
  for (const auto& t : g.triples()) {
    universe.insert(Term::iri(t.subject));
    universe.insert(Term::iri(t.predicate));
    universe.insert(t.object);
    stored.emplace(Term::iri(t.subject), Term::iri(t.predicate), t.object);
  }
  std::vector<std::string> vars;
  for (const auto& p : patterns) {
    for (const Term* t : {&p.subject, &p.predicate, &p.object}) {
      if (t->is_variable() && std::find(vars.begin(), vars.end(), t->value) == vars.end()) {
        vars.push_back(t->value);
      }
    }
  }
  std::vector<Term> terms(universe.begin(), universe.end());
  std::set<kgav::sparql::Binding> out;
  if (terms.empty() || patterns.empty()) return out;
  std::vector<std::size_t> choice(vars.size(), 0);
  while (true) {
    kgav::sparql::Binding b;
    for (std::size_t i = 0; i < vars.size(); ++i) b.assignments[vars[i]] = terms[choice[i]];
    auto value = [&](const Term& t) { return t.is_variable() ? b.assignments.at(t.value) : t; };
    bool ok = true;
    for (const auto& p : patterns) {
      if (!stored.contains({value(p.subject), value(p.predicate), value(p.object)})) {
        ok = false;
        break;
      }
    }
    if (ok) out.insert(b);
    std::size_t i = 0;
    while (i < choice.size() && ++choice[i] == terms.size()) choice[i++] = 0;
    if (i == choice.size()) break;
  }
  return out;
}

}  // namespace oracle

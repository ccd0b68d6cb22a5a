#include <doctest.h>

#include "kgav/error.hpp"
#include "kgav/verbalizer.hpp"
#include "support.hpp"

using namespace kgav;
using namespace kgav::verbalizer;
using fixtures::wd;
using fixtures::wdt;

namespace {

sparql::Binding le_cat_row() {
  sparql::Binding b;
  b.set("s1", sparql::Term::iri(wd + "Q16027703"));
  b.set("p1", sparql::Term::iri(wdt + "P735"));
  b.set("o2", sparql::Term::iri(wd + "Q6581097"));
  return b;
}

sparql::QueryCandidate le_cat_query() {
  return sparql::rewrite_select_all(sparql::strip_unsupported(sparql::parse_query(fixtures::kLeCatQuery)));
}

sparql::QueryCandidate kennedy_query() { return sparql::parse_query(fixtures::kKennedyQuery); }

sparql::Binding kennedy_row() {
  sparql::Binding b;
  b.set("answer", sparql::Term::iri(fixtures::dbr + "Assassination_of_John_F._Kennedy"));
  return b;
}

}  // namespace

TEST_CASE("nlg golden for the le cat row") {
  kg::MockLabels source(fixtures::le_cat_graph());
  auto labels = make_label_lookup(source);
  auto text = verbalize(Mode::nlg, le_cat_query(), le_cat_row(), labels);
  CHECK(text.text ==
        "Claude-Nicolas Le Cat is given name Claude-Nicolas and Claude-Nicolas Le Cat's sex or gender is male.");
  CHECK(text.mode == Mode::nlg);
}

TEST_CASE("bag-of-labels golden for the kennedy query") {
  kg::MockLabels source(fixtures::kennedy_graph());
  auto labels = make_label_lookup(source);
  auto text = verbalize(Mode::bag_of_labels, kennedy_query(), kennedy_row(), labels);
  CHECK(text.text == "John F. Kennedy death cause Assassination of John F. Kennedy");
}

TEST_CASE("nlg for the kennedy query uses the possessive template") {
  kg::MockLabels source(fixtures::kennedy_graph());
  auto labels = make_label_lookup(source);
  CHECK(verbalize(Mode::nlg, kennedy_query(), kennedy_row(), labels).text ==
        "John F. Kennedy's death cause is Assassination of John F. Kennedy.");
}

TEST_CASE("bag-of-labels for the le cat row keeps first occurrences only") {
  kg::MockLabels source(fixtures::le_cat_graph());
  auto labels = make_label_lookup(source);
  CHECK(verbalize(Mode::bag_of_labels, le_cat_query(), le_cat_row(), labels).text ==
        "Claude-Nicolas Le Cat given name Claude-Nicolas sex or gender male");
}

TEST_CASE("single clauses") {
  CHECK(render_clause("Claude-Nicolas Le Cat", "given name", "Claude-Nicolas") ==
        "Claude-Nicolas Le Cat is given name Claude-Nicolas");
  CHECK(render_clause("Claude-Nicolas Le Cat", "sex or gender", "male") ==
        "Claude-Nicolas Le Cat's sex or gender is male");
  CHECK(render_clause("A", "Given Name", "B") == "A is Given Name B");
  TemplateTable none;
  none.copula_predicates.clear();
  CHECK(render_clause("A", "given name", "B", none) == "A's given name is B");
}

TEST_CASE("literals render as their lexical form") {
  auto lookup = [](const std::string& iri) { return kg::uri_fallback_label(iri); };
  CHECK(term_label(sparql::Term::literal("1900-01-01", std::nullopt, "http://www.w3.org/2001/XMLSchema#date"), lookup) ==
        "1900-01-01");
  CHECK(term_label(sparql::Term::literal("Paris", std::string("fr")), lookup) == "Paris");
  CHECK(term_label(sparql::Term::iri("http://ex.org/New_York"), lookup) == "New York");
}

TEST_CASE("unbound variables are reported") {
  kg::MockLabels source(fixtures::le_cat_graph());
  auto labels = make_label_lookup(source);
  sparql::Binding partial;
  partial.set("s1", sparql::Term::iri(wd + "Q16027703"));
  CHECK_THROWS_AS(verbalize(Mode::nlg, le_cat_query(), partial, labels), UnboundVariable);
}

TEST_CASE("verbalize_all honours the row cap") {
  auto graph = fixtures::le_cat_graph();
  kg::MockEndpoint endpoint(graph);
  kg::MockLabels source(graph);
  auto labels = make_label_lookup(source);
  auto q = le_cat_query();
  auto rs = kg::execute(q, endpoint);
  REQUIRE(rs.rows.size() == 2);
  CHECK(verbalize_all(q, rs, Mode::nlg, labels, 1).size() == 1);
  auto both = verbalize_all(q, rs, Mode::nlg, labels, 10);
  REQUIRE(both.size() == 2);
  CHECK(both[0].binding_index == 0);
  CHECK(both[1].binding_index == 1);
  CHECK(verbalize_all(q, kg::ResultSet{}, Mode::nlg, labels, 10).empty());
}

TEST_CASE("modes parse and print") {
  CHECK(mode_from_string("A2") == Mode::nlg);
  CHECK(mode_from_string("bag-of-labels") == Mode::bag_of_labels);
  CHECK(mode_from_string("a3") == Mode::bag_of_labels);
  CHECK(to_string(Mode::bag_of_labels) == "bag-of-labels");
  CHECK_THROWS_AS(mode_from_string("a1"), ConfigError);
}

TEST_CASE("single_line collapses whitespace") {
  CHECK(single_line("  a\n\tb   c \r\n") == "a b c");
  CHECK(single_line("") == "");
}

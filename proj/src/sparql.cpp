#include "kgav/sparql.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <stdexcept>

#include "kgav/error.hpp"

namespace kgav::sparql {

Term Term::iri(std::string value) {
  return Term{TermKind::iri, std::move(value), std::nullopt, std::nullopt};
}

Term Term::variable(std::string name) {
  return Term{TermKind::variable, std::move(name), std::nullopt, std::nullopt};
}

Term Term::literal(std::string lexical, std::optional<std::string> language,
                   std::optional<std::string> datatype) {
  return Term{TermKind::literal, std::move(lexical), std::move(language),
              std::move(datatype)};
}

namespace {

std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_word_char(int c) {
  return c >= 0 && (std::isalnum(c) || c == '_');
}

bool is_var_char(int c) { return is_word_char(c); }

bool is_name_char(int c) {
  // ASCII name characters plus any non-ASCII byte (UTF-8 continuation).
  return c >= 0x80 || (c >= 0 && (std::isalnum(c) || c == '_' || c == '-' || c == '.'));
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

constexpr std::array<std::string_view, 5> kSolutionModifiers = {
    "GROUP", "ORDER", "HAVING", "LIMIT", "OFFSET"};

constexpr std::array<std::string_view, 7> kUnsupportedGroupKeywords = {
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES"};

bool contains(auto const& list, std::string_view word) {
  return std::find(list.begin(), list.end(), word) != list.end();
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : text_(text), options_(options) {}

  QueryCandidate run() {
    q_.raw_text = std::string(text_);
    parse_prologue();
    parse_select_clause();
    std::size_t close = parse_group();
    parse_solution_modifiers();
    if (q_.patterns.empty()) fail_at(close, "empty pattern block");
    if (!q_.projection.all) {
      auto vars = pattern_variables(q_.patterns);
      for (const auto& v : q_.projection.variables) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
          fail_at(select_offset_, "projected variable ?" + v +
                                      " does not occur in the pattern");
        }
      }
    }
    return std::move(q_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t offset, const std::string& msg) const {
    throw ParseError(offset, msg);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  int peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size()
               ? static_cast<unsigned char>(text_[pos_ + ahead])
               : -1;
  }

  void skip_ws() {
    while (!at_end()) {
      int c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string peek_word() const {
    std::size_t end = pos_;
    while (end < text_.size() &&
           is_word_char(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    return upper(text_.substr(pos_, end - pos_));
  }

  // The keyword must not continue as a prefixed name (`limit:x`).
  bool at_keyword(std::string_view kw) const {
    if (peek_word() != kw) return false;
    return peek(kw.size()) != ':';
  }

  void expect_keyword(std::string_view kw) {
    skip_ws();
    if (!at_keyword(kw)) fail("expected " + std::string(kw));
    pos_ += kw.size();
  }

  // ---- prologue ---------------------------------------------------------

  void parse_prologue() {
    for (;;) {
      skip_ws();
      if (at_keyword("PREFIX")) {
        pos_ += 6;
        skip_ws();
        std::string name = read_prefix_name();
        if (peek() != ':') fail("expected ':' in PREFIX declaration");
        ++pos_;
        skip_ws();
        if (peek() != '<') fail("expected IRI in PREFIX declaration");
        q_.prefixes[name] = read_iriref();
        declared_.insert(name);
      } else if (at_keyword("BASE")) {
        pos_ += 4;
        skip_ws();
        if (peek() != '<') fail("expected IRI in BASE declaration");
        base_ = read_iriref();
      } else {
        return;
      }
    }
  }

  std::string read_prefix_name() {
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (!name.empty() && (name.front() == '.' || name.back() == '.' ||
                          name.front() == '-' || std::isdigit(static_cast<unsigned char>(name.front())))) {
      fail_at(start, "invalid prefix name '" + name + "'");
    }
    return name;
  }

  std::string read_iriref() {
    std::size_t start = pos_;
    ++pos_;  // '<'
    std::string iri;
    for (;;) {
      if (at_end()) fail_at(start, "unterminated IRI");
      int c = peek();
      if (c == '>') break;
      if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`' || c == '\\') {
        fail("invalid character in IRI");
      }
      iri += static_cast<char>(c);
      ++pos_;
    }
    ++pos_;  // '>'
    if (iri.find("://") == std::string::npos) {
      if (!base_.empty()) {
        iri = base_ + iri;
      } else {
        fail_at(start, "IRI <" + iri + "> is not absolute");
      }
    }
    return iri;
  }

  // ---- SELECT clause ------------------------------------------------------

  void parse_select_clause() {
    skip_ws();
    select_offset_ = pos_;
    if (at_keyword("ASK") || at_keyword("CONSTRUCT") || at_keyword("DESCRIBE")) {
      fail("only SELECT queries are supported");
    }
    expect_keyword("SELECT");
    skip_ws();
    if (at_keyword("DISTINCT")) {
      pos_ += 8;
      q_.distinct = true;
    } else if (at_keyword("REDUCED")) {
      pos_ += 7;
    }
    bool any = false;
    for (;;) {
      skip_ws();
      if (at_end()) fail("missing WHERE");
      int c = peek();
      if (c == '*') {
        ++pos_;
        q_.projection.all = true;
        any = true;
      } else if (c == '?' || c == '$') {
        ++pos_;
        std::string name = read_var_name();
        if (std::find(q_.projection.variables.begin(), q_.projection.variables.end(),
                      name) == q_.projection.variables.end()) {
          q_.projection.variables.push_back(name);
        }
        any = true;
      } else if (c == '(') {
        std::size_t start = pos_;
        skip_balanced();
        q_.modifiers.emplace_back(text_.substr(start, pos_ - start));
        any = true;
      } else if (at_keyword("WHERE")) {
        break;
      } else if (c == '{') {
        fail("missing WHERE");
      } else if (at_keyword("FROM")) {
        fail("FROM clauses are not supported");
      } else {
        fail("unexpected token in SELECT clause");
      }
    }
    if (!any) fail("empty projection");
    if (q_.projection.all) q_.projection.variables.clear();
    pos_ += 5;  // WHERE
  }

  std::string read_var_name() {
    std::size_t start = pos_;
    while (!at_end() && is_var_char(peek())) ++pos_;
    if (pos_ == start) fail("empty variable name");
    return std::string(text_.substr(start, pos_ - start));
  }

  // Consumes a parenthesised expression, honouring string literals.
  void skip_balanced() {
    std::size_t start = pos_;
    int depth = 0;
    do {
      if (at_end()) fail_at(start, "unbalanced parentheses");
      int c = peek();
      if (c == '"' || c == '\'') {
        skip_string();
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')') --depth;
      ++pos_;
    } while (depth > 0);
  }

  void skip_string() {
    std::size_t start = pos_;
    int quote = peek();
    bool triple = peek(1) == quote && peek(2) == quote;
    pos_ += triple ? 3 : 1;
    for (;;) {
      if (at_end()) fail_at(start, "unterminated string literal");
      int c = peek();
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          return;
        }
        if (peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          return;
        }
      }
      if (!triple && (c == '\n' || c == '\r')) fail("newline in string literal");
      ++pos_;
    }
  }

  // ---- group graph pattern ---------------------------------------------

  std::size_t parse_group() {
    skip_ws();
    if (peek() != '{') fail("expected '{' after WHERE");
    std::size_t open = pos_;
    ++pos_;
    for (;;) {
      skip_ws();
      if (at_end()) fail_at(open, "unbalanced braces: missing '}'");
      int c = peek();
      if (c == '}') {
        std::size_t close = pos_;
        ++pos_;
        return close;
      }
      if (c == '{') fail("nested group patterns are not supported");
      if (c == '.') fail("unexpected '.'");
      if (at_keyword("FILTER")) {
        capture_filter();
        continue;
      }
      auto word = peek_word();
      if (contains(kUnsupportedGroupKeywords, word) && peek(word.size()) != ':') {
        fail(word + " is not supported");
      }
      parse_triples_block();
    }
  }

  void capture_filter() {
    std::size_t start = pos_;
    pos_ += 6;
    skip_ws();
    if (peek() != '(') {
      // Built-in or IRI function call: FILTER regex(...)
      while (!at_end() && (is_name_char(peek()) || peek() == ':')) ++pos_;
      skip_ws();
      if (peek() != '(') fail("expected '(' in FILTER");
    }
    skip_balanced();
    q_.modifiers.emplace_back(text_.substr(start, pos_ - start));
  }

  void parse_triples_block() {
    Term subject = parse_term();
    if (subject.is_literal()) fail("literal in subject position");
    for (;;) {
      skip_ws();
      Term predicate = parse_verb();
      for (;;) {
        skip_ws();
        Term object = parse_term();
        q_.patterns.push_back(TriplePattern{subject, predicate, object});
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
      skip_ws();
      if (peek() != ';') break;
      while (peek() == ';') {
        ++pos_;
        skip_ws();
      }
      if (peek() == '.' || peek() == '}') break;
    }
    skip_ws();
    if (peek() == '.') {
      ++pos_;
    } else if (peek() != '}' && !at_keyword("FILTER")) {
      fail("expected '.' or '}' after triple");
    }
  }

  Term parse_verb() {
    if (peek() == 'a' && !is_name_char(peek(1)) && peek(1) != ':') {
      ++pos_;
      return Term::iri(std::string(vocab::rdf_type));
    }
    Term t = parse_term();
    if (t.is_literal()) fail("literal in predicate position");
    return t;
  }

  Term parse_term() {
    if (at_end()) fail("unexpected end of input");
    int c = peek();
    if (c == '?' || c == '$') {
      ++pos_;
      return Term::variable(read_var_name());
    }
    if (c == '<') return Term::iri(read_iriref());
    if (c == '"' || c == '\'') return parse_string_literal();
    if (std::isdigit(c) || ((c == '+' || c == '-' || c == '.') &&
                            peek(1) >= 0 && std::isdigit(peek(1)))) {
      return parse_numeric_literal();
    }
    if (c == '[' || (c == '_' && peek(1) == ':')) fail("blank nodes are not supported");
    if (c == '(') fail("collections are not supported");
    auto word = peek_word();
    if ((word == "TRUE" || word == "FALSE") && peek(word.size()) != ':') {
      std::string lex = word == "TRUE" ? "true" : "false";
      pos_ += word.size();
      return Term::literal(lex, std::nullopt, std::string(vocab::xsd) + "boolean");
    }
    return parse_prefixed_name();
  }

  Term parse_prefixed_name() {
    std::size_t start = pos_;
    std::string prefix = read_prefix_name();
    if (peek() != ':') fail_at(start, "unexpected token");
    ++pos_;
    std::size_t local_start = pos_;
    while (!at_end()) {
      int c = peek();
      if (is_name_char(c) || c == ':') {
        ++pos_;
      } else if (c == '%' && peek(1) >= 0 && std::isxdigit(peek(1)) && peek(2) >= 0 &&
                 std::isxdigit(peek(2))) {
        pos_ += 3;
      } else if (c == '\\' && peek(1) > 0x20) {
        pos_ += 2;
      } else {
        break;
      }
    }
    // A local name never ends with '.': that dot terminates the triple.
    while (pos_ > local_start && text_[pos_ - 1] == '.') --pos_;
    std::string local;
    for (std::size_t i = local_start; i < pos_; ++i) {
      if (text_[i] == '\\') ++i;
      local += text_[i];
    }
    auto it = q_.prefixes.find(prefix);
    if (it == q_.prefixes.end()) {
      auto pre = options_.predeclared.find(prefix);
      if (pre == options_.predeclared.end()) {
        fail_at(start, "undeclared prefix '" + prefix + ":'");
      }
      it = q_.prefixes.emplace(prefix, pre->second).first;
    }
    std::string iri = it->second + local;
    if (iri.find("://") == std::string::npos) fail_at(start, "IRI is not absolute");
    return Term::iri(std::move(iri));
  }

  Term parse_string_literal() {
    std::size_t start = pos_;
    int quote = peek();
    bool triple = peek(1) == quote && peek(2) == quote;
    pos_ += triple ? 3 : 1;
    std::string lex;
    for (;;) {
      if (at_end()) fail_at(start, "unterminated string literal");
      int c = peek();
      if (c == quote && (!triple || (peek(1) == quote && peek(2) == quote))) {
        pos_ += triple ? 3 : 1;
        break;
      }
      if (!triple && (c == '\n' || c == '\r')) fail("newline in string literal");
      if (c == '\\') {
        int e = peek(1);
        pos_ += 2;
        switch (e) {
          case 't': lex += '\t'; break;
          case 'n': lex += '\n'; break;
          case 'r': lex += '\r'; break;
          case 'b': lex += '\b'; break;
          case 'f': lex += '\f'; break;
          case '"': lex += '"'; break;
          case '\'': lex += '\''; break;
          case '\\': lex += '\\'; break;
          case 'u':
          case 'U': {
            std::size_t n = e == 'u' ? 4 : 8;
            std::uint32_t cp = 0;
            for (std::size_t i = 0; i < n; ++i) {
              int h = peek();
              if (h < 0 || !std::isxdigit(h)) fail("invalid unicode escape");
              cp = cp * 16 + static_cast<std::uint32_t>(
                                 std::isdigit(h) ? h - '0' : std::tolower(h) - 'a' + 10);
              ++pos_;
            }
            if (cp > 0x10FFFF) fail("invalid unicode escape");
            append_utf8(lex, cp);
            break;
          }
          default:
            fail("invalid escape sequence");
        }
        continue;
      }
      lex += static_cast<char>(c);
      ++pos_;
    }
    if (peek() == '@') {
      ++pos_;
      std::size_t tag_start = pos_;
      while (!at_end() && (std::isalnum(peek()) || peek() == '-')) ++pos_;
      if (pos_ == tag_start) fail("empty language tag");
      return Term::literal(std::move(lex), std::string(text_.substr(tag_start, pos_ - tag_start)));
    }
    if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      if (at_end()) fail("missing datatype");
      Term dt = peek() == '<' ? Term::iri(read_iriref()) : parse_prefixed_name();
      return Term::literal(std::move(lex), std::nullopt, dt.value);
    }
    return Term::literal(std::move(lex));
  }

  Term parse_numeric_literal() {
    std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    bool dot = false, exp = false;
    while (!at_end() && std::isdigit(peek())) ++pos_;
    if (peek() == '.' && peek(1) >= 0 && std::isdigit(peek(1))) {
      dot = true;
      ++pos_;
      while (!at_end() && std::isdigit(peek())) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (peek() >= 0 && std::isdigit(peek())) {
        exp = true;
        while (!at_end() && std::isdigit(peek())) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string type = exp ? "double" : dot ? "decimal" : "integer";
    return Term::literal(std::string(text_.substr(start, pos_ - start)), std::nullopt,
                         std::string(vocab::xsd) + type);
  }

  // ---- solution modifiers ------------------------------------------------

  void parse_solution_modifiers() {
    for (;;) {
      skip_ws();
      if (at_end()) return;
      auto word = peek_word();
      if (contains(kSolutionModifiers, word)) {
        capture_modifier(word);
      } else if (peek() == '}') {
        fail("unbalanced braces: unexpected '}'");
      } else {
        fail("unexpected content after pattern block");
      }
    }
  }

  void capture_modifier(const std::string& keyword) {
    std::size_t start = pos_;
    pos_ += keyword.size();
    std::size_t end = pos_;
    if (keyword == "LIMIT" || keyword == "OFFSET") {
      skip_ws();
      std::size_t digits = pos_;
      while (!at_end() && std::isdigit(peek())) ++pos_;
      if (pos_ == digits) fail(keyword + " requires an integer");
      end = pos_;
    } else {
      for (;;) {
        skip_ws();
        if (at_end()) break;
        int c = peek();
        if (c == '{' || c == '}') break;
        auto word = peek_word();
        if (!word.empty() && contains(kSolutionModifiers, word)) break;
        if (c == '(') {
          skip_balanced();
        } else if (c == '"' || c == '\'') {
          skip_string();
        } else if (c == ')') {
          fail("unbalanced parentheses");
        } else {
          while (!at_end() && !std::isspace(peek()) && peek() != '(' && peek() != '{' &&
                 peek() != '}' && peek() != '#') {
            ++pos_;
          }
        }
        end = pos_;
      }
      if (end == start + keyword.size()) fail(keyword + " clause is empty");
    }
    q_.modifiers.emplace_back(text_.substr(start, end - start));
  }

  std::string_view text_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
  std::size_t select_offset_ = 0;
  std::string base_;
  std::set<std::string> declared_;
  QueryCandidate q_;
};

std::string leading_keyword(std::string_view modifier) {
  std::size_t i = 0;
  while (i < modifier.size() &&
         (modifier[i] == '(' || std::isspace(static_cast<unsigned char>(modifier[i])))) {
    ++i;
  }
  std::size_t j = i;
  while (j < modifier.size() && is_word_char(static_cast<unsigned char>(modifier[j]))) ++j;
  return upper(modifier.substr(i, j - i));
}

bool local_name_is_safe(std::string_view local) {
  if (local.empty()) return true;
  if (local.front() == '-' || local.front() == '.' || local.back() == '.') return false;
  return std::all_of(local.begin(), local.end(), [](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

std::string render_term(const Term& t, const std::map<std::string, std::string>& prefixes) {
  if (t.is_iri()) {
    const std::string* best_prefix = nullptr;
    std::size_t best_len = 0;
    for (const auto& [name, base] : prefixes) {
      if (base.size() > best_len && t.value.starts_with(base) &&
          local_name_is_safe(std::string_view(t.value).substr(base.size()))) {
        best_prefix = &name;
        best_len = base.size();
      }
    }
    if (best_prefix) return *best_prefix + ":" + t.value.substr(best_len);
  }
  return to_ntriples(t);
}

}  // namespace

std::string to_ntriples(const Term& term) {
  switch (term.kind) {
    case TermKind::iri:
      return "<" + term.value + ">";
    case TermKind::variable:
      return "?" + term.value;
    case TermKind::literal: {
      std::string out = "\"" + escape_literal(term.value) + "\"";
      if (term.language) {
        out += "@" + *term.language;
      } else if (term.datatype) {
        out += "^^<" + *term.datatype + ">";
      }
      return out;
    }
  }
  return {};
}

bool structurally_equal(const QueryCandidate& a, const QueryCandidate& b) {
  return a.projection == b.projection && a.distinct == b.distinct &&
         a.patterns == b.patterns && a.modifiers == b.modifiers && a.prefixes == b.prefixes;
}

void Binding::set(const std::string& variable, Term value) {
  if (value.is_variable()) {
    throw std::invalid_argument("binding for ?" + variable + " is a variable");
  }
  assignments.insert_or_assign(variable, std::move(value));
}

const Term* Binding::find(const std::string& variable) const {
  auto it = assignments.find(variable);
  return it == assignments.end() ? nullptr : &it->second;
}

QueryCandidate parse_query(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).run();
}

bool is_unsupported_modifier(std::string_view modifier) {
  static const std::set<std::string, std::less<>> kinds = {
      "COUNT", "MAX",   "MIN",    "SUM",   "AVG",    "SAMPLE", "GROUP_CONCAT",
      "FILTER", "LIMIT", "OFFSET", "ORDER", "GROUP", "HAVING"};
  return kinds.contains(leading_keyword(modifier));
}

QueryCandidate strip_unsupported(const QueryCandidate& q) {
  QueryCandidate out = q;
  std::erase_if(out.modifiers, [](const std::string& m) { return is_unsupported_modifier(m); });
  if (!out.projection.all && out.projection.variables.empty() &&
      std::none_of(out.modifiers.begin(), out.modifiers.end(),
                   [](const std::string& m) { return m.starts_with('('); })) {
    out.projection = Projection::star();
  }
  return out;
}

QueryCandidate rewrite_select_all(const QueryCandidate& q) {
  QueryCandidate out = q;
  out.projection = Projection::star();
  out.distinct = true;
  return out;
}

std::string serialize(const QueryCandidate& q) {
  std::string out;
  for (const auto& [name, base] : q.prefixes) {
    out += "PREFIX " + name + ": <" + base + ">\n";
  }
  out += "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  if (q.projection.all) {
    out += "* ";
  } else {
    for (const auto& v : q.projection.variables) out += "?" + v + " ";
  }
  for (const auto& m : q.modifiers) {
    if (m.starts_with('(')) out += m + " ";
  }
  out += "WHERE {\n";
  for (const auto& p : q.patterns) {
    out += "  " + render_term(p.subject, q.prefixes) + " " +
           render_term(p.predicate, q.prefixes) + " " + render_term(p.object, q.prefixes) +
           " .\n";
  }
  for (const auto& m : q.modifiers) {
    if (leading_keyword(m) == "FILTER" && !m.starts_with('(')) out += "  " + m + "\n";
  }
  out += "}";
  for (const auto& m : q.modifiers) {
    if (!m.starts_with('(') && leading_keyword(m) != "FILTER") out += " " + m;
  }
  return out;
}

std::vector<std::string> pattern_variables(const std::vector<TriplePattern>& patterns) {
  std::vector<std::string> vars;
  vars.reserve(3 * patterns.size());
  auto note = [&](const Term& t) {
    if (t.is_variable() && std::find(vars.begin(), vars.end(), t.value) == vars.end()) {
      vars.push_back(t.value);
    }
  };
  for (const auto& p : patterns) {
    note(p.subject);
    note(p.predicate);
    note(p.object);
  }
  return vars;
}

std::vector<GroundedTriple> ground_patterns(const QueryCandidate& q, const Binding& b) {
  auto substitute = [&](const Term& t) -> Term {
    if (!t.is_variable()) return t;
    const Term* value = b.find(t.value);
    if (!value) throw UnboundVariable(t.value);
    return *value;
  };
  std::vector<GroundedTriple> out;
  out.reserve(q.patterns.size());
  for (const auto& p : q.patterns) {
    out.push_back(GroundedTriple{substitute(p.subject), substitute(p.predicate),
                                 substitute(p.object)});
  }
  return out;
}

}  // namespace kgav::sparql

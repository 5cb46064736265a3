// Copyright 2026 The Medico Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "medico/store/sparql.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::sparql {
namespace {

enum class TokenKind { kIriRef, kPname, kVar, kString, kInteger, kWord, kPunct, kEnd };

struct Token {
  Token(TokenKind k, std::string t, std::size_t p)
      : kind(k), text(std::move(t)), pos(p) {}

  TokenKind kind;
  std::string text;  // IRI body, pname, variable name, literal value, word
  std::size_t pos = 0;
  char punct = 0;
  std::string datatype;  // kString only; raw IRI or pname
  bool datatype_is_pname = false;
};

bool IsNameStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}
bool IsLocalChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || c == '%';
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

const std::set<std::string>& UnsupportedKeywords() {
  static const std::set<std::string> words = {
      "OPTIONAL", "UNION",  "MINUS",   "GRAPH",  "SERVICE",  "BIND",
      "VALUES",   "ORDER",  "GROUP",   "HAVING", "OFFSET",   "CONSTRUCT",
      "ASK",      "DESCRIBE", "FROM",  "NAMED",  "BASE",     "INSERT",
      "DELETE",   "LOAD",   "CLEAR",   "DROP",   "CREATE",   "WITH",
      "EXISTS",   "NOT",    "REGEX",   "STR",    "LANG",     "BOUND",
      "CONTAINS", "COUNT",  "SUM",     "MIN",    "MAX",      "AVG",
      "AS",       "IN",     "SAMPLE",  "LANGMATCHES", "DATATYPE", "ISIRI",
      "ISLITERAL", "SAMETERM", "STRSTARTS", "STRENDS", "COALESCE", "IF",
  };
  return words;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> Run() {
    std::vector<Token> tokens;
    while (true) {
      SkipSpaceAndComments();
      if (pos_ >= text_.size()) {
        tokens.emplace_back(TokenKind::kEnd, "", pos_);
        return tokens;
      }
      tokens.push_back(Next());
    }
  }

 private:
  [[noreturn]] void Fail(std::size_t pos, const std::string& reason) const {
    throw ParseError(0, pos, reason);
  }

  void SkipSpaceAndComments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string ReadPnameFrom(std::size_t start) {
    // text_[pos_] == ':'
    ++pos_;
    std::size_t local_start = pos_;
    while (pos_ < text_.size() && IsLocalChar(text_[pos_])) ++pos_;
    while (pos_ > local_start && text_[pos_ - 1] == '.') --pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Token Next() {
    std::size_t start = pos_;
    char c = text_[pos_];

    if (c == '<') {
      std::size_t end = pos_ + 1;
      while (end < text_.size() && text_[end] != '>' &&
             !std::isspace(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      if (end < text_.size() && text_[end] == '>') {
        std::string iri(text_.substr(pos_ + 1, end - pos_ - 1));
        if (!Term::IsValidIri(iri)) Fail(start, "invalid IRI '" + iri + "'");
        pos_ = end + 1;
        return Token(TokenKind::kIriRef, iri, start);
      }
      throw UnsupportedFeatureError("FILTER operator <");
    }
    if (c == '?' || c == '$') {
      ++pos_;
      std::size_t name_start = pos_;
      while (pos_ < text_.size() && IsNameChar(text_[pos_])) ++pos_;
      if (pos_ == name_start) {
        if (c == '?') throw UnsupportedFeatureError("property path ?");
        Fail(start, "empty variable name");
      }
      return Token(TokenKind::kVar, std::string(text_.substr(name_start, pos_ - name_start)), start);
    }
    if (c == '"' || c == '\'') return ReadString(c);
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        throw UnsupportedFeatureError("decimal literal");
      }
      return Token(TokenKind::kInteger, std::string(text_.substr(start, pos_ - start)), start);
    }
    if (IsNameStart(c)) {
      while (pos_ < text_.size() && IsNameChar(text_[pos_])) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == ':') {
        return Token(TokenKind::kPname, ReadPnameFrom(start), start);
      }
      return Token(TokenKind::kWord, std::string(text_.substr(start, pos_ - start)), start);
    }
    if (c == ':') {
      return Token(TokenKind::kPname, ReadPnameFrom(start), start);
    }
    switch (c) {
      case '{': case '}': case '.': case '(': case ')': case '=': case '*':
      case ',': case ';': case '/': case '|': case '^': case '+': case '!':
      case '&': case '>': case '[': case ']': case '@': {
        ++pos_;
        Token t{TokenKind::kPunct, std::string(1, c), start};
        t.punct = c;
        return t;
      }
      default:
        Fail(start, std::string("unexpected character '") + c + "'");
    }
  }

  Token ReadString(char quote) {
    std::size_t start = pos_;
    ++pos_;
    std::string value;
    while (true) {
      if (pos_ >= text_.size()) Fail(start, "unterminated string literal");
      char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\n') Fail(start, "newline in string literal");
      if (c == '\\') {
        if (pos_ >= text_.size()) Fail(start, "unterminated escape");
        char e = text_[pos_++];
        switch (e) {
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 'r': value += '\r'; break;
          case 't': value += '\t'; break;
          default: Fail(pos_ - 2, std::string("unknown escape \\") + e);
        }
      } else {
        value += c;
      }
    }
    Token t{TokenKind::kString, value, start};
    if (pos_ < text_.size() && text_[pos_] == '@') {
      throw UnsupportedFeatureError("language tag");
    }
    if (text_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (pos_ < text_.size() && text_[pos_] == '<') {
        std::size_t end = text_.find('>', pos_);
        if (end == std::string_view::npos) Fail(pos_, "unterminated datatype IRI");
        t.datatype = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
      } else {
        std::size_t pstart = pos_;
        while (pos_ < text_.size() && IsNameChar(text_[pos_])) ++pos_;
        if (pos_ >= text_.size() || text_[pos_] != ':') Fail(pstart, "expected datatype IRI");
        t.datatype = ReadPnameFrom(pstart);
        t.datatype_is_pname = true;
      }
    }
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
    prefixes_ = DefaultPrefixes();
  }

  Query Run() {
    Query q;
    while (IsWord("PREFIX")) ParsePrefix();
    if (IsWord("BASE")) throw UnsupportedFeatureError("BASE");
    if (!IsWord("SELECT")) {
      RejectUnsupportedWord();
      Fail("expected SELECT");
    }
    Advance();
    if (IsWord("DISTINCT") || IsWord("REDUCED")) Advance();

    std::vector<std::pair<std::string, std::size_t>> selected;
    if (IsPunct('*')) {
      q.select_all = true;
      Advance();
    } else {
      while (Cur().kind == TokenKind::kVar) {
        selected.emplace_back(Cur().text, Cur().pos);
        Advance();
      }
      if (IsPunct('(')) throw UnsupportedFeatureError("SELECT expression");
      if (selected.empty()) Fail("expected variable list or '*' after SELECT");
    }
    if (IsWord("FROM")) throw UnsupportedFeatureError("FROM");
    if (IsWord("WHERE")) Advance();
    Expect('{', "expected '{' to open WHERE clause");
    std::size_t group_pos = Cur().pos;
    ParseGroup(q);
    Expect('}', "expected '}' to close WHERE clause");
    if (q.patterns.empty()) throw ParseError(0, group_pos, "WHERE clause has no triple patterns");

    if (IsWord("LIMIT")) {
      Advance();
      if (Cur().kind != TokenKind::kInteger) Fail("expected integer after LIMIT");
      std::size_t n = 0;
      try {
        n = std::stoull(Cur().text);
      } catch (const std::exception&) {
        Fail("LIMIT out of range");
      }
      if (n == 0) Fail("LIMIT must be positive");
      q.limit = n;
      Advance();
    }
    if (Cur().kind != TokenKind::kEnd) {
      RejectUnsupportedWord();
      Fail("unexpected token '" + Cur().text + "'");
    }

    // Variables in order of first appearance.
    std::vector<std::string> pattern_vars;
    auto note = [&](const PatternTerm& t) {
      if (auto* v = std::get_if<Variable>(&t)) {
        if (std::find(pattern_vars.begin(), pattern_vars.end(), v->name) ==
            pattern_vars.end()) {
          pattern_vars.push_back(v->name);
        }
      }
    };
    for (const TriplePattern& p : q.patterns) {
      note(p.subject);
      note(p.predicate);
      note(p.object);
    }
    auto used = [&](const std::string& name) {
      return std::find(pattern_vars.begin(), pattern_vars.end(), name) !=
             pattern_vars.end();
    };
    if (q.select_all) {
      q.variables = pattern_vars;
    } else {
      for (const auto& [name, pos] : selected) {
        if (!used(name)) {
          throw ParseError(0, pos, "selected variable ?" + name + " does not occur in WHERE");
        }
        if (std::find(q.variables.begin(), q.variables.end(), name) == q.variables.end()) {
          q.variables.push_back(name);
        }
      }
    }
    for (std::size_t i = 0; i < q.filters.size(); ++i) {
      if (!used(q.filters[i].variable)) {
        throw ParseError(0, filter_pos_[i],
                         "filter variable ?" + q.filters[i].variable + " does not occur in a triple pattern");
      }
    }
    return q;
  }

 private:
  [[noreturn]] void Fail(const std::string& reason) const {
    throw ParseError(0, Cur().pos, reason);
  }

  const Token& Cur() const { return tokens_[index_]; }
  void Advance() {
    if (Cur().kind != TokenKind::kEnd) ++index_;
  }
  bool IsWord(std::string_view upper) const {
    return Cur().kind == TokenKind::kWord && Upper(Cur().text) == upper;
  }
  bool IsPunct(char c) const {
    return Cur().kind == TokenKind::kPunct && Cur().punct == c;
  }
  void Expect(char c, const char* message) {
    if (!IsPunct(c)) {
      RejectUnsupportedWord();
      Fail(message);
    }
    Advance();
  }

  void RejectUnsupportedWord() const {
    if (Cur().kind != TokenKind::kWord) return;
    std::string upper = Upper(Cur().text);
    if (UnsupportedKeywords().count(upper)) throw UnsupportedFeatureError(upper);
  }

  std::string Expand(const std::string& pname, std::size_t pos) const {
    std::size_t colon = pname.find(':');
    std::string prefix = pname.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      throw ParseError(0, pos, "undeclared prefix '" + prefix + ":'");
    }
    std::string iri = it->second + pname.substr(colon + 1);
    if (!Term::IsValidIri(iri)) throw ParseError(0, pos, "invalid IRI '" + iri + "'");
    return iri;
  }

  void ParsePrefix() {
    Advance();
    if (Cur().kind != TokenKind::kPname || Cur().text.back() != ':') {
      Fail("expected prefix name ending in ':'");
    }
    std::string name = Cur().text.substr(0, Cur().text.size() - 1);
    Advance();
    if (Cur().kind != TokenKind::kIriRef) Fail("expected <IRI> after prefix name");
    prefixes_[name] = Cur().text;
    Advance();
  }

  PatternTerm ParseTermOrVar(const char* role) {
    const Token& t = Cur();
    switch (t.kind) {
      case TokenKind::kVar: {
        Advance();
        return Variable{t.text};
      }
      case TokenKind::kIriRef: {
        Advance();
        return Term::Iri(t.text);
      }
      case TokenKind::kPname: {
        std::string iri = Expand(t.text, t.pos);
        Advance();
        return Term::Iri(iri);
      }
      case TokenKind::kString: {
        std::string dt = t.datatype;
        if (t.datatype_is_pname) dt = Expand(dt, t.pos);
        if (!dt.empty() && !Term::IsValidIri(dt)) {
          throw ParseError(0, t.pos, "invalid datatype IRI '" + dt + "'");
        }
        Advance();
        return Term::Literal(t.text, dt);
      }
      case TokenKind::kInteger: {
        Advance();
        return Term::Literal(t.text, std::string(vocab::kXsd) + "integer");
      }
      case TokenKind::kPunct:
        if (t.punct == '[') throw UnsupportedFeatureError("blank node");
        if (t.punct == '(') throw UnsupportedFeatureError("RDF collection");
        break;
      case TokenKind::kWord:
        RejectUnsupportedWord();
        break;
      default:
        break;
    }
    Fail(std::string("expected ") + role);
  }

  static bool IsPathOperator(const Token& t) {
    if (t.kind != TokenKind::kPunct) return false;
    return t.punct == '/' || t.punct == '|' || t.punct == '^' ||
           t.punct == '*' || t.punct == '+' || t.punct == '!';
  }

  void ParseFilter(Query& q) {
    std::size_t filter_pos = Cur().pos;
    Advance();
    Expect('(', "expected '(' after FILTER");
    std::size_t lhs_pos = Cur().pos;
    PatternTerm lhs = ParseFilterOperand();
    if (IsPunct('!') || IsPunct('>') || IsPunct('&') || IsPunct('|')) {
      throw UnsupportedFeatureError(std::string("FILTER operator ") + Cur().punct);
    }
    Expect('=', "expected '=' in FILTER");
    PatternTerm rhs = ParseFilterOperand();
    if (IsPunct('&') || IsPunct('|')) throw UnsupportedFeatureError("FILTER boolean connective");
    Expect(')', "expected ')' to close FILTER");

    auto* lv = std::get_if<Variable>(&lhs);
    auto* rv = std::get_if<Variable>(&rhs);
    if (lv && rv) throw UnsupportedFeatureError("FILTER variable = variable");
    if (!lv && !rv) throw ParseError(0, lhs_pos, "FILTER needs a variable operand");
    if (lv) {
      q.filters.push_back({lv->name, std::get<Term>(rhs)});
    } else {
      q.filters.push_back({rv->name, std::get<Term>(lhs)});
    }
    filter_pos_.push_back(filter_pos);
  }

  PatternTerm ParseFilterOperand() {
    // Function calls such as REGEX(...) or STR(...).
    if (Cur().kind == TokenKind::kWord) throw UnsupportedFeatureError(Upper(Cur().text));
    if (IsPunct('(')) throw UnsupportedFeatureError("FILTER nested expression");
    return ParseTermOrVar("FILTER operand");
  }

  void ParseGroup(Query& q) {
    while (!IsPunct('}')) {
      if (Cur().kind == TokenKind::kEnd) Fail("unterminated WHERE clause");
      if (IsWord("FILTER")) {
        ParseFilter(q);
        if (IsPunct('.')) Advance();
        continue;
      }
      if (IsPunct('{')) throw UnsupportedFeatureError("nested group pattern");
      RejectUnsupportedWord();

      TriplePattern p;
      std::size_t subject_pos = Cur().pos;
      p.subject = ParseTermOrVar("subject");
      if (auto* t = std::get_if<Term>(&p.subject); t && t->is_literal()) {
        throw ParseError(0, subject_pos, "subject cannot be a literal");
      }
      if (IsPathOperator(Cur())) throw UnsupportedFeatureError("property path");
      std::size_t predicate_pos = Cur().pos;
      if (Cur().kind == TokenKind::kWord && Cur().text == "a") {
        p.predicate = vocab::Type();
        Advance();
      } else {
        p.predicate = ParseTermOrVar("predicate");
      }
      if (auto* t = std::get_if<Term>(&p.predicate); t && t->is_literal()) {
        throw ParseError(0, predicate_pos, "predicate cannot be a literal");
      }
      if (IsPathOperator(Cur())) throw UnsupportedFeatureError("property path");
      p.object = ParseTermOrVar("object");
      if (IsPunct(';')) throw UnsupportedFeatureError("predicate-object list ';'");
      if (IsPunct(',')) throw UnsupportedFeatureError("object list ','");
      q.patterns.push_back(std::move(p));
      if (IsPunct('.')) {
        Advance();
      } else if (!IsPunct('}') && !IsWord("FILTER")) {
        RejectUnsupportedWord();
        Fail("expected '.' between triple patterns");
      }
    }
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  PrefixMap prefixes_;
  std::vector<std::size_t> filter_pos_;
};

class Evaluator {
 public:
  Evaluator(const Store& store, const Query& query) : store_(store), query_(query) {}

  SolutionSet Run() {
    SolutionSet out;
    out.variables = query_.variables;

    for (const TriplePattern& p : query_.patterns) {
      Register(p.subject);
      Register(p.predicate);
      Register(p.object);
    }
    bindings_.assign(ids_.size(), std::nullopt);
    for (const EqualityFilter& f : query_.filters) {
      auto& slot = bindings_[ids_.at(f.variable)];
      if (slot && *slot != f.value) return out;
      slot = f.value;
    }
    for (const std::string& v : query_.variables) projection_.push_back(ids_.at(v));

    Solve(0);

    std::vector<std::pair<std::string, std::vector<Term>>> keyed;
    keyed.reserve(rows_.size());
    for (auto& row : rows_) keyed.emplace_back(SerializeRow(row), row);
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, row] : keyed) {
      if (query_.limit && out.rows.size() >= *query_.limit) break;
      out.rows.push_back(std::move(row));
    }
    return out;
  }

 private:
  void Register(const PatternTerm& t) {
    if (auto* v = std::get_if<Variable>(&t)) ids_.emplace(v->name, ids_.size());
  }

  std::optional<Term> Resolve(const PatternTerm& t) const {
    if (auto* term = std::get_if<Term>(&t)) return *term;
    return bindings_[ids_.at(std::get<Variable>(t).name)];
  }

  // Binds `t` to `value` if it is a free variable; returns false on conflict.
  bool Bind(const PatternTerm& t, const Term& value, std::vector<std::size_t>& bound) {
    auto* v = std::get_if<Variable>(&t);
    if (!v) return true;
    auto& slot = bindings_[ids_.at(v->name)];
    if (slot) return *slot == value;
    slot = value;
    bound.push_back(ids_.at(v->name));
    return true;
  }

  void Solve(std::size_t i) {
    if (i == query_.patterns.size()) {
      std::vector<Term> row;
      row.reserve(projection_.size());
      for (std::size_t id : projection_) row.push_back(*bindings_[id]);
      rows_.insert(std::move(row));
      return;
    }
    const TriplePattern& p = query_.patterns[i];
    MatchPattern mp{Resolve(p.subject), Resolve(p.predicate), Resolve(p.object)};
    // Matches are collected first so that recursion does not run inside the
    // index scan.
    std::vector<Triple> matches = store_.Match(mp);
    for (const Triple& t : matches) {
      std::vector<std::size_t> bound;
      if (Bind(p.subject, t.subject, bound) && Bind(p.predicate, t.predicate, bound) &&
          Bind(p.object, t.object, bound)) {
        Solve(i + 1);
      }
      for (std::size_t id : bound) bindings_[id].reset();
    }
  }

  const Store& store_;
  const Query& query_;
  std::map<std::string, std::size_t> ids_;
  std::vector<std::optional<Term>> bindings_;
  std::vector<std::size_t> projection_;
  std::set<std::vector<Term>> rows_;
};

}  // namespace

Query ParseQuery(std::string_view text) {
  return Parser(Lexer(text).Run()).Run();
}

SolutionSet Evaluate(const Store& store, const Query& query) {
  return Evaluator(store, query).Run();
}

std::string SerializeRow(const std::vector<Term>& row) {
  std::string key;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) key += '\t';
    key += row[i].ToString();
  }
  return key;
}

std::string FormatSolutions(const SolutionSet& solutions) {
  std::string out;
  for (std::size_t i = 0; i < solutions.variables.size(); ++i) {
    if (i) out += '\t';
    out += "?" + solutions.variables[i];
  }
  out += '\n';
  for (const auto& row : solutions.rows) {
    out += SerializeRow(row);
    out += '\n';
  }
  return out;
}

}  // namespace medico::sparql

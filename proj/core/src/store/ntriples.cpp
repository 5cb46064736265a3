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

#include "medico/store/ntriples.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "medico/error.h"

namespace medico {
namespace {

bool IsPrefixChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool IsLocalChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || c == '%';
}

void AppendUtf8(std::string& out, std::uint32_t cp) {
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

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no, PrefixMap& prefixes)
      : line_(line), line_no_(line_no), prefixes_(prefixes) {}

  // Returns true and fills `out` for a statement; false for a directive,
  // blank or comment line.
  bool Parse(Triple& out) {
    SkipSpace();
    if (AtEnd() || Peek() == '#') return false;
    if (Peek() == '@') {
      ParsePrefixDirective();
      return false;
    }
    Term s = ParseIriTerm("subject");
    SkipSpace();
    Term p = ParseIriTerm("predicate");
    SkipSpace();
    Term o = ParseObject();
    SkipSpace();
    ExpectDot();
    out = Triple(std::move(s), std::move(p), std::move(o));
    return true;
  }

 private:
  [[noreturn]] void Fail(const std::string& reason) const {
    throw ParseError(line_no_, pos_, reason);
  }

  bool AtEnd() const { return pos_ >= line_.size(); }
  char Peek() const { return line_[pos_]; }

  void SkipSpace() {
    while (!AtEnd() && (Peek() == ' ' || Peek() == '\t' || Peek() == '\r')) {
      ++pos_;
    }
  }

  void ExpectDot() {
    if (AtEnd() || Peek() != '.') Fail("expected '.' at end of statement");
    ++pos_;
    SkipSpace();
    if (!AtEnd() && Peek() != '#') Fail("unexpected text after '.'");
  }

  void ParsePrefixDirective() {
    static constexpr std::string_view kKeyword = "@prefix";
    if (line_.substr(pos_, kKeyword.size()) != kKeyword) {
      Fail("unknown directive");
    }
    pos_ += kKeyword.size();
    if (AtEnd() || (Peek() != ' ' && Peek() != '\t')) {
      Fail("expected whitespace after @prefix");
    }
    SkipSpace();
    std::size_t start = pos_;
    while (!AtEnd() && IsPrefixChar(Peek())) ++pos_;
    std::string name(line_.substr(start, pos_ - start));
    if (AtEnd() || Peek() != ':') Fail("expected ':' after prefix name");
    ++pos_;
    SkipSpace();
    if (AtEnd() || Peek() != '<') Fail("expected <IRI> in @prefix directive");
    std::string base = ParseIriRef();
    SkipSpace();
    ExpectDot();
    prefixes_[name] = base;
  }

  std::string ParseIriRef() {
    ++pos_;  // '<'
    std::size_t end = line_.find('>', pos_);
    if (end == std::string_view::npos) Fail("unterminated IRI");
    std::string iri(line_.substr(pos_, end - pos_));
    if (!Term::IsValidIri(iri)) Fail("invalid IRI '" + iri + "'");
    pos_ = end + 1;
    return iri;
  }

  std::string ParsePrefixedName() {
    std::size_t start = pos_;
    while (!AtEnd() && IsPrefixChar(Peek())) ++pos_;
    if (AtEnd() || Peek() != ':') {
      pos_ = start;
      Fail("expected IRI or prefixed name");
    }
    std::string name(line_.substr(start, pos_ - start));
    ++pos_;
    std::size_t local_start = pos_;
    while (!AtEnd() && IsLocalChar(Peek())) ++pos_;
    // A trailing '.' terminates the statement rather than the local name.
    while (pos_ > local_start && line_[pos_ - 1] == '.') --pos_;
    std::string local(line_.substr(local_start, pos_ - local_start));
    auto it = prefixes_.find(name);
    if (it == prefixes_.end()) {
      pos_ = start;
      Fail("undeclared prefix '" + name + ":'");
    }
    std::string iri = it->second + local;
    if (!Term::IsValidIri(iri)) Fail("invalid IRI '" + iri + "'");
    return iri;
  }

  Term ParseIriTerm(const char* role) {
    if (AtEnd()) Fail(std::string("missing ") + role);
    if (Peek() == '"') Fail(std::string(role) + " must be an IRI");
    if (Peek() == '<') return Term::Iri(ParseIriRef());
    return Term::Iri(ParsePrefixedName());
  }

  Term ParseObject() {
    if (AtEnd()) Fail("missing object");
    if (Peek() == '<') return Term::Iri(ParseIriRef());
    if (Peek() != '"') return Term::Iri(ParsePrefixedName());
    std::string value = ParseQuoted();
    std::string datatype;
    if (!AtEnd() && Peek() == '@') Fail("language tags are not supported");
    if (line_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (AtEnd()) Fail("missing datatype IRI");
      datatype = Peek() == '<' ? ParseIriRef() : ParsePrefixedName();
    }
    return Term::Literal(std::move(value), std::move(datatype));
  }

  std::uint32_t ParseHex(std::size_t digits) {
    if (pos_ + digits > line_.size()) Fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char c = line_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
      else Fail("invalid hex digit in unicode escape");
    }
    if (cp > 0x10FFFF) Fail("unicode escape out of range");
    return cp;
  }

  std::string ParseQuoted() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (AtEnd()) Fail("unterminated literal");
      char c = line_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (AtEnd()) Fail("unterminated escape");
      char e = line_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'u': AppendUtf8(out, ParseHex(4)); break;
        case 'U': AppendUtf8(out, ParseHex(8)); break;
        default: Fail(std::string("unknown escape \\") + e);
      }
    }
  }

  std::string_view line_;
  std::size_t line_no_;
  PrefixMap& prefixes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Triple> ParseTriples(std::string_view text, PrefixMap* prefixes) {
  PrefixMap local = prefixes ? *prefixes : PrefixMap{};
  for (const auto& [name, base] : DefaultPrefixes()) local.emplace(name, base);

  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    Triple t;
    LineParser parser(text.substr(start, end - start), line_no, local);
    if (parser.Parse(t)) out.push_back(std::move(t));
    if (end == text.size()) break;
    start = end + 1;
  }
  if (prefixes) *prefixes = std::move(local);
  return out;
}

std::string SerializeTriple(const Triple& t) {
  return t.subject.ToString() + " " + t.predicate.ToString() + " " +
         t.object.ToString() + " .";
}

std::string SerializeTriples(const std::vector<Triple>& triples) {
  std::string out;
  for (const Triple& t : triples) {
    out += SerializeTriple(t);
    out += '\n';
  }
  return out;
}

void Snapshot(const Store& store, std::ostream& sink) {
  store.ForEachMatch({}, [&](const Triple& t) {
    sink << SerializeTriple(t) << '\n';
    return true;
  });
}

void Snapshot(const Store& store, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo,
                  fmt::format("{}: cannot open for writing", tmp.string()));
    }
    Snapshot(store, out);
    out.flush();
    if (!out) {
      throw Error(ErrorCode::kIo, fmt::format("{}: write failed", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, fmt::format("{}: rename failed: {}",
                                            path.string(), ec.message()));
  }
}

Store LoadStore(std::string_view text) {
  Store store;
  PrefixMap prefixes;
  for (const Triple& t : ParseTriples(text, &prefixes)) store.Insert(t);
  for (const auto& [name, base] : prefixes) store.AddPrefix(name, base);
  return store;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo,
                fmt::format("{}: cannot open for reading", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorCode::kIo, fmt::format("{}: read failed", path.string()));
  }
  return buf.str();
}

Store LoadStore(const std::filesystem::path& path) {
  std::string text = ReadFile(path);
  try {
    return LoadStore(std::string_view(text));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.position(),
                     fmt::format("{}: {}", path.string(), e.reason()));
  }
}

}  // namespace medico

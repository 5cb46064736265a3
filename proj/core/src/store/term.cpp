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

#include "medico/store/term.h"

#include <cctype>

#include "medico/error.h"
#include "medico/vocab.h"

namespace medico {

bool Term::IsValidIri(std::string_view iri) {
  if (iri.empty()) return false;
  // scheme ":" rest
  std::size_t colon = iri.find(':');
  if (colon == 0 || colon == std::string_view::npos) return false;
  if (!std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = iri[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' &&
        c != '.') {
      return false;
    }
  }
  for (char c : iri) {
    auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7F) return false;
    switch (c) {
      case '<': case '>': case '"': case '{': case '}':
      case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

Term Term::Iri(std::string iri) {
  if (!IsValidIri(iri)) {
    throw Error(ErrorCode::kValidation, "invalid IRI: '" + iri + "'");
  }
  return Term(Kind::kIri, std::move(iri), {});
}

Term Term::Literal(std::string value, std::string datatype) {
  if (!datatype.empty() && !IsValidIri(datatype)) {
    throw Error(ErrorCode::kValidation,
                "invalid datatype IRI: '" + datatype + "'");
  }
  return Term(Kind::kLiteral, std::move(value), std::move(datatype));
}

std::string EscapeLiteral(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Term::ToString() const {
  if (is_iri()) return "<" + value_ + ">";
  std::string out = "\"" + EscapeLiteral(value_) + "\"";
  if (!datatype_.empty()) out += "^^<" + datatype_ + ">";
  return out;
}

std::string PercentEncode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '.' || c == '_' || c == '~' || c == '-') {
      out += c;
    } else {
      out += '%';
      out += kHex[u >> 4];
      out += kHex[u & 0xF];
    }
  }
  return out;
}

const PrefixMap& DefaultPrefixes() {
  static const PrefixMap prefixes = {
      {"rdf", std::string(vocab::kRdf)},
      {"rdfs", std::string(vocab::kRdfs)},
      {"xsd", std::string(vocab::kXsd)},
      {"medico", std::string(vocab::kMedico)},
  };
  return prefixes;
}

}  // namespace medico

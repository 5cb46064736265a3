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

#ifndef MEDICO_STORE_TERM_H_
#define MEDICO_STORE_TERM_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace medico {

// An RDF term: an absolute IRI or a literal with an optional datatype IRI.
// Prefixed names never reach a Term; parsers expand them first.
class Term {
 public:
  enum class Kind : std::uint8_t { kIri, kLiteral };

  Term() = default;

  // Throws Error(kValidation) unless `iri` is non-empty, has a scheme and
  // contains no whitespace or delimiter characters.
  static Term Iri(std::string iri);
  static Term Literal(std::string value, std::string datatype = {});

  static bool IsValidIri(std::string_view iri);

  Kind kind() const { return kind_; }
  bool is_iri() const { return kind_ == Kind::kIri; }
  bool is_literal() const { return kind_ == Kind::kLiteral; }
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }

  // N-Triples style: <iri>, "text" or "text"^^<datatype>.
  std::string ToString() const;

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(Kind kind, std::string value, std::string datatype)
      : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)) {}

  Kind kind_ = Kind::kIri;
  std::string value_;
  std::string datatype_;
};

// Short name (without the colon) -> IRI base.
using PrefixMap = std::map<std::string, std::string, std::less<>>;

// rdf, rdfs, xsd and medico.
const PrefixMap& DefaultPrefixes();

// Escapes a literal body for the line format (\" \\ \n \r \t).
std::string EscapeLiteral(std::string_view text);

// Percent-encodes every byte outside [A-Za-z0-9._~-] so that arbitrary
// identifiers can be embedded in minted IRIs.
std::string PercentEncode(std::string_view text);

struct TermHash {
  std::size_t operator()(const Term& t) const {
    return std::hash<std::string>{}(t.value()) ^
           (static_cast<std::size_t>(t.kind()) << 1);
  }
};

}  // namespace medico

#endif  // MEDICO_STORE_TERM_H_

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

#ifndef MEDICO_STORE_NTRIPLES_H_
#define MEDICO_STORE_NTRIPLES_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "medico/store/term.h"
#include "medico/store/triple_store.h"

namespace medico {

// Line-oriented triple format:
//
//   # comment
//   @prefix fma: <urn:fma:> .
//   <urn:a> <urn:p> <urn:b> .
//   fma:Liver medico:partOf fma:Abdomen .
//   <urn:a> <urn:p> "text"^^<urn:dt> .
//
// One statement per line. Prefixed names are expanded while parsing; the
// rdf/rdfs/xsd/medico prefixes are predeclared and may be redeclared.
// Literal escapes: \" \\ \n \r \t \uXXXX \UXXXXXXXX.
//
// Throws ParseError carrying the 1-based line number. When `prefixes` is
// non-null it seeds the prefix table and receives every declaration.
std::vector<Triple> ParseTriples(std::string_view text,
                                 PrefixMap* prefixes = nullptr);

std::string SerializeTriple(const Triple& triple);
// One line per triple, full IRIs, in the given order.
std::string SerializeTriples(const std::vector<Triple>& triples);

// Writes every triple of `store` in sorted order. The file variant writes to
// a temporary sibling and renames it into place.
void Snapshot(const Store& store, std::ostream& sink);
void Snapshot(const Store& store, const std::filesystem::path& path);

Store LoadStore(std::string_view text);
// Errors name the path, and the line for parse failures.
Store LoadStore(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace medico

#endif  // MEDICO_STORE_NTRIPLES_H_

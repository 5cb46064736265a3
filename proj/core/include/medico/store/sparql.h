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

#ifndef MEDICO_STORE_SPARQL_H_
#define MEDICO_STORE_SPARQL_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "medico/store/term.h"
#include "medico/store/triple_store.h"

namespace medico::sparql {

// Variable name without the leading '?' or '$'.
struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

// FILTER(?variable = term). Equality is term identity.
struct EqualityFilter {
  std::string variable;
  Term value;
};

struct Query {
  // Projection in SELECT order. For SELECT * this lists every pattern
  // variable in order of first appearance and `select_all` is set.
  std::vector<std::string> variables;
  bool select_all = false;
  std::vector<TriplePattern> patterns;
  std::vector<EqualityFilter> filters;
  std::optional<std::size_t> limit;
};

// Supported subset:
//
//   PREFIX name: <iri>            (any number)
//   SELECT [DISTINCT] (?v ... | *)
//   [WHERE] { pattern . pattern . FILTER(?v = term) ... }
//   [LIMIT n]
//
// Terms are <iri>, prefixed names, `a` (rdf:type), "literal"(^^type)? and
// integers. rdf/rdfs/xsd/medico prefixes are predeclared.
//
// Throws ParseError (line 0, byte position) on syntax errors and
// UnsupportedFeatureError naming the keyword for SPARQL constructs outside
// the subset (OPTIONAL, UNION, ORDER, property paths, ...).
Query ParseQuery(std::string_view text);

// Bindings projected on `variables`; each row is aligned with `variables`.
// Rows are distinct and sorted lexicographically by the serialized terms.
struct SolutionSet {
  std::vector<std::string> variables;
  std::vector<std::vector<Term>> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
};

// Conjunctive evaluation, left to right, each pattern resolved through the
// most selective store index given the bindings so far. Filters, then
// DISTINCT, deterministic sort, LIMIT.
SolutionSet Evaluate(const Store& store, const Query& query);

// Sort key used for solution ordering: serialized terms separated by tabs.
std::string SerializeRow(const std::vector<Term>& row);

// Tab-separated bindings, one row per line, preceded by a header of
// ?variable names.
std::string FormatSolutions(const SolutionSet& solutions);

}  // namespace medico::sparql

#endif  // MEDICO_STORE_SPARQL_H_

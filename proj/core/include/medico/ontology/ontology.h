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

#ifndef MEDICO_ONTOLOGY_ONTOLOGY_H_
#define MEDICO_ONTOLOGY_ONTOLOGY_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "medico/store/term.h"
#include "medico/store/triple_store.h"

namespace medico {

enum class ConceptSource { kAnatomy, kImaging, kDisease, kDicom, kDialogue };

std::string_view ConceptSourceName(ConceptSource source);
std::optional<ConceptSource> ParseConceptSource(std::string_view name);

struct ConceptRef {
  Term iri;
  ConceptSource source = ConceptSource::kAnatomy;

  friend bool operator==(const ConceptRef& a, const ConceptRef& b) {
    return a.iri == b.iri;
  }
  friend auto operator<=>(const ConceptRef& a, const ConceptRef& b) {
    return a.iri <=> b.iri;
  }
};

enum class Relation { kIsA, kPartOf };
// kDown follows edges toward specializations and parts, kUp toward
// generalizations and wholes.
enum class Direction { kDown, kUp };

struct ExpansionSpec {
  std::set<Relation> relations;
  std::set<Direction> directions;
  int max_depth = 0;

  // Both relations, both directions, depth 2.
  static ExpansionSpec Default();
};

struct ExpandedTerm {
  ConceptRef ref;
  int distance = 0;

  friend bool operator==(const ExpandedTerm&, const ExpandedTerm&) = default;
};

struct LabeledConcept {
  Term iri;
  std::string label;
  friend bool operator==(const LabeledConcept&, const LabeledConcept&) = default;
};

struct ConceptNeighbors {
  LabeledConcept subject;
  ConceptSource source = ConceptSource::kAnatomy;
  std::vector<std::string> labels;  // preferred label first, then synonyms
  std::vector<LabeledConcept> parents;   // isA up
  std::vector<LabeledConcept> children;  // isA down
  std::vector<LabeledConcept> wholes;    // partOf up
  std::vector<LabeledConcept> parts;     // partOf down
};

// Concept-level view over the ontology triples of a store: labels,
// synonyms, and the isA / partOf graph. Built once and read-only afterwards,
// so a single instance can be shared between threads.
class Ontology {
 public:
  // Maximum hop count reported by Distance().
  static constexpr int kDistanceCap = 4;

  // Throws Error(kValidation) for a concept without a recognised
  // medico:source.
  static Ontology FromStore(const Store& store);

  // Concepts whose label, synonym or code equals `surface` after case folding,
  // mapping '-' and '_' to spaces and collapsing whitespace. Sorted by IRI;
  // empty when unknown. Throws Error(kValidation) for blank input.
  std::vector<ConceptRef> Lookup(std::string_view surface) const;

  // Breadth-first expansion; every reachable concept once with its minimum
  // distance, sorted by (distance, IRI). Throws Error(kNotFound) for an
  // unknown seed and Error(kValidation) for an empty relation or direction
  // set with max_depth > 0.
  std::vector<ExpandedTerm> Expand(const Term& seed,
                                   const ExpansionSpec& spec) const;

  // Minimum hops in the undirected graph of `relations`. Absent when the
  // concepts are disconnected, farther apart than kDistanceCap, or belong to
  // different sources. Throws Error(kNotFound) for unknown concepts.
  std::optional<int> Distance(const Term& a, const Term& b,
                              const std::set<Relation>& relations) const;

  ConceptNeighbors Neighbors(const Term& iri) const;

  bool Contains(const Term& iri) const { return concepts_.count(iri) > 0; }
  // Throws Error(kNotFound).
  const ConceptRef& Get(const Term& iri) const;
  std::optional<ConceptRef> Find(const Term& iri) const;

  // Preferred label (the IRI when unlabeled).
  std::string Label(const Term& iri) const;
  // Wording used inside generated sentences: medico:phrase when present,
  // otherwise the label, with a leading capital lowered for anatomy.
  std::string Phrase(const Term& iri) const;
  std::optional<std::string> Code(const Term& iri) const;

  // Every concept, sorted by IRI.
  std::vector<ConceptRef> Concepts() const;

  // Direct edges; `from` is the specialization / part.
  const std::vector<std::pair<Term, Term>>& Edges(Relation relation) const;

  static std::string NormalizeSurface(std::string_view surface);

 private:
  struct Node {
    ConceptRef ref;
    std::string label;
    std::vector<std::string> synonyms;
    std::optional<std::string> code;
    std::optional<std::string> phrase;
    std::vector<Term> up[2];    // indexed by Relation
    std::vector<Term> down[2];  // indexed by Relation
  };

  const Node& NodeOf(const Term& iri) const;
  std::vector<LabeledConcept> Labeled(const std::vector<Term>& iris) const;

  std::map<Term, Node> concepts_;
  std::map<std::string, std::set<Term>> surface_index_;
  std::vector<std::pair<Term, Term>> edges_[2];
};

// Inserts the bundled anatomy, imaging and disease subsets into `store`.
void LoadBundledOntologies(Store& store);

}  // namespace medico

#endif  // MEDICO_ONTOLOGY_ONTOLOGY_H_

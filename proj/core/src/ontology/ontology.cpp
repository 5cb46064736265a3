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

#include "medico/ontology/ontology.h"

#include <algorithm>
#include <cctype>
#include <deque>

#include "medico/bundled_data.h"
#include "medico/error.h"
#include "medico/store/ntriples.h"
#include "medico/vocab.h"

namespace medico {

std::string_view ConceptSourceName(ConceptSource source) {
  switch (source) {
    case ConceptSource::kAnatomy: return "anatomy";
    case ConceptSource::kImaging: return "imaging";
    case ConceptSource::kDisease: return "disease";
    case ConceptSource::kDicom: return "dicom";
    case ConceptSource::kDialogue: return "dialogue";
  }
  return "unknown";
}

std::optional<ConceptSource> ParseConceptSource(std::string_view name) {
  if (name == "anatomy") return ConceptSource::kAnatomy;
  if (name == "imaging") return ConceptSource::kImaging;
  if (name == "disease") return ConceptSource::kDisease;
  if (name == "dicom") return ConceptSource::kDicom;
  if (name == "dialogue") return ConceptSource::kDialogue;
  return std::nullopt;
}

ExpansionSpec ExpansionSpec::Default() {
  return {{Relation::kIsA, Relation::kPartOf},
          {Direction::kDown, Direction::kUp},
          2};
}

std::string Ontology::NormalizeSurface(std::string_view surface) {
  std::string out;
  bool pending_space = false;
  for (char c : surface) {
    if (c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

Ontology Ontology::FromStore(const Store& store) {
  Ontology o;
  for (const Term& iri : store.Subjects(vocab::Type(), vocab::Concept())) {
    Node node;
    node.ref.iri = iri;
    auto source = store.FirstObject(iri, vocab::Source());
    auto parsed = source ? ParseConceptSource(source->value()) : std::nullopt;
    if (!parsed) {
      throw Error(ErrorCode::kValidation,
                  "concept " + iri.value() + " has no valid medico:source");
    }
    node.ref.source = *parsed;
    if (auto label = store.FirstObject(iri, vocab::Label())) {
      node.label = label->value();
    } else {
      node.label = iri.value();
    }
    for (const Term& syn : store.Objects(iri, vocab::Synonym())) {
      node.synonyms.push_back(syn.value());
    }
    if (auto code = store.FirstObject(iri, vocab::Code())) node.code = code->value();
    if (auto phrase = store.FirstObject(iri, vocab::Phrase())) node.phrase = phrase->value();

    o.surface_index_[NormalizeSurface(node.label)].insert(iri);
    for (const auto& syn : node.synonyms) o.surface_index_[NormalizeSurface(syn)].insert(iri);
    if (node.code) o.surface_index_[NormalizeSurface(*node.code)].insert(iri);
    o.concepts_.emplace(iri, std::move(node));
  }

  const Term predicates[2] = {vocab::IsA(), vocab::PartOf()};
  for (int r = 0; r < 2; ++r) {
    for (const Triple& t : store.Match({std::nullopt, predicates[r], std::nullopt})) {
      auto from = o.concepts_.find(t.subject);
      auto to = o.concepts_.find(t.object);
      if (from == o.concepts_.end() || to == o.concepts_.end()) continue;
      from->second.up[r].push_back(t.object);
      to->second.down[r].push_back(t.subject);
      o.edges_[r].emplace_back(t.subject, t.object);
    }
  }
  return o;
}

const Ontology::Node& Ontology::NodeOf(const Term& iri) const {
  auto it = concepts_.find(iri);
  if (it == concepts_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown concept " + iri.value());
  }
  return it->second;
}

const ConceptRef& Ontology::Get(const Term& iri) const { return NodeOf(iri).ref; }

std::optional<ConceptRef> Ontology::Find(const Term& iri) const {
  auto it = concepts_.find(iri);
  if (it == concepts_.end()) return std::nullopt;
  return it->second.ref;
}

std::string Ontology::Label(const Term& iri) const {
  auto it = concepts_.find(iri);
  return it == concepts_.end() ? iri.value() : it->second.label;
}

std::string Ontology::Phrase(const Term& iri) const {
  auto it = concepts_.find(iri);
  if (it == concepts_.end()) return iri.value();
  const Node& n = it->second;
  if (n.phrase) return *n.phrase;
  std::string text = n.label;
  // "Lymph node" -> "lymph node"; keep acronyms such as "RCA".
  if (n.ref.source == ConceptSource::kAnatomy && text.size() > 1 &&
      std::isupper(static_cast<unsigned char>(text[0])) &&
      !std::isupper(static_cast<unsigned char>(text[1]))) {
    text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
  }
  return text;
}

std::optional<std::string> Ontology::Code(const Term& iri) const {
  auto it = concepts_.find(iri);
  if (it == concepts_.end()) return std::nullopt;
  return it->second.code;
}

std::vector<ConceptRef> Ontology::Concepts() const {
  std::vector<ConceptRef> out;
  out.reserve(concepts_.size());
  for (const auto& [iri, node] : concepts_) out.push_back(node.ref);
  return out;
}

const std::vector<std::pair<Term, Term>>& Ontology::Edges(Relation relation) const {
  return edges_[static_cast<int>(relation)];
}

std::vector<ConceptRef> Ontology::Lookup(std::string_view surface) const {
  std::string key = NormalizeSurface(surface);
  if (key.empty()) throw Error(ErrorCode::kValidation, "empty concept surface");
  std::vector<ConceptRef> out;
  auto it = surface_index_.find(key);
  if (it == surface_index_.end()) return out;
  for (const Term& iri : it->second) out.push_back(NodeOf(iri).ref);
  return out;
}

std::vector<ExpandedTerm> Ontology::Expand(const Term& seed,
                                           const ExpansionSpec& spec) const {
  NodeOf(seed);  // not-found check
  if (spec.max_depth < 0) {
    throw Error(ErrorCode::kValidation, "expansion depth must be non-negative");
  }
  if (spec.max_depth > 0 && (spec.relations.empty() || spec.directions.empty())) {
    throw Error(ErrorCode::kValidation,
                "expansion needs at least one relation and one direction");
  }

  std::map<Term, int> distance{{seed, 0}};
  std::deque<Term> queue{seed};
  while (!queue.empty()) {
    Term current = queue.front();
    queue.pop_front();
    int d = distance[current];
    if (d == spec.max_depth) continue;
    const Node& node = NodeOf(current);
    for (Relation rel : spec.relations) {
      int r = static_cast<int>(rel);
      for (Direction dir : spec.directions) {
        const auto& next = dir == Direction::kUp ? node.up[r] : node.down[r];
        for (const Term& n : next) {
          if (distance.emplace(n, d + 1).second) queue.push_back(n);
        }
      }
    }
  }

  std::vector<ExpandedTerm> out;
  out.reserve(distance.size());
  for (const auto& [iri, d] : distance) out.push_back({NodeOf(iri).ref, d});
  std::sort(out.begin(), out.end(), [](const ExpandedTerm& a, const ExpandedTerm& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.ref.iri < b.ref.iri;
  });
  return out;
}

std::optional<int> Ontology::Distance(const Term& a, const Term& b,
                                      const std::set<Relation>& relations) const {
  const Node& na = NodeOf(a);
  const Node& nb = NodeOf(b);
  if (na.ref.source != nb.ref.source) return std::nullopt;
  if (a == b) return 0;

  std::map<Term, int> distance{{a, 0}};
  std::deque<Term> queue{a};
  while (!queue.empty()) {
    Term current = queue.front();
    queue.pop_front();
    int d = distance[current];
    if (d == kDistanceCap) continue;
    const Node& node = NodeOf(current);
    for (Relation rel : relations) {
      int r = static_cast<int>(rel);
      for (const auto* list : {&node.up[r], &node.down[r]}) {
        for (const Term& n : *list) {
          if (!distance.emplace(n, d + 1).second) continue;
          if (n == b) return d + 1;
          queue.push_back(n);
        }
      }
    }
  }
  return std::nullopt;
}

std::vector<LabeledConcept> Ontology::Labeled(const std::vector<Term>& iris) const {
  std::vector<LabeledConcept> out;
  for (const Term& iri : iris) out.push_back({iri, Label(iri)});
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.iri < y.iri; });
  return out;
}

ConceptNeighbors Ontology::Neighbors(const Term& iri) const {
  const Node& n = NodeOf(iri);
  ConceptNeighbors out;
  out.subject = {iri, n.label};
  out.source = n.ref.source;
  out.labels.push_back(n.label);
  out.labels.insert(out.labels.end(), n.synonyms.begin(), n.synonyms.end());
  const int isa = static_cast<int>(Relation::kIsA);
  const int part = static_cast<int>(Relation::kPartOf);
  out.parents = Labeled(n.up[isa]);
  out.children = Labeled(n.down[isa]);
  out.wholes = Labeled(n.up[part]);
  out.parts = Labeled(n.down[part]);
  return out;
}

void LoadBundledOntologies(Store& store) {
  for (const char* name : {"ontologies/fma_mini.nt", "ontologies/radlex_mini.nt",
                           "ontologies/icd10_mini.nt"}) {
    PrefixMap prefixes;
    for (const Triple& t : ParseTriples(data::BundledFile(name), &prefixes)) {
      store.Insert(t);
    }
    for (const auto& [prefix, base] : prefixes) store.AddPrefix(prefix, base);
  }
}

}  // namespace medico

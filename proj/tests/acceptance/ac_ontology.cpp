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

#include <map>

#include "criteria.h"
#include "medico/ontology/ontology.h"
#include "medico/vocab.h"
#include "support/dag_gen.h"
#include "support/oracles.h"

namespace medico::acceptance {

namespace {

using Arcs = std::vector<std::pair<std::size_t, std::size_t>>;

// Compares Expand with all-pairs shortest paths for every relation and
// direction combination, every start concept and depths 0-4. Arcs are
// (child, parent) pairs.
void CompareExpansion(Checker& c, const Ontology& o, const std::vector<Term>& nodes,
                      const Arcs& isa, const Arcs& part, const std::string& label) {
  for (int rel_mask = 1; rel_mask < 4; ++rel_mask) {
    for (int dir_mask = 1; dir_mask < 4; ++dir_mask) {
      ExpansionSpec spec;
      Arcs arcs;
      for (int r = 0; r < 2; ++r) {
        if (!(rel_mask & (1 << r))) continue;
        spec.relations.insert(static_cast<Relation>(r));
        for (const auto& [child, parent] : (r == 0 ? isa : part)) {
          if (dir_mask & 1) arcs.emplace_back(parent, child);
          if (dir_mask & 2) arcs.emplace_back(child, parent);
        }
      }
      if (dir_mask & 1) spec.directions.insert(Direction::kDown);
      if (dir_mask & 2) spec.directions.insert(Direction::kUp);
      auto dist = oracle::AllPairsShortest(nodes.size(), arcs);
      for (int depth = 0; depth <= 4; ++depth) {
        spec.max_depth = depth;
        for (std::size_t s = 0; s < nodes.size(); ++s) {
          std::map<Term, int> want, got;
          for (std::size_t t = 0; t < nodes.size(); ++t) {
            if (dist[s][t] >= 0 && dist[s][t] <= depth) want[nodes[t]] = dist[s][t];
          }
          for (const auto& e : o.Expand(nodes[s], spec)) got[e.ref.iri] = e.distance;
          c.Expectf(got == want, "{}: {} rel {} dir {} depth {}", label, nodes[s].value(),
                    rel_mask, dir_mask, depth);
        }
      }
    }
  }
}

}  // namespace

void ExpansionCorrectness(Checker& c) {
  gen::Rng rng(1003);
  std::size_t largest = 0;
  for (int round = 0; round < 60; ++round) {
    gen::RandomDag dag = gen::MakeDag(rng, gen::Uniform(rng, 2, 60));
    largest = std::max(largest, dag.nodes.size());
    Ontology o = Ontology::FromStore(dag.store);
    CompareExpansion(c, o, dag.nodes, dag.isa, dag.part, fmt::format("dag {}", round));
  }

  Store bundled;
  LoadBundledOntologies(bundled);
  Ontology o = Ontology::FromStore(bundled);
  std::vector<Term> nodes;
  std::map<Term, std::size_t> index;
  for (const auto& concept_ref : o.Concepts()) {
    index[concept_ref.iri] = nodes.size();
    nodes.push_back(concept_ref.iri);
  }
  auto edges = [&](const Term& pred) {
    Arcs out;
    for (const Triple& t : bundled.Match({std::nullopt, pred, std::nullopt})) {
      out.emplace_back(index.at(t.subject), index.at(t.object));
    }
    return out;
  };
  CompareExpansion(c, o, nodes, edges(vocab::IsA()), edges(vocab::PartOf()), "bundled");
  c.Note(fmt::format("60 random DAGs up to {} nodes, {} bundled concepts", largest, nodes.size()));
}

}  // namespace medico::acceptance

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

#include <algorithm>
#include <cctype>

#include <gtest/gtest.h>

#include "medico/error.h"
#include "medico/ontology/ontology.h"
#include "medico/vocab.h"
#include "support/generators.h"
#include "support/oracles.h"
#include "support/dag_gen.h"

namespace medico {
namespace {

Term Fma(const std::string& local) { return Term::Iri("urn:fma:" + local); }
Term Icd(const std::string& local) { return Term::Iri("urn:icd10:" + local); }

class BundledOntologyTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    store_ = new Store();
    LoadBundledOntologies(*store_);
    ontology_ = new Ontology(Ontology::FromStore(*store_));
  }
  static void TearDownTestSuite() {
    delete ontology_;
    delete store_;
  }
  static Store* store_;
  static Ontology* ontology_;
};
Store* BundledOntologyTest::store_ = nullptr;
Ontology* BundledOntologyTest::ontology_ = nullptr;

std::vector<Term> Iris(const std::vector<ConceptRef>& refs) {
  std::vector<Term> out;
  for (const auto& r : refs) out.push_back(r.iri);
  return out;
}

TEST_F(BundledOntologyTest, LookupHyphenatedDisease) {
  auto found = ontology_->Lookup("Hodgkin-Lymphoma");
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].iri, Icd("C81"));
  EXPECT_EQ(found[0].source, ConceptSource::kDisease);
  EXPECT_EQ(ontology_->Code(Icd("C81")), "C81");
}

TEST_F(BundledOntologyTest, LookupLabelAndUnknown) {
  EXPECT_EQ(Iris(ontology_->Lookup("liver")), std::vector<Term>{Fma("Liver")});
  EXPECT_EQ(Iris(ontology_->Lookup("lungs")), std::vector<Term>{Fma("Lung")});
  EXPECT_EQ(Iris(ontology_->Lookup("hyper-intense")),
            std::vector<Term>{Term::Iri("urn:radlex:Hyperintense")});
  EXPECT_EQ(Iris(ontology_->Lookup("lymphoma")), std::vector<Term>{Icd("Lymphoma")});
  EXPECT_TRUE(ontology_->Lookup("flurble").empty());
  EXPECT_THROW(ontology_->Lookup("   "), Error);
}

TEST_F(BundledOntologyTest, LookupIsCaseInsensitive) {
  for (const ConceptRef& c : ontology_->Concepts()) {
    for (const std::string& s : ontology_->Neighbors(c.iri).labels) {
      std::string upper = s;
      for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      auto a = ontology_->Lookup(s);
      EXPECT_EQ(a, ontology_->Lookup(upper)) << s;
      EXPECT_NE(std::find(a.begin(), a.end(), c), a.end()) << s;
    }
  }
}

TEST_F(BundledOntologyTest, ExpandZeroDepthIsIdentity) {
  for (const auto& spec : {ExpansionSpec{{}, {}, 0}, ExpansionSpec{{Relation::kIsA}, {Direction::kUp}, 0}}) {
    auto out = ontology_->Expand(Fma("LymphNode"), spec);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].ref.iri, Fma("LymphNode"));
    EXPECT_EQ(out[0].distance, 0);
  }
}

TEST_F(BundledOntologyTest, ExpandLymphNodeChain) {
  auto out = ontology_->Expand(Fma("LymphNode"), {{Relation::kIsA}, {Direction::kDown}, 2});
  auto dist = [&](const Term& t) -> int {
    for (const auto& e : out) if (e.ref.iri == t) return e.distance;
    return -1;
  };
  EXPECT_EQ(dist(Fma("LymphNode")), 0);
  EXPECT_EQ(dist(Fma("CervicalLymphNode")), 1);
  EXPECT_EQ(dist(Fma("DeepCervicalLymphNode")), 2);
  // Upward concepts are not reachable going down.
  EXPECT_EQ(dist(Fma("LymphaticStructure")), -1);
  for (const auto& e : out) EXPECT_LE(e.distance, 2);
}

TEST_F(BundledOntologyTest, ExpandLeafDownward) {
  auto out = ontology_->Expand(Fma("DeepCervicalLymphNode"),
                               {{Relation::kIsA, Relation::kPartOf}, {Direction::kDown}, 3});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].distance, 0);
}

TEST_F(BundledOntologyTest, ExpandErrors) {
  EXPECT_THROW(ontology_->Expand(Fma("Nope"), ExpansionSpec::Default()), Error);
  try {
    ontology_->Expand(Fma("Liver"), {{}, {Direction::kUp}, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
}

TEST_F(BundledOntologyTest, ExpandIsMonotoneInDepth) {
  for (const ConceptRef& c : ontology_->Concepts()) {
    for (int d = 0; d < 4; ++d) {
      ExpansionSpec spec = ExpansionSpec::Default();
      spec.max_depth = d;
      auto small = ontology_->Expand(c.iri, spec);
      spec.max_depth = d + 1;
      auto big = ontology_->Expand(c.iri, spec);
      for (const auto& e : small) {
        EXPECT_NE(std::find(big.begin(), big.end(), e), big.end());
      }
    }
  }
}

TEST_F(BundledOntologyTest, Distances) {
  std::set<Relation> isa{Relation::kIsA};
  EXPECT_EQ(ontology_->Distance(Fma("Liver"), Fma("Liver"), isa), 0);
  EXPECT_EQ(ontology_->Distance(Fma("AxillaryLymphNode"), Fma("MediastinalLymphNode"), isa), 2);
  EXPECT_EQ(ontology_->Distance(Icd("C81"), Icd("C81.1"), isa), 1);
  // Liver and Lung are only connected through isA.
  EXPECT_FALSE(ontology_->Distance(Fma("Liver"), Fma("Lung"), {Relation::kPartOf}));
  // Cross-source pairs are never comparable.
  EXPECT_FALSE(ontology_->Distance(Fma("Liver"), Icd("C22"), isa));
  EXPECT_THROW(ontology_->Distance(Fma("Liver"), Fma("Nope"), isa), Error);
}

TEST_F(BundledOntologyTest, DistanceIsSymmetric) {
  auto concepts = ontology_->Concepts();
  std::set<Relation> both{Relation::kIsA, Relation::kPartOf};
  for (const auto& a : concepts) {
    for (const auto& b : concepts) {
      EXPECT_EQ(ontology_->Distance(a.iri, b.iri, both), ontology_->Distance(b.iri, a.iri, both));
    }
  }
}

TEST_F(BundledOntologyTest, Neighbors) {
  auto liver = ontology_->Neighbors(Fma("Liver"));
  EXPECT_EQ(liver.subject.label, "Liver");
  EXPECT_EQ(liver.source, ConceptSource::kAnatomy);
  ASSERT_EQ(liver.wholes.size(), 1u);
  EXPECT_EQ(liver.wholes[0].iri, Fma("Abdomen"));
  EXPECT_EQ(liver.wholes[0].label, "Abdomen");
  EXPECT_TRUE(ontology_->Neighbors(Fma("AnatomicalEntity")).parents.empty());
  EXPECT_THROW(ontology_->Neighbors(Fma("Nope")), Error);
}

TEST_F(BundledOntologyTest, NeighborsReconstructIsAEdges) {
  std::set<std::pair<Term, Term>> from_parents, from_children, raw;
  for (const auto& c : ontology_->Concepts()) {
    auto n = ontology_->Neighbors(c.iri);
    for (const auto& p : n.parents) from_parents.emplace(c.iri, p.iri);
    for (const auto& ch : n.children) from_children.emplace(ch.iri, c.iri);
  }
  for (const Triple& t : store_->Match({std::nullopt, vocab::IsA(), std::nullopt})) {
    raw.emplace(t.subject, t.object);
  }
  EXPECT_EQ(from_parents, raw);
  EXPECT_EQ(from_children, raw);
}

// Oracle check on the bundled graph: every concept, depths 0-4, every
// non-empty relation/direction combination.
TEST_F(BundledOntologyTest, ExpandMatchesAllPairsOracle) {
  auto concepts = ontology_->Concepts();
  std::map<Term, std::size_t> index;
  for (std::size_t i = 0; i < concepts.size(); ++i) index[concepts[i].iri] = i;
  auto edges = [&](const Term& pred) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const Triple& t : store_->Match({std::nullopt, pred, std::nullopt})) {
      out.emplace_back(index.at(t.subject), index.at(t.object));
    }
    return out;
  };
  const auto isa = edges(vocab::IsA());
  const auto part = edges(vocab::PartOf());

  for (int rel_mask = 1; rel_mask < 4; ++rel_mask) {
    for (int dir_mask = 1; dir_mask < 4; ++dir_mask) {
      ExpansionSpec spec;
      std::vector<std::pair<std::size_t, std::size_t>> arcs;
      for (int r = 0; r < 2; ++r) {
        if (!(rel_mask & (1 << r))) continue;
        spec.relations.insert(static_cast<Relation>(r));
        for (const auto& [child, parent] : (r == 0 ? isa : part)) {
          if (dir_mask & 1) arcs.emplace_back(parent, child);  // down
          if (dir_mask & 2) arcs.emplace_back(child, parent);  // up
        }
      }
      if (dir_mask & 1) spec.directions.insert(Direction::kDown);
      if (dir_mask & 2) spec.directions.insert(Direction::kUp);
      auto dist = oracle::AllPairsShortest(concepts.size(), arcs);
      for (int depth = 0; depth <= 4; ++depth) {
        spec.max_depth = depth;
        for (std::size_t s = 0; s < concepts.size(); ++s) {
          std::map<Term, int> want;
          for (std::size_t t = 0; t < concepts.size(); ++t) {
            if (dist[s][t] >= 0 && dist[s][t] <= depth) want[concepts[t].iri] = dist[s][t];
          }
          std::map<Term, int> got;
          for (const auto& e : ontology_->Expand(concepts[s].iri, spec)) got[e.ref.iri] = e.distance;
          ASSERT_EQ(got, want) << concepts[s].iri.value() << " depth " << depth;
        }
      }
    }
  }
}

TEST(RandomDagTest, ExpandAndDistanceMatchBruteForce) {
  gen::Rng rng(99);
  for (int round = 0; round < 50; ++round) {
    gen::RandomDag dag = gen::MakeDag(rng, gen::Uniform(rng, 2, 60));
    Ontology o = Ontology::FromStore(dag.store);
    const std::size_t n = dag.nodes.size();

    std::vector<std::pair<std::size_t, std::size_t>> down, undirected;
    for (const auto& [c, p] : dag.isa) {
      down.emplace_back(p, c);
      undirected.emplace_back(p, c);
      undirected.emplace_back(c, p);
    }
    auto down_dist = oracle::AllPairsShortest(n, down);
    auto undirected_dist = oracle::AllPairsShortest(n, undirected);

    for (int depth = 0; depth <= 4; ++depth) {
      for (std::size_t s = 0; s < n; ++s) {
        std::map<Term, int> want;
        for (std::size_t t = 0; t < n; ++t) {
          if (down_dist[s][t] >= 0 && down_dist[s][t] <= depth) want[dag.nodes[t]] = down_dist[s][t];
        }
        std::map<Term, int> got;
        for (const auto& e : o.Expand(dag.nodes[s], {{Relation::kIsA}, {Direction::kDown}, depth}))
          got[e.ref.iri] = e.distance;
        ASSERT_EQ(got, want);
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        int d = undirected_dist[a][b];
        std::optional<int> want;
        if (d >= 0 && d <= Ontology::kDistanceCap) want = d;
        ASSERT_EQ(o.Distance(dag.nodes[a], dag.nodes[b], {Relation::kIsA}), want);
      }
    }
  }
}

TEST(OntologyLoadTest, ConceptWithoutSourceRejected) {
  Store s;
  Term c = Term::Iri("urn:x:c");
  s.Insert({c, vocab::Type(), vocab::Concept()});
  EXPECT_THROW(Ontology::FromStore(s), Error);
  s.Insert({c, vocab::Source(), Term::Literal("astrology")});
  EXPECT_THROW(Ontology::FromStore(s), Error);
}

TEST(OntologyLoadTest, DisjointComponentsHaveNoDistance) {
  gen::Rng rng(1);
  Store s;
  for (const char* name : {"a", "b", "c", "d"}) {
    Term c = Term::Iri(std::string("urn:x:") + name);
    s.Insert({c, vocab::Type(), vocab::Concept()});
    s.Insert({c, vocab::Source(), Term::Literal("imaging")});
  }
  s.Insert({Term::Iri("urn:x:b"), vocab::IsA(), Term::Iri("urn:x:a")});
  s.Insert({Term::Iri("urn:x:d"), vocab::IsA(), Term::Iri("urn:x:c")});
  Ontology o = Ontology::FromStore(s);
  EXPECT_FALSE(o.Distance(Term::Iri("urn:x:a"), Term::Iri("urn:x:d"), {Relation::kIsA}));
  EXPECT_EQ(o.Distance(Term::Iri("urn:x:a"), Term::Iri("urn:x:b"), {Relation::kIsA}), 1);
}

}  // namespace
}  // namespace medico

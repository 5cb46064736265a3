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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "medico/error.h"
#include "medico/store/ntriples.h"
#include "medico/store/sparql.h"
#include "medico/store/triple_store.h"
#include "support/generators.h"
#include "support/oracles.h"
#include "support/query_gen.h"

namespace medico {
namespace {

Term I(const std::string& s) { return Term::Iri(s); }
Triple T(const std::string& s, const std::string& p, const std::string& o) {
  return Triple(I(s), I(p), I(o));
}

TEST(TermTest, RejectsInvalidIris) {
  EXPECT_THROW(Term::Iri(""), Error);
  EXPECT_THROW(Term::Iri("urn:a b"), Error);
  EXPECT_THROW(Term::Iri("no-scheme"), Error);
  EXPECT_NO_THROW(Term::Iri("urn:medico:region:1234"));
}

TEST(TermTest, LiteralSubjectRejected) {
  EXPECT_THROW(Triple(Term::Literal("x"), I("urn:p"), I("urn:o")), Error);
  EXPECT_THROW(Triple(I("urn:s"), Term::Literal("x"), I("urn:o")), Error);
}

TEST(ParseTriplesTest, SingleStatement) {
  auto triples = ParseTriples("<urn:a> <urn:p> <urn:b> .");
  ASSERT_EQ(triples.size(), 1u);
  EXPECT_EQ(triples[0], T("urn:a", "urn:p", "urn:b"));
}

TEST(ParseTriplesTest, PrefixExpansion) {
  auto triples = ParseTriples(
      "@prefix fma: <urn:fma:> .\n"
      "fma:Liver fma:partOf fma:Abdomen .\n");
  ASSERT_EQ(triples.size(), 1u);
  EXPECT_EQ(triples[0], T("urn:fma:Liver", "urn:fma:partOf", "urn:fma:Abdomen"));
}

TEST(ParseTriplesTest, MissingObjectIsErrorAtLine) {
  try {
    ParseTriples("# header\n<urn:a> <urn:p>\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(e.reason().find("object"), std::string::npos);
  }
}

TEST(ParseTriplesTest, LiteralsAndComments) {
  auto triples = ParseTriples(
      "  # comment\n"
      "\n"
      "<urn:a> <urn:p> \"say \\\"hi\\\"\\n\" . # trailing\n"
      "<urn:a> <urn:q> \"0.9\"^^xsd:decimal .\n"
      "<urn:a> <urn:r> \"caf\\u00E9\" .\n");
  ASSERT_EQ(triples.size(), 3u);
  EXPECT_EQ(triples[0].object, Term::Literal("say \"hi\"\n"));
  EXPECT_EQ(triples[1].object,
            Term::Literal("0.9", "http://www.w3.org/2001/XMLSchema#decimal"));
  EXPECT_EQ(triples[2].object.value(), "caf\xC3\xA9");
}

TEST(ParseTriplesTest, Errors) {
  EXPECT_THROW(ParseTriples("<urn:a> <urn:p> <urn:b>"), ParseError);
  EXPECT_THROW(ParseTriples("\"lit\" <urn:p> <urn:b> ."), ParseError);
  EXPECT_THROW(ParseTriples("<urn:a> <urn:p> undeclared:x ."), ParseError);
  EXPECT_THROW(ParseTriples("<urn:a> <urn:p> \"open ."), ParseError);
  EXPECT_THROW(ParseTriples("<urn:a> <urn:p> \"x\"@en ."), ParseError);
  EXPECT_THROW(ParseTriples("<urn:a> <urn:p> <urn:b> . junk"), ParseError);
  EXPECT_THROW(ParseTriples("@base <urn:x> ."), ParseError);
}

TEST(StoreTest, SetSemantics) {
  Store s;
  Triple t = T("urn:a", "urn:p", "urn:b");
  EXPECT_TRUE(s.Insert(t));
  EXPECT_FALSE(s.Insert(t));
  EXPECT_EQ(s.size(), 1u);
}

TEST(StoreTest, RemoveAbsentIsNoOp) {
  Store s;
  s.Insert(T("urn:a", "urn:p", "urn:b"));
  Store before = s;
  EXPECT_FALSE(s.Remove(T("urn:x", "urn:p", "urn:b")));
  EXPECT_EQ(s, before);
}

TEST(StoreTest, InsertThenRemoveRestoresOriginal) {
  Store s;
  s.Insert(T("urn:a", "urn:p", "urn:b"));
  Store before = s;
  Triple t = T("urn:c", "urn:p", "urn:d");
  s.Insert(t);
  s.Remove(t);
  EXPECT_EQ(s, before);
  EXPECT_TRUE(s.Match({std::nullopt, std::nullopt, I("urn:d")}).empty());
}

TEST(StoreTest, MatchOnEmptyStore) {
  Store s;
  EXPECT_TRUE(s.Match({}).empty());
}

TEST(StoreTest, MatchBySubject) {
  Store s;
  s.Insert(T("urn:a", "urn:p", "urn:b"));
  s.Insert(T("urn:c", "urn:p", "urn:d"));
  auto m = s.Match({I("urn:a"), std::nullopt, std::nullopt});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], T("urn:a", "urn:p", "urn:b"));
}

// Every pattern shape, against a linear scan over 1000 random triples.
TEST(StoreTest, IndexCoherenceAgainstLinearScan) {
  gen::Rng rng(7);
  auto triples = gen::RandomTriples(rng, 1000, 30, 5);
  Store s = gen::StoreOf(triples);
  std::vector<Triple> all = s.Triples();
  ASSERT_EQ(all.size(), s.size());

  for (int round = 0; round < 200; ++round) {
    const Triple& probe = triples[gen::Uniform(rng, 0, triples.size() - 1)];
    for (int shape = 0; shape < 8; ++shape) {
      MatchPattern p;
      if (shape & 1) p.subject = gen::Coin(rng, 0.8) ? probe.subject : gen::NodeIri(99);
      if (shape & 2) p.predicate = probe.predicate;
      if (shape & 4) p.object = probe.object;
      auto got = s.Match(p);
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, oracle::LinearScan(all, p)) << "shape " << shape;
    }
  }
}

TEST(StoreTest, RandomInsertRemoveKeepsIndexesCoherent) {
  gen::Rng rng(11);
  Store s;
  std::set<Triple> model;
  for (int i = 0; i < 2000; ++i) {
    auto t = gen::RandomTriples(rng, 1, 6, 2)[0];
    if (gen::Coin(rng, 0.6)) {
      EXPECT_EQ(s.Insert(t), model.insert(t).second);
    } else {
      EXPECT_EQ(s.Remove(t), model.erase(t) == 1);
    }
    ASSERT_EQ(s.size(), model.size());
  }
  std::vector<Triple> expected(model.begin(), model.end());
  EXPECT_EQ(s.Triples(), expected);
  for (const Triple& t : expected) {
    EXPECT_EQ(s.Match({std::nullopt, t.predicate, t.object}),
              oracle::LinearScan(expected, {std::nullopt, t.predicate, t.object}));
    EXPECT_EQ(s.Match({t.subject, std::nullopt, t.object}),
              oracle::LinearScan(expected, {t.subject, std::nullopt, t.object}));
  }
}

TEST(SharedStoreTest, ConcurrentReadersSeeAtomicWrites) {
  SharedStore shared;
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::thread writer([&] {
    for (int i = 0; i < 500; ++i) {
      shared.Write([&](Store& s) {
        s.Insert(T("urn:a" + std::to_string(i), "urn:p", "urn:b"));
        s.Insert(T("urn:a" + std::to_string(i), "urn:q", "urn:b"));
      });
    }
    done = true;
  });
  std::thread reader([&] {
    while (!done) {
      shared.Read([&](const Store& s) {
        if (s.size() % 2 != 0) ++torn;
        return 0;
      });
    }
  });
  writer.join();
  reader.join();
  EXPECT_EQ(torn.load(), 0);
  EXPECT_EQ(shared.Copy().size(), 1000u);
}

// ---------------------------------------------------------------------------
// Serialization and snapshots.

TEST(SnapshotTest, ParseSerializeRoundTrip) {
  gen::Rng rng(3);
  auto triples = gen::RandomTriples(rng, 200);
  triples.emplace_back(I("urn:x"), I("urn:p"), Term::Literal("tab\there \"q\" \\ back\nnl"));
  Store s = gen::StoreOf(triples);
  auto all = s.Triples();
  auto reparsed = ParseTriples(SerializeTriples(all));
  EXPECT_EQ(reparsed, all);
}

class SnapshotFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("medico_store_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(SnapshotFileTest, EmptyStoreRoundTrip) {
  Snapshot(Store{}, dir_ / "empty.nt");
  EXPECT_TRUE(LoadStore(dir_ / "empty.nt").empty());
}

TEST_F(SnapshotFileTest, FiveHundredTriplesRoundTrip) {
  gen::Rng rng(5);
  Store s = gen::StoreOf(gen::RandomTriples(rng, 500, 200, 7));
  Snapshot(s, dir_ / "s.nt");
  Store loaded = LoadStore(dir_ / "s.nt");
  EXPECT_EQ(loaded, s);
  EXPECT_EQ(loaded.Triples(), s.Triples());
}

TEST_F(SnapshotFileTest, MalformedLineNamed) {
  std::ofstream(dir_ / "bad.nt") << "<urn:a> <urn:p> <urn:b> .\n"
                                  << "<urn:a> <urn:p> <urn:c> .\n"
                                  << "<urn:a> <urn:p>\n";
  try {
    LoadStore(dir_ / "bad.nt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("bad.nt"), std::string::npos);
  }
}

TEST_F(SnapshotFileTest, MissingFileIsIoError) {
  try {
    LoadStore(dir_ / "nope.nt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("nope.nt"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// SPARQL subset.

TEST(ParseQueryTest, SimpleSelect) {
  auto q = sparql::ParseQuery("SELECT ?x WHERE { ?x <urn:p> <urn:b> . }");
  EXPECT_EQ(q.variables, std::vector<std::string>{"x"});
  ASSERT_EQ(q.patterns.size(), 1u);
  EXPECT_EQ(std::get<sparql::Variable>(q.patterns[0].subject).name, "x");
  EXPECT_EQ(std::get<Term>(q.patterns[0].object), I("urn:b"));
  EXPECT_FALSE(q.limit);
}

TEST(ParseQueryTest, PrefixFilterLimit) {
  auto q = sparql::ParseQuery(
      "PREFIX m: <urn:m:> SELECT ?s ?o WHERE { ?s m:p ?o . FILTER(?o = m:v) } LIMIT 5");
  EXPECT_EQ(q.variables, (std::vector<std::string>{"s", "o"}));
  ASSERT_EQ(q.filters.size(), 1u);
  EXPECT_EQ(q.filters[0].variable, "o");
  EXPECT_EQ(q.filters[0].value, I("urn:m:v"));
  EXPECT_EQ(std::get<Term>(q.patterns[0].predicate), I("urn:m:p"));
  EXPECT_EQ(q.limit, 5u);
}

TEST(ParseQueryTest, OptionalIsUnsupported) {
  try {
    sparql::ParseQuery("SELECT ?x WHERE { ?x <urn:p> ?y . OPTIONAL { ?y <urn:q> ?z } }");
    FAIL();
  } catch (const UnsupportedFeatureError& e) {
    EXPECT_EQ(e.keyword(), "OPTIONAL");
    EXPECT_EQ(e.code(), ErrorCode::kUnsupported);
  }
}

TEST(ParseQueryTest, OtherUnsupportedFeatures) {
  auto keyword = [](const std::string& text) -> std::string {
    try {
      sparql::ParseQuery(text);
    } catch (const UnsupportedFeatureError& e) {
      return e.keyword();
    }
    return "<accepted>";
  };
  EXPECT_EQ(keyword("SELECT ?x WHERE { { ?x <urn:p> ?y } UNION { ?x <urn:q> ?y } }"),
            "nested group pattern");
  EXPECT_EQ(keyword("SELECT ?x WHERE { ?x <urn:p> ?y } ORDER BY ?x"), "ORDER");
  EXPECT_EQ(keyword("SELECT ?x WHERE { ?x <urn:p>/<urn:q> ?y }"), "property path");
  EXPECT_EQ(keyword("SELECT ?x WHERE { ?x <urn:p> ?y . FILTER(regex(?y, \"a\")) }"), "REGEX");
  EXPECT_EQ(keyword("SELECT ?x WHERE { ?x <urn:p> ?y . FILTER(?y != <urn:a>) }"),
            "FILTER operator !");
  EXPECT_EQ(keyword("ASK { ?x <urn:p> ?y }"), "ASK");
  EXPECT_EQ(keyword("SELECT ?x WHERE { ?x <urn:p> ?y ; <urn:q> ?z }"), "predicate-object list ';'");
  EXPECT_EQ(keyword("SELECT ?x WHERE { ?x <urn:p> ?y } OFFSET 3"), "OFFSET");
}

TEST(ParseQueryTest, SyntaxErrorsCarryPosition) {
  try {
    sparql::ParseQuery("SELECT ?x WHERE { ?x <urn:p> }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 29u);
  }
  EXPECT_THROW(sparql::ParseQuery("SELECT ?z WHERE { ?x <urn:p> ?y }"), ParseError);
  EXPECT_THROW(sparql::ParseQuery("SELECT ?x WHERE { }"), ParseError);
  EXPECT_THROW(sparql::ParseQuery("SELECT ?x WHERE { ?x <urn:p> ?y } LIMIT 0"), ParseError);
  EXPECT_THROW(sparql::ParseQuery("SELECT ?x WHERE { ?x nope:p ?y }"), ParseError);
  EXPECT_THROW(sparql::ParseQuery("SELECT ?x { \"s\" <urn:p> ?x }"), ParseError);
}

TEST(ParseQueryTest, SelectStarAndShorthands) {
  auto q = sparql::ParseQuery(
      "select * where { ?img a medico:Image . ?s medico:hasImage ?img . ?s <urn:n> 3 }");
  EXPECT_TRUE(q.select_all);
  EXPECT_EQ(q.variables, (std::vector<std::string>{"img", "s"}));
  EXPECT_EQ(std::get<Term>(q.patterns[0].predicate),
            I("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"));
  EXPECT_EQ(std::get<Term>(q.patterns[2].object),
            Term::Literal("3", "http://www.w3.org/2001/XMLSchema#integer"));
}

TEST(EvaluateTest, EmptyStore) {
  auto q = sparql::ParseQuery("SELECT * WHERE { ?s ?p ?o }");
  EXPECT_TRUE(sparql::Evaluate(Store{}, q).empty());
}

TEST(EvaluateTest, TwoHopChain) {
  Store s;
  s.Insert(T("urn:a", "urn:p", "urn:b"));
  s.Insert(T("urn:b", "urn:p", "urn:c"));
  auto q = sparql::ParseQuery(
      "PREFIX : <urn:> SELECT ?x WHERE { ?x :p ?y . ?y :p ?z . }");
  auto result = sparql::Evaluate(s, q);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result.rows[0][0], I("urn:a"));
  EXPECT_EQ(sparql::FormatSolutions(result), "?x\n<urn:a>\n");
}

TEST(EvaluateTest, RepeatedVariableWithinPattern) {
  Store s;
  s.Insert(T("urn:a", "urn:p", "urn:a"));
  s.Insert(T("urn:a", "urn:p", "urn:b"));
  auto result = sparql::Evaluate(s, sparql::ParseQuery("SELECT ?x { ?x <urn:p> ?x }"));
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result.rows[0][0], I("urn:a"));
}

TEST(EvaluateTest, DistinctSortedLimited) {
  Store s;
  for (int i = 9; i >= 0; --i) {
    s.Insert(T("urn:s" + std::to_string(i), "urn:p", "urn:o1"));
    s.Insert(T("urn:s" + std::to_string(i), "urn:p", "urn:o2"));
  }
  auto result = sparql::Evaluate(s, sparql::ParseQuery("SELECT ?s { ?s <urn:p> ?o } LIMIT 3"));
  ASSERT_EQ(result.size(), 3u);
  EXPECT_EQ(result.rows[0][0], I("urn:s0"));
  EXPECT_EQ(result.rows[1][0], I("urn:s1"));
  EXPECT_EQ(result.rows[2][0], I("urn:s2"));
}

TEST(EvaluateTest, MatchesNestedLoopOracleOnRandomStores) {
  gen::Rng rng(2024);
  int nonempty = 0;
  for (int store_i = 0; store_i < 100; ++store_i) {
    const std::size_t nodes = gen::Uniform(rng, 3, 8);
    Store s = gen::StoreOf(gen::RandomTriples(rng, gen::Uniform(rng, 0, 50), nodes, 3));
    auto all = s.Triples();
    for (int qi = 0; qi < 5; ++qi) {
      std::string text = gen::RandomQueryText(rng, nodes);
      auto q = sparql::ParseQuery(text);
      auto got = sparql::Evaluate(s, q);
      auto want = oracle::NestedLoop(all, q);
      ASSERT_EQ(got.variables, want.variables) << text;
      ASSERT_EQ(got.rows, want.rows) << text;
      if (!got.empty()) ++nonempty;
    }
  }
  EXPECT_GT(nonempty, 100);
}

}  // namespace
}  // namespace medico

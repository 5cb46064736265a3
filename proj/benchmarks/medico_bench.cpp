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

#include <benchmark/benchmark.h>

#include "medico/dialogue/dialogue.h"
#include "medico/dicom/dicom.h"
#include "medico/search/search.h"
#include "medico/server/demo.h"
#include "medico/server/engine.h"
#include "medico/store/sparql.h"
#include "support/dicom_gen.h"
#include "support/generators.h"
#include "support/temp_dir.h"
#include "support/world.h"

namespace medico {
namespace {

void BM_StoreMatchBySubject(benchmark::State& state) {
  gen::Rng rng(1);
  const auto nodes = static_cast<std::size_t>(state.range(0) / 4 + 1);
  Store s = gen::StoreOf(gen::RandomTriples(rng, static_cast<std::size_t>(state.range(0)), nodes, 5));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.Match({gen::NodeIri(i++ % nodes), std::nullopt, std::nullopt}));
  }
}
BENCHMARK(BM_StoreMatchBySubject)->Arg(1000)->Arg(100000);

void BM_SparqlThreePatternJoin(benchmark::State& state) {
  Store s = testing::BaseStore(static_cast<int>(state.range(0)));
  auto q = sparql::ParseQuery(
      "SELECT ?p ?i WHERE { ?p medico:hasStudy ?st . ?st medico:hasSeries ?se . "
      "?se medico:hasImage ?i }");
  for (auto _ : state) benchmark::DoNotOptimize(sparql::Evaluate(s, q));
}
BENCHMARK(BM_SparqlThreePatternJoin)->Arg(10)->Arg(200);

void BM_ExpandBundled(benchmark::State& state) {
  Store s;
  LoadBundledOntologies(s);
  Ontology o = Ontology::FromStore(s);
  ExpansionSpec spec = ExpansionSpec::Default();
  spec.max_depth = static_cast<int>(state.range(0));
  const Term start = Term::Iri("urn:fma:LymphNode");
  for (auto _ : state) benchmark::DoNotOptimize(o.Expand(start, spec));
}
BENCHMARK(BM_ExpandBundled)->DenseRange(0, 4);

// One annotated region per patient, three query terms.
void BM_SemanticSearch(benchmark::State& state) {
  const int patients = static_cast<int>(state.range(0));
  SharedStore store(testing::BaseStore(patients));
  Ontology o = Ontology::FromStore(store.Copy());
  annotation::AnnotationService service(
      store, o, annotation::FixedClock(annotation::ParseTimestamp("2010-03-10T09:00:00Z")), 1);
  const char* anatomy[] = {"LymphNode", "CervicalLymphNode", "Liver", "Spleen"};
  for (int p = 1; p <= patients; ++p) {
    Term region = service.CreateRegion(testing::ImageT(p, 1, 1), annotation::Rect{1, 1, 5, 5}).id;
    annotation::Payload pl;
    pl.user = "bench";
    pl.anatomy = testing::Fma(anatomy[p % 4]);
    pl.disease = testing::Icd(p % 2 ? "C81" : "C83");
    pl.confidence = 0.5 + 0.01 * (p % 50);
    service.Annotate(region, pl);
  }
  auto built = search::BuildQuery(o, {"lymph node", "Hodgkin lymphoma", "hyperintense"});
  Store snapshot = store.Copy();
  for (auto _ : state) benchmark::DoNotOptimize(search::SemanticSearch(snapshot, o, built.query));
  state.SetComplexityN(patients);
}
BENCHMARK(BM_SemanticSearch)->RangeMultiplier(10)->Range(10, 1000)->Complexity();

void BM_Unify(benchmark::State& state) {
  const auto& h = dialogue::BundledHierarchy();
  auto a = dialogue::FeatureStructure::Parse(
      "[Annotate REGION: [region-ref ID: [iri], VIA: [string]], DISEASE: [disease-concept]]");
  auto b = dialogue::FeatureStructure::Parse("[Annotate REGION: [region-ref]]");
  for (auto _ : state) benchmark::DoNotOptimize(dialogue::Unify(h, a, b));
}
BENCHMARK(BM_Unify);

void BM_DicomParse(benchmark::State& state) {
  gen::Rng rng(3);
  dicom::FixtureOptions options;
  options.include_pixel_data = true;
  options.include_sequence = true;
  auto bytes = dicom::WriteFixture(gen::RandomMetadata(rng), options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dicom::ExtractMetadata(dicom::ParseFile(bytes)));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_DicomParse);

// Parse, fuse and execute one spoken request against the demo cohort.
void BM_DialogueTurn(benchmark::State& state) {
  testing::ScopedDir dir("bench");
  server::Config config;
  config.data_dir = dir.path();
  config.demo_seed = server::kDefaultDemoSeed;
  config.clock = std::string(server::kDemoClock);
  auto engine = server::Engine::Open(config);
  for (auto _ : state) {
    dialogue::DialogueState session;
    benchmark::DoNotOptimize(engine->dialogue().Turn(
        session, "Find similar lesions with characteristics: hyper-intense and/or coarse texture.", {}));
  }
}
BENCHMARK(BM_DialogueTurn);

}  // namespace
}  // namespace medico

BENCHMARK_MAIN();

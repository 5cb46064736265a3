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
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "medico/annotation/annotation.h"
#include "medico/error.h"
#include "medico/store/ntriples.h"
#include "medico/store/sparql.h"
#include "medico/vocab.h"
#include "support/generators.h"
#include "support/world.h"

namespace medico::annotation {
namespace {

namespace fs = std::filesystem;
using testing::Fma;
using testing::Icd;
using testing::ImageT;
using testing::RadLex;
using testing::SeriesT;

std::chrono::system_clock::time_point At(const char* iso) { return ParseTimestamp(iso); }

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kConfig;
}

std::string SnapshotText(const Store& s) {
  std::ostringstream out;
  Snapshot(s, out);
  return out.str();
}

// Ontology + DICOM cohort + service with a manually advanced clock.
struct World {
  explicit World(AnnotationLog* log = nullptr, std::uint64_t seed = 1)
      : base(testing::BaseStore()),
        store(base),
        ontology(Ontology::FromStore(base)),
        service(store, ontology, [this] { return now; }, seed, log) {}

  Store base;
  SharedStore store;
  Ontology ontology;
  std::chrono::system_clock::time_point now = At("2010-03-10T09:00:00Z");
  AnnotationService service;
};

Payload Manual(double confidence = 1.0) {
  Payload p;
  p.user = "dr.keller";
  p.confidence = confidence;
  return p;
}

fs::path TempFile(const std::string& name) {
  return fs::temp_directory_path() / ("medico_" + std::to_string(::getpid()) + "_" + name);
}

TEST(Geometry, FormatParseRoundTrip) {
  std::vector<Geometry> cases = {Rect{10, 10, 50, 40}, Polygon{{{0, 0}, {10, 0}, {5, 8}}},
                                 Box3d{1, 2, 3, 4, 5, 6}};
  for (const Geometry& g : cases) EXPECT_EQ(ParseGeometry(FormatGeometry(g)), g);
  EXPECT_EQ(FormatGeometry(Rect{10, 10, 50, 40}), "rect:10,10,50,40");
  EXPECT_EQ(FormatGeometry(Polygon{{{0, 0}, {10, 0}, {5, 8}}}), "poly:0 0;10 0;5 8");
  EXPECT_EQ(FormatGeometry(Box3d{1, 2, 3, 4, 5, 6}), "box:1,2,3,4,5,6");
}

TEST(Geometry, DegenerateShapesAreRejected) {
  for (const char* bad : {"rect:10,10,0,40", "rect:10,10,5", "rect:a,1,1,1", "rect:-1,0,2,2",
                          "poly:0 0;1 1", "poly:0 0;1 1;0 0", "box:0,0,0,1,1,0", "circle:1",
                          "rect:1,1,1,1 ", ""}) {
    EXPECT_EQ(CodeOf([&] { ParseGeometry(bad); }), ErrorCode::kValidation) << bad;
  }
}

TEST(Geometry, Centroids) {
  EXPECT_EQ(Centroid(Rect{10, 10, 50, 40}), (Point3{35, 30, 0}));
  EXPECT_EQ(Centroid(Box3d{0, 0, 0, 2, 4, 6}), (Point3{1, 2, 3}));
  EXPECT_EQ(Centroid(Polygon{{{0, 0}, {6, 0}, {0, 3}}}), (Point3{2, 1, 0}));
}

TEST(Formatting, DecimalsAreShortestAndPlain) {
  EXPECT_EQ(FormatDecimal(0.9), "0.9");
  EXPECT_EQ(FormatDecimal(1.0), "1");
  EXPECT_EQ(FormatDecimal(0.0), "0");
  EXPECT_EQ(FormatDecimal(0.95), "0.95");
  EXPECT_EQ(FormatDecimal(1e-7), "0.0000001");
}

TEST(Formatting, Timestamps) {
  auto t = At("2010-03-10T09:00:00Z");
  EXPECT_EQ(FormatTimestamp(t), "2010-03-10T09:00:00Z");
  EXPECT_EQ(FormatTimestamp(At("2010-03-10T09:00:01.250Z")), "2010-03-10T09:00:01Z");
  EXPECT_EQ(CodeOf([] { ParseTimestamp("2010-02-30T00:00:00Z"); }), ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { ParseTimestamp("2010-03-10 09:00"); }), ErrorCode::kValidation);
}

TEST(Formatting, IdsAreSeededUuids) {
  IdGenerator a(5), b(5), c(6);
  std::string first = a.Next();
  EXPECT_EQ(first, b.Next());
  EXPECT_NE(first, c.Next());
  EXPECT_TRUE(std::regex_match(
      first, std::regex("[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12}")));
  EXPECT_NE(first, a.Next());
}

TEST(Regions, RectangleOnImage) {
  World w;
  Region r = w.service.CreateRegion(ImageT(1, 1, 1), Rect{10, 10, 50, 40});
  w.store.Read([&](const Store& s) {
    EXPECT_EQ(s.Match({r.id, vocab::RegionOf(), std::nullopt}).size(), 1u);
    EXPECT_FALSE(s.Contains({r.id, vocab::Type(), vocab::VolumeRegion()}));
  });
  EXPECT_EQ(w.service.GetRegion(r.id), r);
}

TEST(Regions, Errors) {
  World w;
  EXPECT_EQ(CodeOf([&] { w.service.CreateRegion(ImageT(1, 1, 1), Rect{10, 10, 0, 40}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { w.service.CreateRegion(Term::Iri("urn:x:nothing"), Rect{1, 1, 1, 1}); }),
            ErrorCode::kNotFound);
  EXPECT_EQ(CodeOf([&] { w.service.CreateRegion(ImageT(1, 1, 1), Box3d{1, 1, 1, 1, 1, 1}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { w.service.CreateRegion(SeriesT(1, 1), Rect{1, 1, 1, 1}); }),
            ErrorCode::kValidation);
}

TEST(Regions, BoxOnSeriesIsVolumeRegion) {
  World w;
  Region r = w.service.CreateRegion(SeriesT(1, 1), Box3d{0, 0, 0, 10, 10, 10});
  EXPECT_TRUE(w.store.Read([&](const Store& s) {
    return s.Contains({r.id, vocab::Type(), vocab::VolumeRegion()}) &&
           s.Contains({r.id, vocab::Type(), vocab::ImageRegion()});
  }));
}

TEST(Annotate, HodgkinInLymphNode) {
  World w;
  Region r = w.service.CreateRegion(ImageT(1, 1, 1), Rect{10, 10, 50, 40});
  Payload p = Manual(0.9);
  p.anatomy = Fma("LymphNode");
  p.disease = Icd("C81");
  AnnotateResult res = w.service.Annotate(r.id, p);
  EXPECT_EQ(res.confirmation, "Hodgkin lymphoma in lymph node");
  EXPECT_EQ(res.annotation.confidence, 0.9);
  EXPECT_EQ(res.annotation.provenance.user, "dr.keller");
  EXPECT_EQ(res.annotation.provenance.timestamp, "2010-03-10T09:00:00Z");
  EXPECT_EQ(res.annotation.provenance.origin, Origin::kManual);
  EXPECT_EQ(w.service.GetAnnotation(res.annotation.id), res.annotation);
}

TEST(Annotate, ValidationErrors) {
  World w;
  Region r = w.service.CreateRegion(ImageT(1, 1, 1), Rect{10, 10, 50, 40});
  Payload p = Manual(1.5);
  p.disease = Icd("C81");
  EXPECT_EQ(CodeOf([&] { w.service.Annotate(r.id, p); }), ErrorCode::kValidation);
  p.confidence = -0.1;
  EXPECT_EQ(CodeOf([&] { w.service.Annotate(r.id, p); }), ErrorCode::kValidation);
  p.confidence = std::nan("");
  EXPECT_EQ(CodeOf([&] { w.service.Annotate(r.id, p); }), ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { w.service.Annotate(r.id, Manual()); }), ErrorCode::kValidation);
  Payload wrong = Manual();
  wrong.anatomy = Icd("C81");
  EXPECT_EQ(CodeOf([&] { w.service.Annotate(r.id, wrong); }), ErrorCode::kValidation);
  Payload anonymous;
  anonymous.disease = Icd("C81");
  EXPECT_EQ(CodeOf([&] { w.service.Annotate(r.id, anonymous); }), ErrorCode::kValidation);
  p.confidence = 1.0;
  EXPECT_EQ(CodeOf([&] { w.service.Annotate(Term::Iri("urn:medico:region:none"), p); }),
            ErrorCode::kNotFound);
  // Nothing was written by the failed calls.
  EXPECT_TRUE(w.service.ListAnnotations({}).empty());
}

TEST(Annotate, FreeTextOnlyHasUnspecifiedLocation) {
  World w;
  Region r = w.service.CreateRegion(ImageT(1, 1, 1), Rect{10, 10, 50, 40});
  Payload p = Manual();
  p.free_text_value = "23 mm";
  EXPECT_EQ(w.service.Annotate(r.id, p).confirmation, "23 mm in unspecified location");
}

TEST(Annotate, ContextFromNearestAnnotatedRegion) {
  World w;
  Region near = w.service.CreateRegion(ImageT(1, 1, 1), Rect{100, 100, 10, 10});
  Region far = w.service.CreateRegion(ImageT(1, 1, 1), Rect{400, 400, 10, 10});
  Region other_image = w.service.CreateRegion(ImageT(1, 1, 2), Rect{120, 120, 10, 10});
  Payload a = Manual();
  a.anatomy = Fma("Spleen");
  w.service.Annotate(near.id, a);
  a.anatomy = Fma("Liver");
  w.service.Annotate(far.id, a);
  a.anatomy = Fma("Colon");
  w.service.Annotate(other_image.id, a);

  Region probe = w.service.CreateRegion(ImageT(1, 1, 1), Rect{110, 110, 20, 20});
  Payload v = Manual();
  v.visual = {RadLex("Hyperintense"), RadLex("CoarseTexture")};
  EXPECT_EQ(w.service.Annotate(probe.id, v).confirmation,
            "coarse texture and hyperintense in spleen");
}

TEST(Annotate, StenosisNearCoronaryLandmark) {
  World w;
  w.service.AddLandmark(SeriesT(1, 1), Fma("ProximalSegmentOfRightCoronaryArtery"),
                        {200, 180, 40}, 0.8);
  w.service.AddLandmark(SeriesT(1, 1), Fma("ApexOfHeart"), {320, 160, 60}, 0.9);
  Region r = w.service.CreateRegion(ImageT(1, 1, 1), Rect{190, 170, 20, 20});
  Payload p = Manual(0.7);
  p.visual = {RadLex("ModerateStenosis")};
  EXPECT_EQ(w.service.Annotate(r.id, p).confirmation,
            "moderate stenosis in proximal segment of the right coronary artery");
}

TEST(Supersede, VisibilityAndConflict) {
  World w;
  Region r = w.service.CreateRegion(ImageT(1, 1, 1), Rect{10, 10, 50, 40});
  Payload p = Manual(0.6);
  p.disease = Icd("C81");
  Annotation old = w.service.Annotate(r.id, p).annotation;
  w.now += std::chrono::seconds(5);
  p.disease = Icd("C81.1");
  p.confidence = 0.8;
  Annotation fresh = w.service.Supersede(old.id, p).annotation;
  EXPECT_EQ(fresh.region, r.id);

  auto visible = w.service.ListAnnotations({});
  ASSERT_EQ(visible.size(), 1u);
  EXPECT_EQ(visible[0].id, fresh.id);

  AnnotationFilter all;
  all.include_superseded = true;
  auto both = w.service.ListAnnotations(all);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].id, old.id);
  EXPECT_EQ(both[0].superseded_by, fresh.id);
  EXPECT_EQ(both[0].confidence, 0.6);  // old value untouched

  EXPECT_EQ(CodeOf([&] { w.service.Supersede(old.id, p); }), ErrorCode::kConflict);
  EXPECT_EQ(CodeOf([&] { w.service.Supersede(Term::Iri("urn:x:none"), p); }),
            ErrorCode::kNotFound);
}

TEST(List, Filters) {
  World w;
  EXPECT_TRUE(w.service.ListAnnotations({}).empty());
  Region r1 = w.service.CreateRegion(ImageT(1, 2, 1), Rect{10, 10, 5, 5});
  Region r2 = w.service.CreateRegion(ImageT(2, 1, 1), Rect{10, 10, 5, 5});
  Payload p = Manual();
  p.anatomy = Fma("Liver");
  Annotation a1 = w.service.Annotate(r1.id, p).annotation;
  Annotation a2 = w.service.Annotate(r2.id, p).annotation;

  AnnotationFilter f;
  f.patient = testing::PatientT(1);
  auto got = w.service.ListAnnotations(f);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].id, a1.id);

  f = {};
  f.study = testing::StudyT(2);
  got = w.service.ListAnnotations(f);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].id, a2.id);

  f = {};
  f.region = r2.id;
  EXPECT_EQ(w.service.ListAnnotations(f).size(), 1u);

  w.service.MockAutoAnnotate(SeriesT(1, 1), 42);
  f = {};
  f.origin = Origin::kAutomatic;
  got = w.service.ListAnnotations(f);
  EXPECT_EQ(got.size(), 7u);
  for (const auto& a : got) EXPECT_EQ(a.provenance.user, "volume-parser");
  f.origin = Origin::kManual;
  EXPECT_EQ(w.service.ListAnnotations(f).size(), 2u);
}

TEST(Mock, CountsAndRanges) {
  World w;
  MockResult m = w.service.MockAutoAnnotate(SeriesT(1, 1), 42);
  ASSERT_EQ(m.landmarks.size(), 19u);
  ASSERT_EQ(m.organ_annotations.size(), 7u);
  ASSERT_EQ(m.regions.size(), 7u);
  for (std::size_t i = 0; i < m.landmarks.size(); ++i) {
    const Landmark& lm = m.landmarks[i];
    EXPECT_EQ(lm.name.iri, MockLandmarkNames()[i]);
    EXPECT_EQ(lm.name.source, ConceptSource::kAnatomy);
    EXPECT_GE(lm.confidence, 0.5);
    EXPECT_LT(lm.confidence, 1.0);
    EXPECT_TRUE(lm.position.x >= 0 && lm.position.x < 512);
    EXPECT_TRUE(lm.position.z >= 0 && lm.position.z < 400);
  }
  for (std::size_t i = 0; i < 7; ++i) {
    const Annotation& a = m.organ_annotations[i];
    EXPECT_EQ(a.anatomy->iri, MockOrganNames()[i]);
    EXPECT_EQ(a.provenance.origin, Origin::kAutomatic);
    EXPECT_TRUE(a.free_text_comment.has_value());
    EXPECT_GE(a.confidence, 0.5);
    EXPECT_LT(a.confidence, 1.0);
    EXPECT_TRUE(IsVolumetric(m.regions[i].geometry));
    EXPECT_EQ(w.service.GetAnnotation(a.id), a);
  }
}

TEST(Mock, DeterministicPerSeed) {
  World w1, w2;
  MockResult a = w1.service.MockAutoAnnotate(SeriesT(1, 1), 42);
  MockResult b = w2.service.MockAutoAnnotate(SeriesT(1, 1), 42);
  EXPECT_EQ(a.landmarks, b.landmarks);
  EXPECT_EQ(a.regions, b.regions);
  EXPECT_EQ(a.organ_annotations, b.organ_annotations);
  EXPECT_EQ(SnapshotText(w1.store.Copy()), SnapshotText(w2.store.Copy()));

  // Re-running is a no-op returning the same result.
  std::string before = SnapshotText(w1.store.Copy());
  w1.now += std::chrono::hours(1);
  MockResult again = w1.service.MockAutoAnnotate(SeriesT(1, 1), 42);
  EXPECT_EQ(again.landmarks, a.landmarks);
  EXPECT_EQ(again.organ_annotations, a.organ_annotations);
  EXPECT_EQ(SnapshotText(w1.store.Copy()), before);

  MockResult c = w1.service.MockAutoAnnotate(SeriesT(1, 1), 43);
  EXPECT_EQ(c.landmarks.size(), 19u);
  EXPECT_EQ(c.organ_annotations.size(), 7u);
  int moved = 0;
  for (std::size_t i = 0; i < 19; ++i) moved += !(c.landmarks[i].position == a.landmarks[i].position);
  EXPECT_GT(moved, 0);
}

TEST(Mock, UnknownVolume) {
  World w;
  EXPECT_EQ(CodeOf([&] { w.service.MockAutoAnnotate(ImageT(1, 1, 1), 1); }), ErrorCode::kNotFound);
}

TEST(Log, UncommittedTailIsIgnored) {
  fs::path path = TempFile("tail.log");
  fs::remove(path);
  {
    AnnotationLog log(path);
    log.Append({{Term::Iri("urn:a"), Term::Iri("urn:p"), Term::Literal("x")}});
    log.Append({{Term::Iri("urn:b"), Term::Iri("urn:p"), Term::Literal("y")}});
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "<urn:c> <urn:p> \"z\" .\n<urn:d> <urn:p";  // crash mid-batch
  }
  auto batches = AnnotationLog::Replay(path);
  ASSERT_EQ(batches.size(), 2u);
  EXPECT_EQ(batches[1][0].subject, Term::Iri("urn:b"));
  fs::remove(path);
  EXPECT_TRUE(AnnotationLog::Replay(path).empty());
}

TEST(Log, MalformedCommittedLineNamesTheLine) {
  fs::path path = TempFile("bad.log");
  {
    std::ofstream out(path);
    out << "<urn:a> <urn:p> \"x\" .\n# commit\n<urn:a> <urn:p>\n# commit\n";
  }
  try {
    AnnotationLog::Replay(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  fs::remove(path);
}

// Random create/annotate/supersede/mock sequences. Checks confidence range,
// provenance completeness, dimension/source agreement, append-only growth
// and exact log replay.
TEST(AnnotationProperties, RandomOperationSequences) {
  std::vector<Term> anatomy, imaging, disease;
  {
    Store base = testing::BaseStore();
    Ontology o = Ontology::FromStore(base);
    for (const ConceptRef& c : o.Concepts()) {
      if (c.source == ConceptSource::kAnatomy) anatomy.push_back(c.iri);
      if (c.source == ConceptSource::kImaging) imaging.push_back(c.iri);
      if (c.source == ConceptSource::kDisease) disease.push_back(c.iri);
    }
  }
  for (std::uint64_t round = 0; round < 3; ++round) {
    fs::path path = TempFile("prop" + std::to_string(round) + ".log");
    fs::remove(path);
    AnnotationLog log(path);
    World w(&log, round);
    gen::Rng rng(round * 977 + 1);
    std::vector<Term> regions, annotations;
    std::set<Triple> previous;
    std::size_t ok = 0;

    for (int op = 0; op < 250; ++op) {
      w.now += std::chrono::seconds(gen::Uniform(rng, 0, 3));
      try {
        switch (gen::Uniform(rng, 0, 9)) {
          case 0:
          case 1:
          case 2: {
            int p = static_cast<int>(gen::Uniform(rng, 1, 2));
            int s = static_cast<int>(gen::Uniform(rng, 1, 2));
            Geometry g;
            if (gen::Coin(rng, 0.3)) {
              g = Box3d{int(gen::Uniform(rng, 0, 50)), int(gen::Uniform(rng, 0, 50)),
                        int(gen::Uniform(rng, 0, 50)), int(gen::Uniform(rng, 0, 20)),
                        int(gen::Uniform(rng, 1, 20)), int(gen::Uniform(rng, 1, 20))};
              regions.push_back(w.service.CreateRegion(SeriesT(p, s), g).id);
            } else {
              g = Rect{int(gen::Uniform(rng, 0, 500)), int(gen::Uniform(rng, 0, 500)),
                       int(gen::Uniform(rng, 0, 40)), int(gen::Uniform(rng, 1, 40))};
              int i = static_cast<int>(gen::Uniform(rng, 1, 2));
              regions.push_back(w.service.CreateRegion(ImageT(p, s, i), g).id);
            }
            break;
          }
          case 3:
          case 4:
          case 5:
          case 6:
          case 7: {
            if (regions.empty()) break;
            Payload pl = Manual(std::uniform_real_distribution<double>(-0.2, 1.2)(rng));
            if (gen::Coin(rng)) pl.anatomy = anatomy[gen::Uniform(rng, 0, anatomy.size() - 1)];
            if (gen::Coin(rng)) pl.visual.push_back(imaging[gen::Uniform(rng, 0, imaging.size() - 1)]);
            if (gen::Coin(rng)) pl.disease = disease[gen::Uniform(rng, 0, disease.size() - 1)];
            if (gen::Coin(rng, 0.2)) pl.free_text_value = "12 mm";
            if (gen::Coin(rng, 0.1)) pl.anatomy = disease[0];  // wrong dimension
            const Term& target = regions[gen::Uniform(rng, 0, regions.size() - 1)];
            if (!annotations.empty() && gen::Coin(rng, 0.3)) {
              annotations.push_back(w.service
                                        .Supersede(annotations[gen::Uniform(rng, 0, annotations.size() - 1)], pl)
                                        .annotation.id);
            } else {
              annotations.push_back(w.service.Annotate(target, pl).annotation.id);
            }
            break;
          }
          case 8:
            w.service.MockAutoAnnotate(SeriesT(int(gen::Uniform(rng, 1, 2)), 1),
                                       gen::Uniform(rng, 0, 3));
            break;
          default:
            w.service.AddLandmark(SeriesT(1, 2), Fma("ApexOfHeart"),
                                  {double(gen::Uniform(rng, 0, 511)), 10, 10},
                                  std::uniform_real_distribution<double>(-0.2, 1.2)(rng));
        }
        ++ok;
      } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::kValidation || e.code() == ErrorCode::kConflict)
            << e.what();
      }
      auto now_triples = w.store.Read([](const Store& s) {
        auto v = s.Triples();
        return std::set<Triple>(v.begin(), v.end());
      });
      EXPECT_TRUE(std::includes(now_triples.begin(), now_triples.end(), previous.begin(),
                                previous.end()))
          << "operation removed triples";
      previous = std::move(now_triples);
    }
    EXPECT_GT(ok, 150u);

    Store live = w.store.Copy();
    AnnotationFilter all;
    all.include_superseded = true;
    auto every = w.service.ListAnnotations(all);
    EXPECT_GT(every.size(), 50u);
    for (const Annotation& a : every) {
      EXPECT_TRUE(a.confidence >= 0.0 && a.confidence <= 1.0) << a.id.value();
      EXPECT_FALSE(a.provenance.user.empty());
      EXPECT_NO_THROW(ParseTimestamp(a.provenance.timestamp));
      EXPECT_TRUE(live.HasSubject(a.id));
      EXPECT_EQ(live.Objects(a.id, vocab::Origin()).size(), 1u);
    }
    // Every confidence literal in the store, annotations and landmarks alike.
    for (const Triple& t : live.Match({std::nullopt, vocab::Confidence(), std::nullopt})) {
      double c = std::stod(t.object.value());
      EXPECT_TRUE(c >= 0.0 && c <= 1.0);
    }
    // Dimension slots hold concepts of the matching source.
    auto wrong = sparql::Evaluate(live, sparql::ParseQuery(
        "SELECT ?a ?c WHERE { ?a medico:anatomy ?c . ?c medico:source \"disease\" }"));
    EXPECT_TRUE(wrong.empty());
    for (const char* q :
         {"SELECT ?c WHERE { ?a medico:anatomy ?c }", "SELECT ?c WHERE { ?a medico:visual ?c }",
          "SELECT ?c WHERE { ?a medico:disease ?c }"}) {
      std::string expected = std::string(q).find("anatomy") != std::string::npos ? "anatomy"
                             : std::string(q).find("visual") != std::string::npos ? "imaging"
                                                                                  : "disease";
      for (const auto& row : sparql::Evaluate(live, sparql::ParseQuery(q)).rows) {
        EXPECT_EQ(w.ontology.Get(row[0]).source, *ParseConceptSource(expected));
      }
    }

    Store replayed = testing::BaseStore();
    AnnotationLog::ReplayInto(path, replayed);
    EXPECT_EQ(SnapshotText(replayed), SnapshotText(live));
    fs::remove(path);
  }
}

}  // namespace
}  // namespace medico::annotation

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

#ifndef MEDICO_ANNOTATION_ANNOTATION_H_
#define MEDICO_ANNOTATION_ANNOTATION_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "medico/ontology/ontology.h"
#include "medico/store/triple_store.h"

namespace medico::annotation {

// Pixel geometry on a single image.
struct Rect {
  int x = 0, y = 0, width = 0, height = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
};
struct Polygon {
  std::vector<std::pair<int, int>> points;
  friend bool operator==(const Polygon&, const Polygon&) = default;
};
// Voxel geometry on a series volume.
struct Box3d {
  int x = 0, y = 0, z = 0, dx = 0, dy = 0, dz = 0;
  friend bool operator==(const Box3d&, const Box3d&) = default;
};
using Geometry = std::variant<Rect, Polygon, Box3d>;

// Literal encoding stored with each region:
//   rect:x,y,w,h    poly:x1 y1;x2 y2;...    box:x,y,z,dx,dy,dz
std::string FormatGeometry(const Geometry& geometry);
// Throws Error(kValidation) on malformed text or degenerate geometry.
Geometry ParseGeometry(std::string_view text);
// Extents strictly positive, polygons with >= 3 distinct vertices.
void ValidateGeometry(const Geometry& geometry);

struct Point3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Point3&, const Point3&) = default;
};
Point3 Centroid(const Geometry& geometry);
bool IsVolumetric(const Geometry& geometry);

enum class Origin { kManual, kAutomatic };
std::string_view OriginName(Origin origin);
std::optional<Origin> ParseOrigin(std::string_view name);

struct Provenance {
  std::string user;       // login name
  std::string timestamp;  // ISO-8601 UTC, seconds
  Origin origin = Origin::kManual;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Region {
  Term id;
  Term target;  // medico:Image for 2D geometry, medico:Series for Box3d
  Geometry geometry;
  friend bool operator==(const Region&, const Region&) = default;
};

// Fields supplied by the caller of Annotate / Supersede.
struct Payload {
  std::optional<Term> anatomy;
  std::vector<Term> visual;
  std::optional<Term> disease;
  std::optional<std::string> free_text_value;
  std::optional<std::string> free_text_comment;
  double confidence = 1.0;
  std::string user;
  Origin origin = Origin::kManual;
};

struct Annotation {
  Term id;
  Term region;
  std::optional<ConceptRef> anatomy;
  std::vector<ConceptRef> visual;  // sorted by IRI
  std::optional<ConceptRef> disease;
  std::optional<std::string> free_text_value;
  std::optional<std::string> free_text_comment;
  double confidence = 0;
  Provenance provenance;
  std::optional<Term> superseded_by;

  friend bool operator==(const Annotation& a, const Annotation& b) {
    auto same = [](const std::optional<ConceptRef>& x,
                   const std::optional<ConceptRef>& y) {
      return x.has_value() == y.has_value() && (!x || x->source == y->source) &&
             x == y;
    };
    return a.id == b.id && a.region == b.region && same(a.anatomy, b.anatomy) &&
           a.visual == b.visual && same(a.disease, b.disease) &&
           a.free_text_value == b.free_text_value &&
           a.free_text_comment == b.free_text_comment &&
           a.confidence == b.confidence && a.provenance == b.provenance &&
           a.superseded_by == b.superseded_by;
  }
};

struct Landmark {
  Term id;
  ConceptRef name;
  Point3 position;  // integral voxel coordinates
  Term volume;      // medico:Series
  double confidence = 0;
  friend bool operator==(const Landmark& a, const Landmark& b) {
    return a.id == b.id && a.name == b.name && a.position == b.position &&
           a.volume == b.volume && a.confidence == b.confidence;
  }
};

struct AnnotateResult {
  Annotation annotation;
  std::string confirmation;
};

struct AnnotationFilter {
  std::optional<Term> patient;
  std::optional<Term> study;
  std::optional<Term> region;
  std::optional<Origin> origin;
  bool include_superseded = false;
};

struct MockResult {
  std::vector<Landmark> landmarks;
  std::vector<Region> regions;
  std::vector<Annotation> organ_annotations;
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

// "YYYY-MM-DDTHH:MM:SSZ".
std::string FormatTimestamp(std::chrono::system_clock::time_point t);
Clock FixedClock(std::chrono::system_clock::time_point t);
// Parses "YYYY-MM-DDTHH:MM:SS[.fff]Z". Throws Error(kValidation).
std::chrono::system_clock::time_point ParseTimestamp(std::string_view text);

// Shortest decimal text that reads back to the same double, never in
// exponent form (xsd:decimal lexical space).
std::string FormatDecimal(double value);

// Random version-4 UUIDs from a seeded engine, so runs are reproducible.
class IdGenerator {
 public:
  explicit IdGenerator(std::uint64_t seed) : rng_(seed) {}
  std::string Next();

 private:
  std::mutex mu_;
  std::mt19937_64 rng_;
};

// Append-only journal of committed triple batches:
//   <s> <p> <o> .
//   ...
//   # commit
// A batch without its commit marker (e.g. after a crash mid-append) is
// ignored by Replay.
class AnnotationLog {
 public:
  // Opens (creating when absent) for appending. Throws Error(kIo).
  explicit AnnotationLog(std::filesystem::path path);

  void Append(const std::vector<Triple>& batch);
  // Empties the file, e.g. once its batches are in a snapshot.
  void Truncate();
  const std::filesystem::path& path() const { return path_; }

  // Committed batches in order. A missing file yields none. Throws
  // ParseError for a malformed committed line.
  static std::vector<std::vector<Triple>> Replay(
      const std::filesystem::path& path);
  // Inserts every committed batch; returns the number of batches.
  static std::size_t ReplayInto(const std::filesystem::path& path,
                                Store& store);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Region and annotation CRUD over the shared store. Everything written is
// first appended to the log (when one is attached) and then inserted under
// the store's write lock, so log order equals application order. Nothing is
// ever removed: edits go through Supersede.
class AnnotationService {
 public:
  AnnotationService(SharedStore& store, const Ontology& ontology, Clock clock,
                    std::uint64_t id_seed, AnnotationLog* log = nullptr);

  // Throws Error(kNotFound) for an unknown target, Error(kValidation) for
  // degenerate geometry or a 2D/3D target mismatch.
  Region CreateRegion(const Term& target, const Geometry& geometry);

  // Throws Error(kNotFound) for an unknown region, Error(kValidation) for an
  // invalid payload.
  AnnotateResult Annotate(const Term& region, const Payload& payload);

  // The new annotation lives on the old one's region. Throws
  // Error(kNotFound) or Error(kConflict) when `old` is already superseded.
  AnnotateResult Supersede(const Term& old, const Payload& payload);

  Landmark AddLandmark(const Term& volume, const Term& name,
                       const Point3& position, double confidence);

  // Deterministic stand-in for an automatic volume parser: 19 landmarks and
  // 7 organ boxes for `volume` (a medico:Series). Re-running with the same
  // seed returns the stored result without writing anything.
  MockResult MockAutoAnnotate(const Term& volume, std::uint64_t seed);

  std::vector<Annotation> ListAnnotations(const AnnotationFilter& filter) const;

  std::optional<Annotation> GetAnnotation(const Term& id) const;
  std::optional<Region> GetRegion(const Term& id) const;

  const Ontology& ontology() const { return ontology_; }

  // Read-side helpers that operate on any store.
  static std::optional<Annotation> ReadAnnotation(const Store& store,
                                                  const Ontology& ontology,
                                                  const Term& id);
  static std::optional<Region> ReadRegion(const Store& store, const Term& id);
  static std::optional<Landmark> ReadLandmark(const Store& store,
                                              const Ontology& ontology,
                                              const Term& id);
  // medico:Series containing `target` (itself for a series).
  static std::optional<Term> SeriesOf(const Store& store, const Term& target);
  static std::optional<Term> StudyOf(const Store& store, const Term& target);
  static std::optional<Term> PatientOf(const Store& store, const Term& target);

 private:
  struct Built {
    Annotation annotation;
    std::vector<Triple> triples;
  };
  Built Build(const Term& id, const Term& region, const Payload& payload,
              const std::string& timestamp) const;
  std::string Confirmation(const Store& store, const Annotation& a) const;
  void Commit(Store& store, const std::vector<Triple>& batch);

  SharedStore& store_;
  const Ontology& ontology_;
  Clock clock_;
  IdGenerator ids_;
  AnnotationLog* log_;
};

// The fixed landmark and organ lists used by the mock parser.
const std::vector<Term>& MockLandmarkNames();
const std::vector<Term>& MockOrganNames();

}  // namespace medico::annotation

#endif  // MEDICO_ANNOTATION_ANNOTATION_H_

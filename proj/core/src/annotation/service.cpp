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
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "medico/annotation/annotation.h"
#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::annotation {
namespace {

Term DecimalLiteral(double value) {
  return Term::Literal(FormatDecimal(value), std::string(vocab::kXsd) + "decimal");
}

std::optional<double> ParseDouble(std::string_view text) {
  double value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<std::string> LiteralOf(const Store& store, const Term& s, const Term& p) {
  auto o = store.FirstObject(s, p);
  if (!o || !o->is_literal()) return std::nullopt;
  return o->value();
}

void CheckConfidence(double confidence) {
  if (!std::isfinite(confidence) || confidence < 0.0 || confidence > 1.0) {
    throw Error(ErrorCode::kValidation,
                fmt::format("confidence {} is outside [0,1]", confidence));
  }
}

ConceptRef RequireConcept(const Ontology& ontology, const Term& iri,
                          ConceptSource expected, std::string_view slot) {
  auto ref = ontology.Find(iri);
  if (!ref) {
    throw Error(ErrorCode::kValidation,
                fmt::format("{} concept {} is not in the ontology", slot, iri.value()));
  }
  if (ref->source != expected) {
    throw Error(ErrorCode::kValidation,
                fmt::format("{} concept {} comes from the {} ontology, not {}", slot,
                            iri.value(), ConceptSourceName(ref->source),
                            ConceptSourceName(expected)));
  }
  return *ref;
}

// Concepts absent from the ontology (a store loaded without it) keep the
// slot's source so callers can still tell dimensions apart.
ConceptRef RefOf(const Ontology& ontology, const Term& iri, ConceptSource slot) {
  if (auto ref = ontology.Find(iri)) return *ref;
  return ConceptRef{iri, slot};
}

bool Blank(const std::optional<std::string>& s) { return !s || s->empty(); }

std::string JoinLabels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += i + 1 == labels.size() ? " and " : ", ";
    out += labels[i];
  }
  return out;
}

std::string FormatPosition(const Point3& p) {
  return fmt::format("{},{},{}", FormatDecimal(p.x), FormatDecimal(p.y), FormatDecimal(p.z));
}

std::optional<Point3> ParsePosition(std::string_view text) {
  auto first = text.find(',');
  auto second = first == std::string_view::npos ? first : text.find(',', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  auto x = ParseDouble(text.substr(0, first));
  auto y = ParseDouble(text.substr(first + 1, second - first - 1));
  auto z = ParseDouble(text.substr(second + 1));
  if (!x || !y || !z) return std::nullopt;
  return Point3{*x, *y, *z};
}

double Separation(const Point3& a, bool a3d, const Point3& b, bool b3d) {
  double dx = a.x - b.x, dy = a.y - b.y;
  double dz = (a3d && b3d) ? a.z - b.z : 0.0;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

AnnotationService::AnnotationService(SharedStore& store, const Ontology& ontology,
                                     Clock clock, std::uint64_t id_seed,
                                     AnnotationLog* log)
    : store_(store), ontology_(ontology), clock_(std::move(clock)), ids_(id_seed), log_(log) {}

void AnnotationService::Commit(Store& store, const std::vector<Triple>& batch) {
  if (log_ != nullptr) log_->Append(batch);
  for (const Triple& t : batch) store.Insert(t);
}

Region AnnotationService::CreateRegion(const Term& target, const Geometry& geometry) {
  ValidateGeometry(geometry);
  Region region{Term::Iri(vocab::MintedIri("region", ids_.Next())), target, geometry};
  store_.Write([&](Store& s) {
    bool image = s.Contains({target, vocab::Type(), vocab::Image()});
    bool series = s.Contains({target, vocab::Type(), vocab::Series()});
    if (!image && !series) {
      throw Error(ErrorCode::kNotFound, "unknown image or series " + target.value());
    }
    if (IsVolumetric(geometry) != series) {
      throw Error(ErrorCode::kValidation,
                  IsVolumetric(geometry) ? "box geometry needs a series target"
                                         : "2D geometry needs an image target");
    }
    std::vector<Triple> batch;
    batch.emplace_back(region.id, vocab::Type(), vocab::ImageRegion());
    if (series) batch.emplace_back(region.id, vocab::Type(), vocab::VolumeRegion());
    batch.emplace_back(region.id, vocab::RegionOf(), target);
    batch.emplace_back(region.id, vocab::Geometry(), Term::Literal(FormatGeometry(geometry)));
    Commit(s, batch);
  });
  return region;
}

AnnotationService::Built AnnotationService::Build(const Term& id, const Term& region,
                                                  const Payload& payload,
                                                  const std::string& timestamp) const {
  CheckConfidence(payload.confidence);
  if (payload.user.empty()) {
    throw Error(ErrorCode::kValidation, "annotations need the user's login name");
  }
  Built b;
  Annotation& a = b.annotation;
  a.id = id;
  a.region = region;
  if (payload.anatomy) {
    a.anatomy = RequireConcept(ontology_, *payload.anatomy, ConceptSource::kAnatomy, "anatomy");
  }
  for (const Term& v : payload.visual) {
    a.visual.push_back(RequireConcept(ontology_, v, ConceptSource::kImaging, "visual"));
  }
  std::sort(a.visual.begin(), a.visual.end());
  a.visual.erase(std::unique(a.visual.begin(), a.visual.end()), a.visual.end());
  if (payload.disease) {
    a.disease = RequireConcept(ontology_, *payload.disease, ConceptSource::kDisease, "disease");
  }
  if (!Blank(payload.free_text_value)) a.free_text_value = payload.free_text_value;
  if (!Blank(payload.free_text_comment)) a.free_text_comment = payload.free_text_comment;
  if (!a.anatomy && a.visual.empty() && !a.disease && !a.free_text_value &&
      !a.free_text_comment) {
    throw Error(ErrorCode::kValidation,
                "annotation payload needs an anatomy, visual or disease concept, or free text");
  }
  a.confidence = payload.confidence;
  a.provenance = Provenance{payload.user, timestamp, payload.origin};

  auto& t = b.triples;
  t.emplace_back(id, vocab::Type(), vocab::ImageAnnotation());
  t.emplace_back(id, vocab::Annotates(), region);
  if (a.anatomy) t.emplace_back(id, vocab::Anatomy(), a.anatomy->iri);
  for (const ConceptRef& v : a.visual) t.emplace_back(id, vocab::Visual(), v.iri);
  if (a.disease) t.emplace_back(id, vocab::Disease(), a.disease->iri);
  if (a.free_text_value) {
    t.emplace_back(id, vocab::FreeTextValue(), Term::Literal(*a.free_text_value));
  }
  if (a.free_text_comment) {
    t.emplace_back(id, vocab::FreeTextComment(), Term::Literal(*a.free_text_comment));
  }
  t.emplace_back(id, vocab::Confidence(), DecimalLiteral(a.confidence));
  t.emplace_back(id, vocab::User(), Term::Literal(a.provenance.user));
  t.emplace_back(id, vocab::Timestamp(),
                 Term::Literal(timestamp, std::string(vocab::kXsd) + "dateTime"));
  t.emplace_back(id, vocab::Origin(),
                 payload.origin == Origin::kManual ? vocab::ManualOrigin()
                                                   : vocab::AutomaticOrigin());
  return b;
}

AnnotateResult AnnotationService::Annotate(const Term& region, const Payload& payload) {
  Term id = Term::Iri(vocab::MintedIri("annotation", ids_.Next()));
  std::string timestamp = FormatTimestamp(clock_());
  return store_.Write([&](Store& s) {
    if (!s.Contains({region, vocab::Type(), vocab::ImageRegion()})) {
      throw Error(ErrorCode::kNotFound, "unknown region " + region.value());
    }
    Built b = Build(id, region, payload, timestamp);
    Commit(s, b.triples);
    return AnnotateResult{b.annotation, Confirmation(s, b.annotation)};
  });
}

AnnotateResult AnnotationService::Supersede(const Term& old, const Payload& payload) {
  Term id = Term::Iri(vocab::MintedIri("annotation", ids_.Next()));
  std::string timestamp = FormatTimestamp(clock_());
  return store_.Write([&](Store& s) {
    if (!s.Contains({old, vocab::Type(), vocab::ImageAnnotation()})) {
      throw Error(ErrorCode::kNotFound, "unknown annotation " + old.value());
    }
    if (auto by = s.FirstObject(old, vocab::SupersededBy())) {
      throw Error(ErrorCode::kConflict,
                  fmt::format("{} is already superseded by {}", old.value(), by->value()));
    }
    Term region = *s.FirstObject(old, vocab::Annotates());
    Built b = Build(id, region, payload, timestamp);
    b.triples.emplace_back(old, vocab::SupersededBy(), id);
    Commit(s, b.triples);
    return AnnotateResult{b.annotation, Confirmation(s, b.annotation)};
  });
}

Landmark AnnotationService::AddLandmark(const Term& volume, const Term& name,
                                        const Point3& position, double confidence) {
  CheckConfidence(confidence);
  Landmark lm{Term::Iri(vocab::MintedIri("landmark", ids_.Next())),
              RequireConcept(ontology_, name, ConceptSource::kAnatomy, "landmark"),
              position, volume, confidence};
  store_.Write([&](Store& s) {
    if (!s.Contains({volume, vocab::Type(), vocab::Series()})) {
      throw Error(ErrorCode::kNotFound, "unknown series " + volume.value());
    }
    Commit(s, {{lm.id, vocab::Type(), vocab::Landmark()},
               {lm.id, vocab::LandmarkName(), lm.name.iri},
               {lm.id, vocab::Position(), Term::Literal(FormatPosition(position))},
               {lm.id, vocab::InVolume(), volume},
               {lm.id, vocab::Confidence(), DecimalLiteral(confidence)}});
  });
  return lm;
}

std::string AnnotationService::Confirmation(const Store& store, const Annotation& a) const {
  std::string what;
  if (a.disease) {
    what = ontology_.Label(a.disease->iri);
  } else if (!a.visual.empty()) {
    std::vector<std::string> labels;
    for (const ConceptRef& v : a.visual) labels.push_back(ontology_.Label(v.iri));
    what = JoinLabels(labels);
  } else if (a.free_text_value) {
    what = *a.free_text_value;
  } else if (a.free_text_comment) {
    what = *a.free_text_comment;
  } else {
    what = ontology_.Label(a.anatomy->iri);
  }

  std::optional<Term> where;
  if (a.anatomy) where = a.anatomy->iri;

  // Otherwise borrow the anatomy of the closest landmark or annotated region
  // on the same image, or on the series the image belongs to.
  auto region = ReadRegion(store, a.region);
  if (!where && region) {
    Point3 here = Centroid(region->geometry);
    bool here3d = IsVolumetric(region->geometry);
    auto series = SeriesOf(store, region->target);
    double best = std::numeric_limits<double>::infinity();
    Term best_id;

    auto consider = [&](double distance, const Term& id, const Term& anatomy) {
      if (distance < best || (distance == best && id < best_id)) {
        best = distance;
        best_id = id;
        where = anatomy;
      }
    };

    if (series) {
      for (const Term& lm_id : store.Subjects(vocab::InVolume(), *series)) {
        auto lm = ReadLandmark(store, ontology_, lm_id);
        if (lm) consider(Separation(here, here3d, lm->position, true), lm->id, lm->name.iri);
      }
    }

    std::vector<Term> targets{region->target};
    if (series && *series != region->target) targets.push_back(*series);
    if (series && *series == region->target) {
      for (const Term& img : store.Objects(*series, vocab::HasImage())) targets.push_back(img);
    }
    for (const Term& target : targets) {
      for (const Term& other : store.Subjects(vocab::RegionOf(), target)) {
        auto other_region = ReadRegion(store, other);
        if (!other_region) continue;
        double d = Separation(here, here3d, Centroid(other_region->geometry),
                              IsVolumetric(other_region->geometry));
        for (const Term& ann : store.Subjects(vocab::Annotates(), other)) {
          if (ann == a.id || store.FirstObject(ann, vocab::SupersededBy())) continue;
          if (auto anatomy = store.FirstObject(ann, vocab::Anatomy())) consider(d, ann, *anatomy);
        }
      }
    }
  }
  return what + " in " + (where ? ontology_.Phrase(*where) : "unspecified location");
}

std::optional<Term> AnnotationService::SeriesOf(const Store& store, const Term& target) {
  if (store.Contains({target, vocab::Type(), vocab::Series()})) return target;
  auto parents = store.Subjects(vocab::HasImage(), target);
  if (parents.empty()) return std::nullopt;
  return parents.front();
}

std::optional<Term> AnnotationService::StudyOf(const Store& store, const Term& target) {
  if (store.Contains({target, vocab::Type(), vocab::Study()})) return target;
  auto series = SeriesOf(store, target);
  if (!series) return std::nullopt;
  auto parents = store.Subjects(vocab::HasSeries(), *series);
  if (parents.empty()) return std::nullopt;
  return parents.front();
}

std::optional<Term> AnnotationService::PatientOf(const Store& store, const Term& target) {
  if (store.Contains({target, vocab::Type(), vocab::Patient()})) return target;
  auto study = StudyOf(store, target);
  if (!study) return std::nullopt;
  auto parents = store.Subjects(vocab::HasStudy(), *study);
  if (parents.empty()) return std::nullopt;
  return parents.front();
}

std::optional<Region> AnnotationService::ReadRegion(const Store& store, const Term& id) {
  if (!store.Contains({id, vocab::Type(), vocab::ImageRegion()})) return std::nullopt;
  auto target = store.FirstObject(id, vocab::RegionOf());
  auto geometry = LiteralOf(store, id, vocab::Geometry());
  if (!target || !geometry) return std::nullopt;
  return Region{id, *target, ParseGeometry(*geometry)};
}

std::optional<Landmark> AnnotationService::ReadLandmark(const Store& store,
                                                        const Ontology& ontology,
                                                        const Term& id) {
  if (!store.Contains({id, vocab::Type(), vocab::Landmark()})) return std::nullopt;
  auto name = store.FirstObject(id, vocab::LandmarkName());
  auto volume = store.FirstObject(id, vocab::InVolume());
  auto position = LiteralOf(store, id, vocab::Position());
  auto confidence = LiteralOf(store, id, vocab::Confidence());
  if (!name || !volume || !position || !confidence) return std::nullopt;
  auto p = ParsePosition(*position);
  auto c = ParseDouble(*confidence);
  if (!p || !c) return std::nullopt;
  return Landmark{id, RefOf(ontology, *name, ConceptSource::kAnatomy), *p, *volume, *c};
}

std::optional<Annotation> AnnotationService::ReadAnnotation(const Store& store,
                                                            const Ontology& ontology,
                                                            const Term& id) {
  if (!store.Contains({id, vocab::Type(), vocab::ImageAnnotation()})) return std::nullopt;
  Annotation a;
  a.id = id;
  auto region = store.FirstObject(id, vocab::Annotates());
  if (!region) return std::nullopt;
  a.region = *region;
  if (auto t = store.FirstObject(id, vocab::Anatomy())) {
    a.anatomy = RefOf(ontology, *t, ConceptSource::kAnatomy);
  }
  for (const Term& v : store.Objects(id, vocab::Visual())) {
    a.visual.push_back(RefOf(ontology, v, ConceptSource::kImaging));
  }
  std::sort(a.visual.begin(), a.visual.end());
  if (auto t = store.FirstObject(id, vocab::Disease())) {
    a.disease = RefOf(ontology, *t, ConceptSource::kDisease);
  }
  a.free_text_value = LiteralOf(store, id, vocab::FreeTextValue());
  a.free_text_comment = LiteralOf(store, id, vocab::FreeTextComment());
  if (auto c = LiteralOf(store, id, vocab::Confidence())) {
    a.confidence = ParseDouble(*c).value_or(std::numeric_limits<double>::quiet_NaN());
  }
  a.provenance.user = LiteralOf(store, id, vocab::User()).value_or("");
  a.provenance.timestamp = LiteralOf(store, id, vocab::Timestamp()).value_or("");
  auto origin = store.FirstObject(id, vocab::Origin());
  a.provenance.origin = origin && *origin == vocab::AutomaticOrigin() ? Origin::kAutomatic
                                                                       : Origin::kManual;
  a.superseded_by = store.FirstObject(id, vocab::SupersededBy());
  return a;
}

std::optional<Annotation> AnnotationService::GetAnnotation(const Term& id) const {
  return store_.Read([&](const Store& s) { return ReadAnnotation(s, ontology_, id); });
}

std::optional<Region> AnnotationService::GetRegion(const Term& id) const {
  return store_.Read([&](const Store& s) { return ReadRegion(s, id); });
}

std::vector<Annotation> AnnotationService::ListAnnotations(
    const AnnotationFilter& filter) const {
  std::vector<Annotation> out;
  store_.Read([&](const Store& s) {
    for (const Term& id : s.Subjects(vocab::Type(), vocab::ImageAnnotation())) {
      auto a = ReadAnnotation(s, ontology_, id);
      if (!a) continue;
      if (!filter.include_superseded && a->superseded_by) continue;
      if (filter.region && a->region != *filter.region) continue;
      if (filter.origin && a->provenance.origin != *filter.origin) continue;
      if (filter.study || filter.patient) {
        auto target = s.FirstObject(a->region, vocab::RegionOf());
        if (!target) continue;
        if (filter.study && StudyOf(s, *target) != filter.study) continue;
        if (filter.patient && PatientOf(s, *target) != filter.patient) continue;
      }
      out.push_back(std::move(*a));
    }
  });
  std::sort(out.begin(), out.end(), [](const Annotation& x, const Annotation& y) {
    return std::tie(x.provenance.timestamp, x.id) < std::tie(y.provenance.timestamp, y.id);
  });
  return out;
}

}  // namespace medico::annotation

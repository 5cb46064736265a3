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

#include "medico/dialogue/views.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

#include "medico/dialogue/dialogue.h"
#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::dialogue::views {

using annotation::AnnotationService;
using nlohmann::json;

std::string Literal(const Store& s, const Term& subject, const Term& predicate) {
  auto o = s.FirstObject(subject, predicate);
  return o ? o->value() : std::string();
}

json ConceptJson(const Ontology& ontology, const ConceptRef& ref) {
  json j = {{"iri", ref.iri.value()}, {"label", ontology.Label(ref.iri)}};
  if (auto d = search::DimensionOf(ref.source)) j["dimension"] = search::DimensionName(*d);
  if (auto code = ontology.Code(ref.iri)) j["code"] = *code;
  return j;
}

json PatientJson(const Store& s, const Term& patient) {
  std::string name = Literal(s, patient, vocab::PatientName());
  return {{"iri", patient.value()},
          {"name", name},
          {"displayName", DisplayName(name)},
          {"patientId", Literal(s, patient, vocab::PatientId())}};
}

std::string PatientDisplay(const Store& s, const Term& patient) {
  std::string name = Literal(s, patient, vocab::PatientName());
  return name.empty() ? patient.value() : DisplayName(name);
}

std::vector<ConceptRef> AnnotationConcepts(const annotation::Annotation& a) {
  std::vector<ConceptRef> out;
  if (a.anatomy) out.push_back(*a.anatomy);
  out.insert(out.end(), a.visual.begin(), a.visual.end());
  if (a.disease) out.push_back(*a.disease);
  return out;
}

json AnnotationJson(const Ontology& ontology, const annotation::Annotation& a) {
  json labels = json::array();
  for (const ConceptRef& c : AnnotationConcepts(a)) labels.push_back(ConceptJson(ontology, c));
  json j = {{"iri", a.id.value()},
            {"labels", labels},
            {"confidence", a.confidence},
            {"origin", annotation::OriginName(a.provenance.origin)},
            {"user", a.provenance.user},
            {"timestamp", a.provenance.timestamp}};
  if (a.free_text_value) j["freeTextValue"] = *a.free_text_value;
  if (a.free_text_comment) j["freeTextComment"] = *a.free_text_comment;
  return j;
}

std::vector<annotation::Annotation> CurrentAnnotations(const Store& s, const Ontology& ontology,
                                                       const Term& region) {
  std::vector<annotation::Annotation> out;
  for (const Term& id : s.Subjects(vocab::Annotates(), region)) {
    auto a = AnnotationService::ReadAnnotation(s, ontology, id);
    if (a && !a->superseded_by) out.push_back(std::move(*a));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.provenance.timestamp, x.id) < std::tie(y.provenance.timestamp, y.id);
  });
  return out;
}

json RegionJson(const Store& s, const Ontology& ontology, const Term& region) {
  auto r = AnnotationService::ReadRegion(s, region);
  if (!r) throw Error(ErrorCode::kNotFound, "unknown region " + region.value());
  json annotations = json::array();
  for (const auto& a : CurrentAnnotations(s, ontology, region)) {
    annotations.push_back(AnnotationJson(ontology, a));
  }
  return {{"iri", region.value()},
          {"geometry", annotation::FormatGeometry(r->geometry)},
          {"target", {{"iri", r->target.value()}}},
          {"annotations", annotations}};
}

json RegionsOn(const Store& s, const Ontology& ontology, const Term& target) {
  json out = json::array();
  for (const Term& r : s.Subjects(vocab::RegionOf(), target)) {
    out.push_back(RegionJson(s, ontology, r));
  }
  return out;
}

std::vector<SeriesView> SeriesOfPatient(const Store& s, const Ontology& ontology,
                                        const Term& patient) {
  std::vector<SeriesView> out;
  for (const Term& study : s.Objects(patient, vocab::HasStudy())) {
    std::string date = Literal(s, study, vocab::StudyDate());
    for (const Term& series : s.Objects(study, vocab::HasSeries())) {
      SeriesView v{study, date, series, std::nullopt};
      for (const Term& p : {vocab::BodyPartExamined(), vocab::SeriesDescription()}) {
        std::string text = Literal(s, series, p);
        if (text.empty() || v.anatomy) continue;
        for (const ConceptRef& ref : ontology.Lookup(text)) {
          if (ref.source == ConceptSource::kAnatomy) {
            v.anatomy = ref;
            break;
          }
        }
      }
      out.push_back(std::move(v));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SeriesView& a, const SeriesView& b) {
    if (a.study_date != b.study_date) return a.study_date > b.study_date;
    return std::tie(a.study, a.series) < std::tie(b.study, b.series);
  });
  return out;
}

json ImageJson(const Store& s, const Ontology& ontology, const SeriesView& v, const Term& image,
               std::size_t index) {
  json series = {{"iri", v.series.value()},
                 {"description", Literal(s, v.series, vocab::SeriesDescription())},
                 {"bodyPart", Literal(s, v.series, vocab::BodyPartExamined())},
                 {"modality", Literal(s, v.series, vocab::Modality())}};
  json j = {{"index", index},
            {"iri", image.value()},
            {"study", {{"iri", v.study.value()}, {"date", v.study_date}}},
            {"series", series},
            {"regions", RegionsOn(s, ontology, image)}};
  if (v.anatomy) j["organ"] = ConceptJson(ontology, *v.anatomy);
  return j;
}

json QueryJson(const Ontology& ontology, const search::SearchQuery& q) {
  json terms = json::array();
  for (const auto& t : q.terms) terms.push_back(ConceptJson(ontology, t.ref));
  json j = {{"terms", terms}};
  if (q.date_range) {
    j["from"] = q.date_range->start;
    j["to"] = q.date_range->end;
  }
  return j;
}

json ResultRows(const Store& s, const Ontology& ontology,
                const std::vector<search::ScoredResult>& results,
                const std::optional<search::DateRange>& range) {
  json rows = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    json studies = json::array();
    for (const Term& study : s.Objects(r.patient, vocab::HasStudy())) {
      std::string date = Literal(s, study, vocab::StudyDate());
      if (range && (date < range->start || date > range->end)) continue;
      studies.push_back({{"iri", study.value()}, {"date", date}});
    }
    json matches = json::array();
    for (const auto& e : r.explanations) {
      matches.push_back({{"term", ConceptJson(ontology, e.term.ref)},
                         {"concept", ConceptJson(ontology, ontology.Get(e.matched_concept))},
                         {"annotation", {{"iri", e.annotation.value()}}},
                         {"region", {{"iri", e.region.value()}}},
                         {"distance", e.distance},
                         {"contribution", e.contribution}});
    }
    json row = {{"rank", i + 1},
                {"patient", PatientJson(s, r.patient)},
                {"score", r.score},
                {"studies", studies},
                {"matches", matches}};
    if (r.best_region) row["bestRegion"] = {{"iri", r.best_region->value()}};
    rows.push_back(std::move(row));
  }
  return rows;
}

json Highlights(const Ontology& ontology, const std::string& text) {
  struct Word {
    std::size_t begin, end;
  };
  std::vector<Word> words;
  auto inword = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '\'' || c == '.';
  };
  for (std::size_t i = 0; i < text.size();) {
    if (!inword(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && inword(text[j])) ++j;
    std::size_t end = j;
    while (end > i && (text[end - 1] == '.' || text[end - 1] == '-' || text[end - 1] == '\'')) --end;
    if (end > i) words.push_back({i, end});
    i = j;
  }
  std::map<std::string, std::vector<std::pair<Term, std::vector<std::pair<std::size_t, std::size_t>>>>>
      groups;
  for (std::size_t i = 0; i < words.size();) {
    std::size_t taken = 0;
    for (std::size_t n = std::min<std::size_t>(6, words.size() - i); n >= 1 && !taken; --n) {
      std::size_t b = words[i].begin, e = words[i + n - 1].end;
      std::string span = text.substr(b, e - b);
      if (span.find_first_of(",;:") != std::string::npos) continue;
      for (const ConceptRef& ref : ontology.Lookup(span)) {
        auto d = search::DimensionOf(ref.source);
        if (!d) continue;
        auto& group = groups[std::string(search::DimensionName(*d))];
        auto it = std::find_if(group.begin(), group.end(),
                               [&](const auto& g) { return g.first == ref.iri; });
        if (it == group.end()) {
          group.push_back({ref.iri, {}});
          it = group.end() - 1;
        }
        it->second.emplace_back(b, e);
        taken = n;
        break;
      }
    }
    i += taken ? taken : 1;
  }
  json out = json::object();
  for (std::string_view dim : {"anatomy", "imaging", "disease"}) {
    json entries = json::array();
    for (const auto& [iri, spans] : groups[std::string(dim)]) {
      json s = json::array();
      for (const auto& [b, e] : spans) s.push_back({b, e});
      entries.push_back({{"iri", iri.value()}, {"label", ontology.Label(iri)}, {"spans", s}});
    }
    out[std::string(dim)] = entries;
  }
  return out;
}

}  // namespace medico::dialogue::views

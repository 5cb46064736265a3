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

#ifndef MEDICO_DIALOGUE_VIEWS_H_
#define MEDICO_DIALOGUE_VIEWS_H_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medico/annotation/annotation.h"
#include "medico/ontology/ontology.h"
#include "medico/search/search.h"
#include "medico/store/triple_store.h"

// JSON renderings of store entities, shared by directive payloads and the
// HTTP API so both show the same shapes. Every entity object carries "iri".
namespace medico::dialogue::views {

// First object as text, empty when absent.
std::string Literal(const Store& s, const Term& subject, const Term& predicate);

nlohmann::json ConceptJson(const Ontology& ontology, const ConceptRef& ref);
nlohmann::json PatientJson(const Store& s, const Term& patient);
// Display name, falling back to the IRI.
std::string PatientDisplay(const Store& s, const Term& patient);

// anatomy, visual..., disease.
std::vector<ConceptRef> AnnotationConcepts(const annotation::Annotation& a);
nlohmann::json AnnotationJson(const Ontology& ontology, const annotation::Annotation& a);
// Non-superseded annotations of `region`, oldest first.
std::vector<annotation::Annotation> CurrentAnnotations(const Store& s, const Ontology& ontology,
                                                       const Term& region);
// Throws Error(kNotFound).
nlohmann::json RegionJson(const Store& s, const Ontology& ontology, const Term& region);
nlohmann::json RegionsOn(const Store& s, const Ontology& ontology, const Term& target);

struct SeriesView {
  Term study;
  std::string study_date;
  Term series;
  std::optional<ConceptRef> anatomy;  // from BodyPartExamined, else SeriesDescription
};
// Newest study first, then study and series IRI.
std::vector<SeriesView> SeriesOfPatient(const Store& s, const Ontology& ontology,
                                        const Term& patient);
nlohmann::json ImageJson(const Store& s, const Ontology& ontology, const SeriesView& v,
                         const Term& image, std::size_t index);

nlohmann::json QueryJson(const Ontology& ontology, const search::SearchQuery& q);
// Studies are limited to `range` when given.
nlohmann::json ResultRows(const Store& s, const Ontology& ontology,
                          const std::vector<search::ScoredResult>& results,
                          const std::optional<search::DateRange>& range);

// Concept mentions in free text, grouped as {anatomy, imaging, disease}:
// at each word the longest run of up to six words naming a concept wins.
// Spans are [begin, end) byte offsets.
nlohmann::json Highlights(const Ontology& ontology, const std::string& text);

}  // namespace medico::dialogue::views

#endif  // MEDICO_DIALOGUE_VIEWS_H_

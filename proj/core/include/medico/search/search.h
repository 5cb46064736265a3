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

#ifndef MEDICO_SEARCH_SEARCH_H_
#define MEDICO_SEARCH_SEARCH_H_

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medico/annotation/annotation.h"
#include "medico/ontology/ontology.h"
#include "medico/store/triple_store.h"

namespace medico::search {

// The three annotation dimensions a query term can constrain.
enum class Dimension { kAnatomy, kImaging, kDisease };

std::string_view DimensionName(Dimension dimension);
std::optional<Dimension> DimensionOf(ConceptSource source);

struct QueryTerm {
  ConceptRef ref;
  Dimension dimension = Dimension::kAnatomy;
  std::string text;  // surface form the term came from (or its label)
};

// Inclusive YYYYMMDD bounds compared against StudyDate.
struct DateRange {
  std::string start;
  std::string end;
  friend bool operator==(const DateRange&, const DateRange&) = default;
};

struct SearchQuery {
  std::vector<QueryTerm> terms;
  std::optional<Term> patient_scope;
  std::optional<DateRange> date_range;
  std::optional<Term> exclude_region;
};

// Throws Error(kEmptyQuery) with neither terms nor a date range and
// Error(kValidation) for malformed dates.
void ValidateQuery(const SearchQuery& query);

struct RankParams {
  double lambda = 0.5;
  int max_depth = 2;
  std::map<Dimension, double> weights = {
      {Dimension::kAnatomy, 1.0}, {Dimension::kImaging, 1.0}, {Dimension::kDisease, 1.0}};

  double Weight(Dimension d) const;
  // lambda in (0,1], 0 <= max_depth <= 4, weights positive and finite.
  // Throws Error(kValidation).
  void Validate() const;
};

struct Explanation {
  QueryTerm term;
  Term matched_concept;
  Term annotation;
  Term region;
  int distance = 0;
  double contribution = 0;
};

struct ScoredResult {
  Term patient;
  std::optional<Term> best_region;  // absent for zero scores
  double score = 0;
  std::vector<Explanation> explanations;  // query-term order, positive only
};

struct BuiltQuery {
  SearchQuery query;
  std::vector<std::string> unknown_terms;
};

struct QueryOptions {
  std::optional<Term> patient_scope;
  std::optional<DateRange> date_range;
  std::optional<Term> exclude_region;
};

// Resolves each string through Ontology::Lookup, taking the smallest IRI
// when several concepts share the surface form. Unresolved strings (and
// concepts outside the three dimensions) are returned in `unknown_terms`.
// Throws Error(kEmptyQuery) when nothing usable remains and no date range
// was given.
BuiltQuery BuildQuery(const Ontology& ontology, const std::vector<std::string>& terms,
                      const QueryOptions& options = {});

// weight(dim) * lambda^d * confidence for the best (annotation, concept)
// pair, where d is the undirected isA/partOf distance and pairs farther
// than params.max_depth (or unrelated) do not match. Superseded
// annotations are ignored. Ties keep the earliest annotation id, then the
// smallest concept IRI.
std::optional<Explanation> ScoreAnnotationSet(
    const Ontology& ontology, const QueryTerm& term,
    const std::vector<annotation::Annotation>& annotations, const RankParams& params);

// Ranks the candidate patients (date range, scope) by the sum over query
// terms of their best contribution. Zero scores are dropped unless the
// query has no terms. Order: score descending, then patient IRI.
std::vector<ScoredResult> SemanticSearch(const Store& store, const Ontology& ontology,
                                         const SearchQuery& query,
                                         const RankParams& params = {});

struct SimilarResult {
  std::vector<ScoredResult> results;
  std::vector<std::string> unknown_terms;
  SearchQuery query;
};

// Query built from every concept on the region's current annotations, plus
// `extra_terms`, excluding the region itself. Throws Error(kNotFound) for an
// unknown region and Error(kPrecondition) when it carries no annotation.
SimilarResult FindSimilarLesions(const Store& store, const Ontology& ontology,
                                 const Term& region,
                                 const std::vector<std::string>& extra_terms,
                                 const RankParams& params = {});
// Same, with extra terms that are already resolved.
SimilarResult FindSimilarLesions(const Store& store, const Ontology& ontology,
                                 const Term& region, const std::vector<QueryTerm>& extra_terms,
                                 const RankParams& params = {});

// "this week" (ISO Monday to Sunday), "last week", "today", "this month".
// Case and surrounding whitespace are ignored. Throws
// Error(kUnknownTimePhrase).
DateRange ResolveTimePhrase(std::string_view phrase,
                            std::chrono::year_month_day reference);

std::string FormatDate(std::chrono::year_month_day date);
// Throws Error(kValidation) unless `text` is a valid YYYYMMDD date.
std::chrono::year_month_day ParseDate(std::string_view text);

// Non-superseded annotations on regions of the patient's images and series.
std::vector<annotation::Annotation> PatientAnnotations(const Store& store,
                                                       const Ontology& ontology,
                                                       const Term& patient,
                                                       const std::optional<Term>& exclude_region);

}  // namespace medico::search

#endif  // MEDICO_SEARCH_SEARCH_H_

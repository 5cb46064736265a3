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

#include "medico/search/search.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::search {
namespace {

using annotation::Annotation;
using annotation::AnnotationService;

const std::set<Relation> kBothRelations = {Relation::kIsA, Relation::kPartOf};

std::vector<ConceptRef> SlotConcepts(const Annotation& a, Dimension d) {
  switch (d) {
    case Dimension::kAnatomy:
      return a.anatomy ? std::vector<ConceptRef>{*a.anatomy} : std::vector<ConceptRef>{};
    case Dimension::kImaging:
      return a.visual;
    case Dimension::kDisease:
      return a.disease ? std::vector<ConceptRef>{*a.disease} : std::vector<ConceptRef>{};
  }
  return {};
}

std::string Normalize(std::string_view phrase) {
  std::string out;
  for (char c : phrase) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

void CheckDate(const std::string& date, std::string_view what) {
  try {
    ParseDate(date);
  } catch (const Error&) {
    throw Error(ErrorCode::kValidation,
                fmt::format("{} \"{}\" is not a YYYYMMDD date", what, date));
  }
}

}  // namespace

std::string_view DimensionName(Dimension dimension) {
  switch (dimension) {
    case Dimension::kAnatomy: return "anatomy";
    case Dimension::kImaging: return "imaging";
    case Dimension::kDisease: return "disease";
  }
  return "?";
}

std::optional<Dimension> DimensionOf(ConceptSource source) {
  switch (source) {
    case ConceptSource::kAnatomy: return Dimension::kAnatomy;
    case ConceptSource::kImaging: return Dimension::kImaging;
    case ConceptSource::kDisease: return Dimension::kDisease;
    default: return std::nullopt;
  }
}

double RankParams::Weight(Dimension d) const {
  auto it = weights.find(d);
  return it == weights.end() ? 1.0 : it->second;
}

void RankParams::Validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kValidation, fmt::format("lambda {} is outside (0,1]", lambda));
  }
  if (max_depth < 0 || max_depth > Ontology::kDistanceCap) {
    throw Error(ErrorCode::kValidation,
                fmt::format("max depth {} is outside [0,{}]", max_depth, Ontology::kDistanceCap));
  }
  for (const auto& [d, w] : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("weight for {} must be positive, got {}", DimensionName(d), w));
    }
  }
}

void ValidateQuery(const SearchQuery& query) {
  if (query.terms.empty() && !query.date_range) {
    throw Error(ErrorCode::kEmptyQuery, "query has no terms and no date range");
  }
  if (query.date_range) {
    CheckDate(query.date_range->start, "start date");
    CheckDate(query.date_range->end, "end date");
  }
}

std::string FormatDate(std::chrono::year_month_day date) {
  return fmt::format("{:04}{:02}{:02}", static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

std::chrono::year_month_day ParseDate(std::string_view text) {
  using namespace std::chrono;
  bool digits = text.size() == 8 && std::all_of(text.begin(), text.end(), [](char c) {
                  return c >= '0' && c <= '9';
                });
  if (digits) {
    std::string s(text);
    year_month_day ymd{year{std::stoi(s.substr(0, 4))},
                       month{static_cast<unsigned>(std::stoi(s.substr(4, 2)))},
                       day{static_cast<unsigned>(std::stoi(s.substr(6, 2)))}};
    if (ymd.ok()) return ymd;
  }
  throw Error(ErrorCode::kValidation, fmt::format("\"{}\" is not a YYYYMMDD date", text));
}

DateRange ResolveTimePhrase(std::string_view phrase, std::chrono::year_month_day reference) {
  using namespace std::chrono;
  std::string p = Normalize(phrase);
  sys_days today{reference};
  if (p == "today") return {FormatDate(reference), FormatDate(reference)};
  if (p == "this week" || p == "last week") {
    // ISO weeks start on Monday.
    unsigned from_monday = (weekday{today}.c_encoding() + 6) % 7;
    sys_days monday = today - days{from_monday};
    if (p == "last week") monday -= days{7};
    return {FormatDate(year_month_day{monday}), FormatDate(year_month_day{monday + days{6}})};
  }
  if (p == "this month") {
    year_month_day first{reference.year(), reference.month(), day{1}};
    year_month_day last{year_month_day_last{reference.year(), month_day_last{reference.month()}}};
    return {FormatDate(first), FormatDate(last)};
  }
  throw Error(ErrorCode::kUnknownTimePhrase,
              fmt::format("unknown time phrase \"{}\"; try today, this week, last week or "
                          "this month",
                          phrase));
}

BuiltQuery BuildQuery(const Ontology& ontology, const std::vector<std::string>& terms,
                      const QueryOptions& options) {
  BuiltQuery out;
  out.query.patient_scope = options.patient_scope;
  out.query.date_range = options.date_range;
  out.query.exclude_region = options.exclude_region;
  for (const std::string& text : terms) {
    std::vector<ConceptRef> matches;
    if (!Ontology::NormalizeSurface(text).empty()) matches = ontology.Lookup(text);
    std::optional<QueryTerm> term;
    for (const ConceptRef& ref : matches) {  // sorted by IRI
      if (auto d = DimensionOf(ref.source)) {
        term = QueryTerm{ref, *d, text};
        break;
      }
    }
    if (term) {
      out.query.terms.push_back(std::move(*term));
    } else {
      out.unknown_terms.push_back(text);
    }
  }
  if (out.query.terms.empty() && !out.query.date_range) {
    std::string detail =
        out.unknown_terms.empty()
            ? std::string("no search terms given")
            : fmt::format("no known concept in: {}", fmt::join(out.unknown_terms, ", "));
    throw Error(ErrorCode::kEmptyQuery, detail);
  }
  ValidateQuery(out.query);
  return out;
}

std::optional<Explanation> ScoreAnnotationSet(const Ontology& ontology, const QueryTerm& term,
                                              const std::vector<Annotation>& annotations,
                                              const RankParams& params) {
  std::vector<const Annotation*> ordered;
  for (const Annotation& a : annotations) {
    if (!a.superseded_by) ordered.push_back(&a);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Annotation* x, const Annotation* y) { return x->id < y->id; });

  std::optional<Explanation> best;
  const double weight = params.Weight(term.dimension);
  for (const Annotation* a : ordered) {
    for (const ConceptRef& c : SlotConcepts(*a, term.dimension)) {
      if (!ontology.Contains(c.iri) || !ontology.Contains(term.ref.iri)) continue;
      auto d = ontology.Distance(term.ref.iri, c.iri, kBothRelations);
      if (!d || *d > params.max_depth) continue;
      double contribution = weight * std::pow(params.lambda, *d) * a->confidence;
      if (!best || contribution > best->contribution) {
        best = Explanation{term, c.iri, a->id, a->region, *d, contribution};
      }
    }
  }
  if (best && best->contribution <= 0.0) return std::nullopt;
  return best;
}

std::vector<Annotation> PatientAnnotations(const Store& store, const Ontology& ontology,
                                           const Term& patient,
                                           const std::optional<Term>& exclude_region) {
  std::vector<Term> targets;
  for (const Term& study : store.Objects(patient, vocab::HasStudy())) {
    for (const Term& series : store.Objects(study, vocab::HasSeries())) {
      targets.push_back(series);
      for (const Term& image : store.Objects(series, vocab::HasImage())) {
        targets.push_back(image);
      }
    }
  }
  std::vector<Annotation> out;
  for (const Term& target : targets) {
    for (const Term& region : store.Subjects(vocab::RegionOf(), target)) {
      if (exclude_region && region == *exclude_region) continue;
      for (const Term& id : store.Subjects(vocab::Annotates(), region)) {
        auto a = AnnotationService::ReadAnnotation(store, ontology, id);
        if (a && !a->superseded_by) out.push_back(std::move(*a));
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Annotation& x, const Annotation& y) { return x.id < y.id; });
  return out;
}

std::vector<ScoredResult> SemanticSearch(const Store& store, const Ontology& ontology,
                                         const SearchQuery& query, const RankParams& params) {
  ValidateQuery(query);
  params.Validate();

  std::vector<Term> patients = store.Subjects(vocab::Type(), vocab::Patient());
  std::vector<ScoredResult> results;
  for (const Term& patient : patients) {
    if (query.patient_scope && patient != *query.patient_scope) continue;
    if (query.date_range) {
      bool in_range = false;
      for (const Term& study : store.Objects(patient, vocab::HasStudy())) {
        auto date = store.FirstObject(study, vocab::StudyDate());
        if (date && date->value() >= query.date_range->start &&
            date->value() <= query.date_range->end) {
          in_range = true;
        }
      }
      if (!in_range) continue;
    }

    auto annotations = PatientAnnotations(store, ontology, patient, query.exclude_region);
    ScoredResult r;
    r.patient = patient;
    const Explanation* top = nullptr;
    for (const QueryTerm& term : query.terms) {
      if (auto e = ScoreAnnotationSet(ontology, term, annotations, params)) {
        r.score += e->contribution;
        r.explanations.push_back(std::move(*e));
      }
    }
    for (const Explanation& e : r.explanations) {
      if (top == nullptr || e.contribution > top->contribution) top = &e;
    }
    if (top != nullptr) r.best_region = top->region;
    if (r.score <= 0.0 && !query.terms.empty()) continue;
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(), [](const ScoredResult& a, const ScoredResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.patient < b.patient;
  });
  return results;
}

namespace {

SimilarResult SimilarBase(const Store& store, const Ontology& ontology, const Term& region,
                          std::set<Term>& seen) {
  if (!store.Contains({region, vocab::Type(), vocab::ImageRegion()})) {
    throw Error(ErrorCode::kNotFound, "unknown region " + region.value());
  }
  std::vector<Annotation> annotations;
  for (const Term& id : store.Subjects(vocab::Annotates(), region)) {
    auto a = AnnotationService::ReadAnnotation(store, ontology, id);
    if (a && !a->superseded_by) annotations.push_back(std::move(*a));
  }
  if (annotations.empty()) {
    throw Error(ErrorCode::kPrecondition,
                "region " + region.value() + " has no annotation to compare against");
  }
  std::sort(annotations.begin(), annotations.end(),
            [](const Annotation& x, const Annotation& y) { return x.id < y.id; });

  SimilarResult out;
  auto add = [&](const ConceptRef& ref) {
    auto d = DimensionOf(ref.source);
    if (!d || !seen.insert(ref.iri).second) return;
    out.query.terms.push_back(QueryTerm{ref, *d, ontology.Label(ref.iri)});
  };
  for (const Annotation& a : annotations) {
    if (a.anatomy) add(*a.anatomy);
    for (const ConceptRef& v : a.visual) add(v);
    if (a.disease) add(*a.disease);
  }
  out.query.exclude_region = region;
  return out;
}

}  // namespace

SimilarResult FindSimilarLesions(const Store& store, const Ontology& ontology,
                                 const Term& region, const std::vector<QueryTerm>& extra_terms,
                                 const RankParams& params) {
  std::set<Term> seen;
  SimilarResult out = SimilarBase(store, ontology, region, seen);
  for (const QueryTerm& t : extra_terms) {
    if (seen.insert(t.ref.iri).second) out.query.terms.push_back(t);
  }
  out.results = SemanticSearch(store, ontology, out.query, params);
  return out;
}

SimilarResult FindSimilarLesions(const Store& store, const Ontology& ontology,
                                 const Term& region, const std::vector<std::string>& extra_terms,
                                 const RankParams& params) {
  std::set<Term> seen;
  SimilarResult out = SimilarBase(store, ontology, region, seen);
  for (const std::string& text : extra_terms) {
    try {
      BuiltQuery extra = BuildQuery(ontology, {text});
      const QueryTerm& t = extra.query.terms.front();
      if (seen.insert(t.ref.iri).second) out.query.terms.push_back(t);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyQuery) throw;
      out.unknown_terms.push_back(text);
    }
  }
  out.results = SemanticSearch(store, ontology, out.query, params);
  return out;
}

}  // namespace medico::search

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
#include <set>

#include <fmt/format.h>

#include "medico/dialogue/dialogue.h"
#include "medico/dialogue/views.h"
#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::dialogue {

using annotation::AnnotationService;
using nlohmann::json;
namespace chr = std::chrono;
using namespace views;  // NOLINT

// ---- presentation helpers ------------------------------------------------------

std::string_view ActionName(Action action) {
  switch (action) {
    case Action::kOpen: return "open";
    case Action::kRearrange: return "rearrange";
    case Action::kHighlight: return "highlight";
    case Action::kClose: return "close";
  }
  return "open";
}

std::string_view PanelName(Panel panel) {
  switch (panel) {
    case Panel::kPatientSearch: return "PatientSearch";
    case Panel::kPatientFinding: return "PatientFinding";
    case Panel::kImageAnnotation: return "ImageAnnotation";
    case Panel::kBrowser: return "Browser";
    case Panel::kBackground: return "Background";
  }
  return "Background";
}

json ToJson(const SieDirective& d) {
  return {{"action", ActionName(d.action)}, {"panel", PanelName(d.panel)}, {"payload", d.payload}};
}

json ToJson(const SystemResponse& r) {
  json directives = json::array();
  for (const SieDirective& d : r.directives) directives.push_back(ToJson(d));
  return {{"speakText", r.speak_text}, {"directives", directives}};
}

std::vector<std::string> PayloadIris(const json& payload) {
  std::vector<std::string> out;
  std::function<void(const json&)> walk = [&](const json& j) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "iri" && it.value().is_string()) out.push_back(it.value().get<std::string>());
        else walk(it.value());
      }
    } else if (j.is_array()) {
      for (const json& e : j) walk(e);
    }
  };
  walk(payload);
  return out;
}

std::vector<std::string> UnresolvedIris(const Store& store, const SystemResponse& response) {
  std::vector<std::string> out;
  for (const SieDirective& d : response.directives) {
    for (const std::string& iri : PayloadIris(d.payload)) {
      if (!Term::IsValidIri(iri) || !store.HasSubject(Term::Iri(iri))) out.push_back(iri);
    }
  }
  return out;
}

std::string DisplayName(std::string_view pn) {
  // family^given^middle^prefix^suffix
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t caret = pn.find('^', start);
    parts.emplace_back(pn.substr(start, caret - start));
    if (caret == std::string_view::npos) break;
    start = caret + 1;
  }
  std::vector<std::string> ordered;
  auto add = [&](std::size_t i) {
    if (i < parts.size() && !parts[i].empty()) ordered.push_back(parts[i]);
  };
  add(3);
  add(1);
  add(2);
  add(0);
  add(4);
  std::string out;
  for (const std::string& p : ordered) out += (out.empty() ? "" : " ") + p;
  return out.empty() ? std::string(pn) : out;
}

namespace {

std::string ListJoin(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::vector<ConceptRef> ListItems(const Ontology& ontology, const FeatureStructure& fs,
                                  const std::vector<std::string>& path) {
  std::vector<ConceptRef> out;
  auto at = fs.Walk(path);
  while (at && !fs.node(*at).features.empty()) {
    const auto& node = fs.node(*at);
    auto first = node.features.find("FIRST");
    if (first == node.features.end()) break;
    const auto& item = fs.node(first->second);
    if (item.value) out.push_back(ontology.Get(Term::Iri(*item.value)));
    auto rest = node.features.find("REST");
    if (rest == node.features.end()) break;
    at = rest->second;
  }
  return out;
}

std::optional<ConceptRef> ConceptSlot(const Ontology& ontology, const FeatureStructure& fs,
                                      const std::string& slot) {
  auto at = fs.Walk({slot});
  if (!at || !fs.node(*at).value) return std::nullopt;
  return ontology.Get(Term::Iri(*fs.node(*at).value));
}

std::optional<std::string> AtomAt(const FeatureStructure& fs, const std::vector<std::string>& path) {
  auto at = fs.Walk(path);
  if (!at || !fs.node(*at).value) return std::nullopt;
  return fs.node(*at).value;
}

Term RequireReferent(const InterpretedAct& act, const std::string& slot, TargetKind kind) {
  auto t = BoundReferent(act, {slot});
  if (!t) {
    throw Error(ErrorCode::kPrecondition,
                fmt::format("no {} was identified", TargetKindName(kind)));
  }
  return *t;
}

search::QueryTerm TermOf(const Ontology& ontology, const ConceptRef& ref) {
  auto d = search::DimensionOf(ref.source);
  if (!d) throw Error(ErrorCode::kValidation, ref.iri.value() + " is not a search concept");
  return {ref, *d, ontology.Label(ref.iri)};
}

std::string Plural(std::size_t n, std::string_view word) {
  return fmt::format("{} {}{}", n, word, n == 1 ? "" : "s");
}

std::string_view Failing(Intent intent) {
  switch (intent) {
    case Intent::kShowRecords: return "show the records";
    case Intent::kOpenImages: return "open the images";
    case Intent::kSelectRegion: return "select the region";
    case Intent::kAnnotate: return "annotate the region";
    case Intent::kFindSimilar: return "find similar lesions";
    case Intent::kGetFindings: return "get the findings";
    case Intent::kNavigateConcept: return "open the concept browser";
    case Intent::kClarify: return "continue";
  }
  return "continue";
}

}  // namespace

// ---- manager -------------------------------------------------------------------

DialogueManager::DialogueManager(const TypeHierarchy& hierarchy, const Grammar& grammar,
                                 Backend backend)
    : hierarchy_(hierarchy), grammar_(grammar), backend_(std::move(backend)) {}

std::pair<DialogueState, SystemResponse> DialogueManager::Execute(const InterpretedAct& act,
                                                                  const DialogueState& state) {
  DialogueState next = state;
  try {
    SystemResponse response = Run(act, next);
    next.RecordAct(act);
    return {std::move(next), std::move(response)};
  } catch (const Error& e) {
    SystemResponse apology;
    apology.speak_text = fmt::format("Sorry, I could not {}: {}.", Failing(act.intent), e.what());
    return {state, std::move(apology)};
  }
}

SystemResponse DialogueManager::Run(const InterpretedAct& act, DialogueState& state) {
  const Ontology& ontology = backend_.ontology;
  SharedStore& store = backend_.store;
  const FeatureStructure& slots = act.slots;
  SystemResponse out;

  if (act.intent != Intent::kClarify && !act.unresolved.empty()) {
    throw Error(ErrorCode::kPrecondition, "the act still has open referents");
  }

  switch (act.intent) {
    case Intent::kClarify: {
      out.speak_text = act.Question();
      if (auto partial = slots.At({"PARTIAL"})) {
        InterpretedAct p;
        p.intent = *ParseIntent(partial->root().type);
        p.slots = *partial;
        for (Deictic d : act.unresolved) {
          d.path.erase(d.path.begin());
          p.unresolved.push_back(std::move(d));
        }
        state.pending = PendingClarification{out.speak_text, std::move(p)};
      }
      return out;
    }

    case Intent::kShowRecords: {
      search::SearchQuery q;
      if (auto d = ConceptSlot(ontology, slots, "DISEASE")) q.terms.push_back(TermOf(ontology, *d));
      for (const ConceptRef& c : ListItems(ontology, slots, {"CONCEPTS"})) {
        q.terms.push_back(TermOf(ontology, c));
      }
      if (auto start = AtomAt(slots, {"TIME", "START"})) {
        q.date_range = search::DateRange{*start, *AtomAt(slots, {"TIME", "END"})};
      }
      json payload = store.Read([&](const Store& s) {
        auto results = search::SemanticSearch(s, ontology, q, backend_.rank);
        json query = QueryJson(ontology, q);
        if (auto phrase = AtomAt(slots, {"TIME", "PHRASE"})) query["phrase"] = *phrase;
        return json{{"query", query}, {"rows", ResultRows(s, ontology, results, q.date_range)}};
      });
      std::size_t n = payload["rows"].size();
      out.speak_text = n == 0 ? "No matching patient records."
                              : fmt::format("{} found.", Plural(n, "patient record"));
      out.directives.push_back({Action::kOpen, Panel::kPatientSearch, std::move(payload)});
      state.pending.reset();
      return out;
    }

    case Intent::kOpenImages: {
      Term patient = RequireReferent(act, "PATIENT", TargetKind::kPatient);
      std::vector<ConceptRef> organs = ListItems(ontology, slots, {"ORGANS"});
      std::optional<Term> first_image;
      json payload = store.Read([&](const Store& s) {
        if (!s.Contains({patient, vocab::Type(), vocab::Patient()})) {
          throw Error(ErrorCode::kNotFound, "unknown patient " + patient.value());
        }
        std::vector<SeriesView> series = SeriesOfPatient(s, ontology, patient);
        std::vector<std::pair<std::size_t, const SeriesView*>> chosen;
        for (const SeriesView& v : series) {
          if (organs.empty()) {
            chosen.emplace_back(0, &v);
            continue;
          }
          for (std::size_t k = 0; k < organs.size(); ++k) {
            ExpansionSpec down{{Relation::kIsA, Relation::kPartOf}, {Direction::kDown},
                               Ontology::kDistanceCap};
            auto below = ontology.Expand(organs[k].iri, down);
            bool hit = v.anatomy && std::any_of(below.begin(), below.end(), [&](const auto& e) {
                         return e.ref.iri == v.anatomy->iri;
                       });
            if (hit) {
              chosen.emplace_back(k, &v);
              break;
            }
          }
        }
        std::stable_sort(chosen.begin(), chosen.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        json images = json::array();
        for (const auto& [k, v] : chosen) {
          for (const Term& image : s.Objects(v->series, vocab::HasImage())) {
            if (!first_image) first_image = image;
            images.push_back(ImageJson(s, ontology, *v, image, images.size() + 1));
          }
        }
        json organ_list = json::array();
        for (const ConceptRef& o : organs) organ_list.push_back(ConceptJson(ontology, o));
        return json{{"patient", PatientJson(s, patient)}, {"organs", organ_list}, {"images", images}};
      });
      std::string name = store.Read([&](const Store& s) { return PatientDisplay(s, patient); });
      std::size_t n = payload["images"].size();
      std::vector<std::string> organ_names;
      for (const ConceptRef& o : organs) organ_names.push_back(ontology.Phrase(o.iri));
      if (n == 0) {
        throw Error(ErrorCode::kNotFound,
                    organs.empty() ? "there are no images of " + name
                                   : "there are no images of " + name + " for " + ListJoin(organ_names));
      }
      out.speak_text = fmt::format("Showing {} of {}{}.", Plural(n, "image"), name,
                                   organs.empty() ? "" : ": " + ListJoin(organ_names));
      out.directives.push_back({Action::kOpen, Panel::kImageAnnotation, std::move(payload)});
      out.directives.push_back({Action::kRearrange, Panel::kBackground,
                                json{{"layout", "images"}, {"patient", {{"iri", patient.value()}}}}});
      state.focus = Focus{patient, first_image, std::nullopt};
      state.pending.reset();
      return out;
    }

    case Intent::kSelectRegion: {
      Term region = RequireReferent(act, "REGION", TargetKind::kRegion);
      json payload = store.Read([&](const Store& s) {
        json r = RegionJson(s, ontology, region);
        auto target = AnnotationService::ReadRegion(s, region)->target;
        auto patient = AnnotationService::PatientOf(s, target);
        state.focus.region = region;
        if (s.Contains({target, vocab::Type(), vocab::Image()})) state.focus.image = target;
        if (patient) state.focus.patient = *patient;
        json p = {{"focus", "regions"}, {"region", r}};
        if (patient) p["patient"] = {{"iri", patient->value()}};
        return p;
      });
      out.directives.push_back({Action::kRearrange, Panel::kImageAnnotation, std::move(payload)});
      state.pending.reset();
      return out;
    }

    case Intent::kAnnotate: {
      Term region = RequireReferent(act, "REGION", TargetKind::kRegion);
      annotation::Payload p;
      p.user = backend_.user;
      p.origin = annotation::Origin::kManual;
      p.confidence = 1.0;
      if (auto a = ConceptSlot(ontology, slots, "ANATOMY")) p.anatomy = a->iri;
      for (const ConceptRef& c : ListItems(ontology, slots, {"FINDINGS"})) {
        switch (c.source) {
          case ConceptSource::kAnatomy:
            if (p.anatomy) throw Error(ErrorCode::kValidation, "more than one anatomical location given");
            p.anatomy = c.iri;
            break;
          case ConceptSource::kImaging:
            if (std::find(p.visual.begin(), p.visual.end(), c.iri) == p.visual.end()) {
              p.visual.push_back(c.iri);
            }
            break;
          case ConceptSource::kDisease:
            if (p.disease) throw Error(ErrorCode::kValidation, "only one diagnosis per annotation");
            p.disease = c.iri;
            break;
          default:
            break;
        }
      }
      annotation::AnnotateResult result = backend_.annotations.Annotate(region, p);
      json payload = store.Read([&](const Store& s) {
        auto r = AnnotationService::ReadRegion(s, region);
        auto patient = AnnotationService::PatientOf(s, r->target);
        state.focus.region = region;
        if (s.Contains({r->target, vocab::Type(), vocab::Image()})) state.focus.image = r->target;
        if (patient) state.focus.patient = *patient;
        json a = AnnotationJson(ontology, result.annotation);
        json labels = a["labels"];
        return json{{"region", {{"iri", region.value()},
                                {"geometry", annotation::FormatGeometry(r->geometry)},
                                {"target", {{"iri", r->target.value()}}}}},
                    {"annotation", a},
                    {"labels", labels}};
      });
      out.speak_text = result.confirmation;
      out.directives.push_back({Action::kHighlight, Panel::kImageAnnotation, std::move(payload)});
      state.pending.reset();
      return out;
    }

    case Intent::kFindSimilar: {
      Term region = RequireReferent(act, "REGION", TargetKind::kRegion);
      std::vector<search::QueryTerm> extra;
      for (const ConceptRef& c : ListItems(ontology, slots, {"CHARACTERISTICS"})) {
        extra.push_back(TermOf(ontology, c));
      }
      std::string hit_name;
      std::size_t hits = 0;
      store.Read([&](const Store& s) {
        search::SimilarResult sim =
            search::FindSimilarLesions(s, ontology, region, extra, backend_.rank);
        hits = sim.results.size();
        if (sim.results.empty()) return;
        const search::ScoredResult& first = sim.results.front();
        auto source_patient =
            AnnotationService::PatientOf(s, AnnotationService::ReadRegion(s, region)->target);

        json query = QueryJson(ontology, sim.query);
        query["source"] = {{"iri", region.value()}};
        out.directives.push_back(
            {Action::kOpen, Panel::kPatientSearch,
             json{{"query", query}, {"rows", ResultRows(s, ontology, sim.results, std::nullopt)}}});

        // The first hit's images that hold a matching region.
        std::set<Term> shown;
        json images = json::array();
        std::optional<Term> first_image;
        for (const SeriesView& v : SeriesOfPatient(s, ontology, first.patient)) {
          for (const Term& image : s.Objects(v.series, vocab::HasImage())) {
            bool matched = false;
            for (const auto& e : first.explanations) {
              auto r = AnnotationService::ReadRegion(s, e.region);
              if (r && (r->target == image || r->target == v.series)) matched = true;
            }
            if (!matched || !shown.insert(image).second) continue;
            if (!first_image) first_image = image;
            images.push_back(ImageJson(s, ontology, v, image, images.size() + 1));
          }
        }
        json open = {{"patient", PatientJson(s, first.patient)}, {"images", images}};
        if (first.best_region) open["region"] = {{"iri", first.best_region->value()}};
        out.directives.push_back({Action::kOpen, Panel::kImageAnnotation, std::move(open)});

        json patients = json::array();
        if (source_patient) patients.push_back({{"iri", source_patient->value()}});
        patients.push_back({{"iri", first.patient.value()}});
        out.directives.push_back({Action::kRearrange, Panel::kBackground,
                                  json{{"layout", "comparison"}, {"patients", patients}}});

        hit_name = PatientDisplay(s, first.patient);
        state.focus = Focus{first.patient, first_image, first.best_region};
      });
      out.speak_text = hits == 0 ? "No similar lesions found."
                                 : fmt::format("{} found. Showing {}.",
                                               Plural(hits, "similar case"), hit_name);
      state.pending.reset();
      return out;
    }

    case Intent::kGetFindings: {
      Term patient = RequireReferent(act, "PATIENT", TargetKind::kPatient);
      json payload = store.Read([&](const Store& s) {
        if (!s.Contains({patient, vocab::Type(), vocab::Patient()})) {
          throw Error(ErrorCode::kNotFound, "unknown patient " + patient.value());
        }
        std::vector<std::pair<std::string, Term>> studies;
        for (const Term& study : s.Objects(patient, vocab::HasStudy())) {
          studies.emplace_back(Literal(s, study, vocab::StudyDate()), study);
        }
        std::sort(studies.begin(), studies.end(), std::greater<>());
        std::string text;
        json reports = json::array();
        for (const auto& [date, study] : studies) {
          for (const Term& t : s.Objects(study, vocab::FindingsText())) {
            if (!text.empty()) text += "\n\n";
            text += t.value();
            reports.push_back({{"iri", study.value()}, {"date", date}});
          }
        }
        if (text.empty()) {
          // No written report: summarise the current annotations instead.
          for (const auto& a : search::PatientAnnotations(s, ontology, patient, std::nullopt)) {
            std::vector<std::string> labels;
            for (const ConceptRef& c : AnnotationConcepts(a)) labels.push_back(ontology.Label(c.iri));
            if (labels.empty()) continue;
            if (!text.empty()) text += '\n';
            text += ListJoin(labels) + ".";
          }
        }
        if (text.empty()) throw Error(ErrorCode::kNotFound, "there are no findings for this patient");
        return json{{"patient", PatientJson(s, patient)},
                    {"reports", reports},
                    {"text", text},
                    {"groups", Highlights(ontology, text)}};
      });
      std::string name = store.Read([&](const Store& s) { return PatientDisplay(s, patient); });
      out.speak_text = fmt::format("Findings of {}.", name);
      out.directives.push_back({Action::kOpen, Panel::kPatientFinding, std::move(payload)});
      state.focus.patient = patient;
      state.pending.reset();
      return out;
    }

    case Intent::kNavigateConcept: {
      auto c = ConceptSlot(ontology, slots, "CONCEPT");
      if (!c) throw Error(ErrorCode::kPrecondition, "no concept was named");
      ConceptNeighbors n = ontology.Neighbors(c->iri);
      auto list = [](const std::vector<LabeledConcept>& v) {
        json a = json::array();
        for (const auto& l : v) a.push_back({{"iri", l.iri.value()}, {"label", l.label}});
        return a;
      };
      json payload = {{"concept", {{"iri", n.subject.iri.value()},
                                   {"label", n.subject.label},
                                   {"source", ConceptSourceName(n.source)}}},
                      {"labels", n.labels},
                      {"parents", list(n.parents)},
                      {"children", list(n.children)},
                      {"wholes", list(n.wholes)},
                      {"parts", list(n.parts)}};
      out.speak_text = fmt::format("Showing {} in the browser.", n.subject.label);
      out.directives.push_back({Action::kOpen, Panel::kBrowser, std::move(payload)});
      state.pending.reset();
      return out;
    }
  }
  return out;
}

namespace {

// A gesture that resolved a referent is used up; otherwise a later "this
// patient" would keep binding it for as long as it stays inside the window.
void ConsumeGestures(const InterpretedAct& act, const InterpretedAct& fused, DialogueState& state) {
  bool wrapped = fused.intent == Intent::kClarify && act.intent != Intent::kClarify;
  for (const Deictic& d : act.unresolved) {
    std::vector<std::string> path = d.path;
    if (wrapped) path.insert(path.begin(), "PARTIAL");
    auto bound = BoundReferent(fused, path);
    path.push_back("VIA");
    auto via = fused.slots.Walk(path);
    if (!bound || !via || fused.slots.node(*via).value != "gesture") continue;
    auto& buffer = state.recent_gestures;
    for (auto it = buffer.rbegin(); it != buffer.rend(); ++it) {
      if (it->kind == d.kind && it->target == *bound) {
        buffer.erase(std::next(it).base());
        break;
      }
    }
  }
}

}  // namespace

TurnResult DialogueManager::Turn(DialogueState& state, std::string_view text,
                                 std::vector<PointingEvent> pointing) {
  const auto now = backend_.clock();
  std::optional<PointingEvent> latest;
  for (PointingEvent& p : pointing) {
    if (!latest || p.timestamp >= latest->timestamp) latest = p;
    state.AddGesture(std::move(p));
  }

  std::vector<InterpretedAct> acts;
  bool blank = std::all_of(text.begin(), text.end(),
                           [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  if (blank) {
    if (!latest) {
      acts.push_back(InterpretedAct::Clarify("I did not catch that. What would you like to do?"));
    } else if (state.pending) {
      acts.push_back(state.pending->partial);
    } else if (latest->kind == TargetKind::kRegion) {
      InterpretedAct select;
      select.intent = Intent::kSelectRegion;
      select.slots = FeatureStructure(std::string(IntentName(Intent::kSelectRegion)))
                         .With({"REGION"}, FeatureStructure(fs_types::RefType(TargetKind::kRegion)));
      select.unresolved.push_back({{"REGION"}, TargetKind::kRegion});
      acts.push_back(std::move(select));
    } else {
      // Pointing at a patient row or an image just moves the focus.
      TurnResult result;
      bool known = backend_.store.Read([&](const Store& s) { return s.HasSubject(latest->target); });
      if (!known) {
        result.response.speak_text = "Sorry, I could not find what you pointed at.";
        return result;
      }
      json payload = {{"iri", latest->target.value()}};
      if (latest->kind == TargetKind::kPatient) {
        state.focus.patient = latest->target;
        result.response.directives.push_back(
            {Action::kHighlight, Panel::kPatientSearch, json{{"patient", payload}}});
      } else {
        state.focus.image = latest->target;
        result.response.directives.push_back(
            {Action::kHighlight, Panel::kImageAnnotation, json{{"image", payload}}});
      }
      return result;
    }
  } else {
    acts = ParseUtterance(text, grammar_, backend_.ontology, chr::floor<chr::days>(now));
  }

  TurnResult result;
  for (const InterpretedAct& act : acts) {
    InterpretedAct fused = Fuse(hierarchy_, act, state, now, backend_.fusion);
    auto [next, response] = Execute(fused, state);
    state = std::move(next);
    ConsumeGestures(act, fused, state);
    if (!response.speak_text.empty()) {
      if (!result.response.speak_text.empty()) result.response.speak_text += ' ';
      result.response.speak_text += response.speak_text;
    }
    for (auto& d : response.directives) result.response.directives.push_back(std::move(d));
    result.acts.push_back(std::move(fused));
  }
  return result;
}

}  // namespace medico::dialogue

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

#ifndef MEDICO_DIALOGUE_DIALOGUE_H_
#define MEDICO_DIALOGUE_DIALOGUE_H_

#include <chrono>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "medico/annotation/annotation.h"
#include "medico/dialogue/feature_structure.h"
#include "medico/ontology/ontology.h"
#include "medico/search/search.h"
#include "medico/store/triple_store.h"

namespace medico::dialogue {

enum class Intent {
  kShowRecords,
  kOpenImages,
  kSelectRegion,
  kAnnotate,
  kFindSimilar,
  kGetFindings,
  kNavigateConcept,
  kClarify,
};
std::string_view IntentName(Intent intent);
std::optional<Intent> ParseIntent(std::string_view name);

enum class TargetKind { kRegion, kPatient, kImage };
std::string_view TargetKindName(TargetKind kind);
std::optional<TargetKind> ParseTargetKind(std::string_view name);

// Slot node types used inside act structures. Concepts are atoms whose value
// is the IRI; lists are cons/nil chains with FIRST/REST; referents are
// <kind>-ref nodes that gain ID and VIA once bound.
namespace fs_types {
inline constexpr std::string_view kCons = "cons";
inline constexpr std::string_view kNil = "nil";
inline constexpr std::string_view kTimeRange = "time-range";
inline constexpr std::string_view kDate = "date";
inline constexpr std::string_view kIri = "iri";
inline constexpr std::string_view kString = "string";
std::string ConceptType(ConceptSource source);  // e.g. "disease-concept"
std::string RefType(TargetKind kind);           // e.g. "region-ref"
}  // namespace fs_types

struct Deictic {
  std::vector<std::string> path;
  TargetKind kind = TargetKind::kRegion;
  friend bool operator==(const Deictic&, const Deictic&) = default;
};

struct InterpretedAct {
  Intent intent = Intent::kClarify;
  FeatureStructure slots;  // root type is the intent name
  std::vector<Deictic> unresolved;

  static InterpretedAct Clarify(std::string question);
  // Question text of a Clarify act.
  std::string Question() const;
};

struct PointingEvent {
  TargetKind kind = TargetKind::kRegion;
  Term target;
  std::chrono::system_clock::time_point timestamp;
};

struct Focus {
  std::optional<Term> patient;
  std::optional<Term> image;
  std::optional<Term> region;
  friend bool operator==(const Focus&, const Focus&) = default;
};

struct PendingClarification {
  std::string question;
  InterpretedAct partial;
};

struct DialogueState {
  static constexpr std::size_t kActHistory = 20;
  static constexpr std::size_t kGestureBuffer = 10;

  std::string session_id;
  Focus focus;
  std::deque<InterpretedAct> last_acts;
  std::optional<PendingClarification> pending;
  std::deque<PointingEvent> recent_gestures;  // oldest first

  // Keeps the buffer time-ordered and bounded.
  void AddGesture(PointingEvent event);
  void RecordAct(InterpretedAct act);
};

// ---- grammar ---------------------------------------------------------------

// Ordered rules, one per line:
//   pattern => Intent(SLOT=capture, SLOT=@kind, ...)
// Pattern tokens are literal words (matched case-insensitively), [word]
// optional words, a|b alternatives and typed captures:
//   {x:concept}  {x:concept/disease}  one ontology concept (source optional)
//   {x:concepts} {x:concepts/imaging} a list joined by , and or and/or then
//   {x:time}     a time phrase such as "this week"
//   {x:deictic/region}  one of this that here there, leaves the slot open
//   {x:text}     any non-empty span, stored as a string atom
// SLOT=@kind adds an open referent of that kind without consuming words.
struct PatternToken {
  enum class Kind { kWord, kOptional, kCapture };
  enum class Capture { kConcept, kConcepts, kTime, kDeictic, kText };
  Kind kind = Kind::kWord;
  std::vector<std::string> words;  // alternatives, lower case
  std::string name;
  Capture capture = Capture::kConcept;
  std::optional<ConceptSource> source;
  TargetKind deictic = TargetKind::kRegion;
};

struct SlotBinding {
  std::string slot;
  std::string capture;                // empty for implicit referents
  std::optional<TargetKind> implicit;
};

struct Rule {
  std::size_t line = 0;
  std::vector<PatternToken> pattern;
  Intent intent = Intent::kClarify;
  std::vector<SlotBinding> bindings;
};

class Grammar {
 public:
  // Throws ParseError (with line) for malformed rules and Error(kValidation)
  // for intents or slot types missing from `hierarchy`.
  static Grammar Parse(std::string_view text, const TypeHierarchy& hierarchy);

  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
};

// Bundled hierarchy and grammar files.
const TypeHierarchy& BundledHierarchy();
const Grammar& BundledGrammar();

// Splits `text` into sentences and interprets each with the first rule that
// matches; sentences nothing matches become Clarify acts (collapsed into a
// single one when no sentence matched). `today` anchors time phrases.
std::vector<InterpretedAct> ParseUtterance(std::string_view text, const Grammar& grammar,
                                           const Ontology& ontology,
                                           std::chrono::year_month_day today);

// ---- fusion ----------------------------------------------------------------

struct FusionParams {
  std::chrono::milliseconds window{5000};
};

// Binds each open referent, in order, to the latest unused gesture of the
// same kind within the window around `now`, then to the matching focus
// entry. Anything still open turns the act into a Clarify naming it.
InterpretedAct Fuse(const TypeHierarchy& hierarchy, const InterpretedAct& act,
                    const DialogueState& state, std::chrono::system_clock::time_point now,
                    const FusionParams& params = {});

// Bound referent IRI at `path`, if any.
std::optional<Term> BoundReferent(const InterpretedAct& act, const std::vector<std::string>& path);

struct BoundRef {
  std::string path;  // dotted, e.g. "PARTIAL.REGION"
  Term target;
  std::string via;   // "gesture" or "focus"
};
// Every bound referent, depth first in feature order.
std::vector<BoundRef> BoundReferents(const InterpretedAct& act);

// ---- presentation ----------------------------------------------------------

enum class Action { kOpen, kRearrange, kHighlight, kClose };
enum class Panel { kPatientSearch, kPatientFinding, kImageAnnotation, kBrowser, kBackground };
std::string_view ActionName(Action action);
std::string_view PanelName(Panel panel);

struct SieDirective {
  Action action = Action::kOpen;
  Panel panel = Panel::kBackground;
  nlohmann::json payload = nlohmann::json::object();
};

struct SystemResponse {
  std::string speak_text;
  std::vector<SieDirective> directives;
};

nlohmann::json ToJson(const SieDirective& directive);
nlohmann::json ToJson(const SystemResponse& response);

// Every string stored under an "iri" key anywhere in the payload.
std::vector<std::string> PayloadIris(const nlohmann::json& payload);
// IRIs that are not the subject of any triple in `store`.
std::vector<std::string> UnresolvedIris(const Store& store, const SystemResponse& response);

// "Maier^Peter" -> "Peter Maier".
std::string DisplayName(std::string_view person_name);

// ---- dialogue manager ------------------------------------------------------

struct Backend {
  SharedStore& store;
  const Ontology& ontology;
  annotation::AnnotationService& annotations;
  annotation::Clock clock;
  search::RankParams rank;
  FusionParams fusion;
  std::string user = "radiologist";
};

struct TurnResult {
  std::vector<InterpretedAct> acts;  // as executed (after fusion)
  SystemResponse response;
};

class DialogueManager {
 public:
  DialogueManager(const TypeHierarchy& hierarchy, const Grammar& grammar, Backend backend);

  // Deterministic given (act, state, store, clock). Backend failures give an
  // apologetic response with no directives and the state unchanged.
  std::pair<DialogueState, SystemResponse> Execute(const InterpretedAct& act,
                                                   const DialogueState& state);

  // Whole pipeline for one user turn: gestures are buffered, the text is
  // parsed, every act is fused and executed in order. Text-free turns with
  // gestures act on the latest one (a region selects it).
  TurnResult Turn(DialogueState& state, std::string_view text,
                  std::vector<PointingEvent> pointing);

  const TypeHierarchy& hierarchy() const { return hierarchy_; }
  const Backend& backend() const { return backend_; }

 private:
  SystemResponse Run(const InterpretedAct& act, DialogueState& state);

  const TypeHierarchy& hierarchy_;
  const Grammar& grammar_;
  Backend backend_;
};

}  // namespace medico::dialogue

#endif  // MEDICO_DIALOGUE_DIALOGUE_H_

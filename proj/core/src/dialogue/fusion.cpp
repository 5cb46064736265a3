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
#include <set>

#include <fmt/format.h>

#include "medico/dialogue/dialogue.h"
#include "medico/error.h"

namespace medico::dialogue {

InterpretedAct InterpretedAct::Clarify(std::string question) {
  InterpretedAct act;
  act.intent = Intent::kClarify;
  act.slots = FeatureStructure(std::string(IntentName(Intent::kClarify)))
                  .With({"QUESTION"}, FeatureStructure::Atom(std::string(fs_types::kString),
                                                             std::move(question)));
  return act;
}

std::string InterpretedAct::Question() const {
  if (auto q = slots.Walk({"QUESTION"}); q && slots.node(*q).value) {
    return *slots.node(*q).value;
  }
  return {};
}

void DialogueState::AddGesture(PointingEvent event) {
  auto at = std::upper_bound(
      recent_gestures.begin(), recent_gestures.end(), event.timestamp,
      [](auto t, const PointingEvent& e) { return t < e.timestamp; });
  recent_gestures.insert(at, std::move(event));
  while (recent_gestures.size() > kGestureBuffer) recent_gestures.pop_front();
}

void DialogueState::RecordAct(InterpretedAct act) {
  last_acts.push_back(std::move(act));
  while (last_acts.size() > kActHistory) last_acts.pop_front();
}

std::optional<Term> BoundReferent(const InterpretedAct& act,
                                  const std::vector<std::string>& path) {
  std::vector<std::string> id_path = path;
  id_path.push_back("ID");
  auto at = act.slots.Walk(id_path);
  if (!at || !act.slots.node(*at).value) return std::nullopt;
  return Term::Iri(*act.slots.node(*at).value);
}

namespace {
void CollectRefs(const FeatureStructure& fs, int node, const std::string& path,
                 std::vector<int>& trail, std::vector<BoundRef>& out);
}  // namespace

std::vector<BoundRef> BoundReferents(const InterpretedAct& act) {
  std::vector<BoundRef> out;
  std::vector<int> trail;
  CollectRefs(act.slots, 0, "", trail, out);
  return out;
}

namespace {

void CollectRefs(const FeatureStructure& fs, int node, const std::string& path,
                 std::vector<int>& trail, std::vector<BoundRef>& out) {
  // Shared nodes can be reached twice; cycles cannot recurse forever.
  if (std::find(trail.begin(), trail.end(), node) != trail.end()) return;
  const auto& n = fs.node(node);
  auto id = n.features.find("ID");
  if (id != n.features.end() && fs.node(id->second).value) {
    BoundRef ref{path, Term::Iri(*fs.node(id->second).value), {}};
    if (auto via = n.features.find("VIA"); via != n.features.end() && fs.node(via->second).value) {
      ref.via = *fs.node(via->second).value;
    }
    out.push_back(std::move(ref));
    return;
  }
  trail.push_back(node);
  for (const auto& [feature, child] : n.features) {
    CollectRefs(fs, child, path.empty() ? feature : path + "." + feature, trail, out);
  }
  trail.pop_back();
}

std::string KindList(const std::vector<Deictic>& open) {
  std::vector<std::string> names;
  for (const Deictic& d : open) {
    std::string n(TargetKindName(d.kind));
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  }
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += i + 1 == names.size() ? " and " : ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

InterpretedAct Fuse(const TypeHierarchy& hierarchy, const InterpretedAct& act,
                    const DialogueState& state, std::chrono::system_clock::time_point now,
                    const FusionParams& params) {
  if (act.unresolved.empty()) return act;
  InterpretedAct out = act;
  out.unresolved.clear();
  std::vector<Deictic> open;
  std::set<std::size_t> used;
  const std::string root = act.slots.root().type;

  auto bind = [&](const Deictic& d, const Term& target, std::string_view via) {
    FeatureStructure ref = FeatureStructure(fs_types::RefType(d.kind))
                               .With({"ID"}, FeatureStructure::Atom(std::string(fs_types::kIri),
                                                                    target.value()))
                               .With({"VIA"}, FeatureStructure::Atom(std::string(fs_types::kString),
                                                                     std::string(via)));
    auto unified = Unify(hierarchy, out.slots, FeatureStructure(root).With(d.path, ref));
    if (!unified) return false;
    out.slots = std::move(*unified);
    return true;
  };

  for (const Deictic& d : act.unresolved) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < state.recent_gestures.size(); ++i) {
      const PointingEvent& g = state.recent_gestures[i];
      if (g.kind != d.kind || used.count(i)) continue;
      auto gap = g.timestamp > now ? g.timestamp - now : now - g.timestamp;
      if (gap > params.window) continue;
      if (!best || g.timestamp >= state.recent_gestures[*best].timestamp) best = i;
    }
    if (best && bind(d, state.recent_gestures[*best].target, "gesture")) {
      used.insert(*best);
      continue;
    }
    const std::optional<Term>* focus = nullptr;
    switch (d.kind) {
      case TargetKind::kRegion: focus = &state.focus.region; break;
      case TargetKind::kPatient: focus = &state.focus.patient; break;
      case TargetKind::kImage: focus = &state.focus.image; break;
    }
    if (*focus && bind(d, **focus, "focus")) continue;
    open.push_back(d);
  }
  if (open.empty()) return out;

  InterpretedAct clarify = InterpretedAct::Clarify(
      fmt::format("Which {} do you mean? Please point at it.", KindList(open)));
  clarify.slots = clarify.slots.With({"PARTIAL"}, out.slots);
  for (Deictic d : open) {
    d.path.insert(d.path.begin(), "PARTIAL");
    clarify.unresolved.push_back(std::move(d));
  }
  return clarify;
}

}  // namespace medico::dialogue

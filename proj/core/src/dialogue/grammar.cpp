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
#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "medico/bundled_data.h"
#include "medico/dialogue/dialogue.h"
#include "medico/error.h"

namespace medico::dialogue {

namespace {

constexpr std::array<std::pair<Intent, std::string_view>, 8> kIntents{{
    {Intent::kShowRecords, "ShowRecords"},
    {Intent::kOpenImages, "OpenImages"},
    {Intent::kSelectRegion, "SelectRegion"},
    {Intent::kAnnotate, "Annotate"},
    {Intent::kFindSimilar, "FindSimilar"},
    {Intent::kGetFindings, "GetFindings"},
    {Intent::kNavigateConcept, "NavigateConcept"},
    {Intent::kClarify, "Clarify"},
}};

constexpr std::array<std::pair<TargetKind, std::string_view>, 3> kKinds{{
    {TargetKind::kRegion, "region"},
    {TargetKind::kPatient, "patient"},
    {TargetKind::kImage, "image"},
}};

const std::set<std::string, std::less<>> kDeicticWords{"this", "that", "here", "there"};
const std::set<std::string, std::less<>> kConnectives{"and", "or", "and/or", "then"};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> SplitAlternatives(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = s.find('|', start);
    out.push_back(Lower(s.substr(start, bar - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

// Lower-cased words with punctuation removed. '-', '/' and '\'' stay, and so
// does '.' between two alphanumerics (codes such as C81.1).
std::vector<std::string> Words(std::string_view sentence) {
  std::string cleaned;
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    char c = sentence[i];
    bool keep = alnum(c) || c == '-' || c == '/' || c == '\'' ||
                (c == '.' && i > 0 && i + 1 < sentence.size() && alnum(sentence[i - 1]) &&
                 alnum(sentence[i + 1]));
    cleaned += keep ? char(std::tolower(static_cast<unsigned char>(c))) : ' ';
  }
  return SplitWhitespace(cleaned);
}

std::vector<std::string> Sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool boundary = (c == '.' || c == '!' || c == '?' || c == ';') &&
                    (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (boundary) {
      out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  out.push_back(current);
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const std::string& s) { return Words(s).empty(); }),
            out.end());
  return out;
}

std::string Join(const std::vector<std::string>& words, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ' ';
    out += words[i];
  }
  return out;
}

PatternToken ParseCapture(std::string_view body, std::size_t line, std::size_t col) {
  PatternToken t;
  t.kind = PatternToken::Kind::kCapture;
  auto colon = body.find(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ParseError(line, col, "capture needs {name:type}");
  }
  t.name = std::string(body.substr(0, colon));
  std::string_view type = body.substr(colon + 1);
  std::string_view qualifier;
  if (auto slash = type.find('/'); slash != std::string_view::npos) {
    qualifier = type.substr(slash + 1);
    type = type.substr(0, slash);
  }
  if (type == "concept" || type == "concepts") {
    t.capture = type == "concept" ? PatternToken::Capture::kConcept
                                  : PatternToken::Capture::kConcepts;
    if (!qualifier.empty()) {
      t.source = ParseConceptSource(qualifier);
      if (!t.source) throw ParseError(line, col, "unknown concept source " + std::string(qualifier));
    }
  } else if (type == "time" || type == "text") {
    t.capture = type == "time" ? PatternToken::Capture::kTime : PatternToken::Capture::kText;
    if (!qualifier.empty()) throw ParseError(line, col, "unexpected qualifier");
  } else if (type == "deictic") {
    t.capture = PatternToken::Capture::kDeictic;
    auto kind = ParseTargetKind(qualifier);
    if (!kind) throw ParseError(line, col, "deictic capture needs /region, /patient or /image");
    t.deictic = *kind;
  } else {
    throw ParseError(line, col, "unknown capture type " + std::string(type));
  }
  return t;
}

Rule ParseRule(std::string_view text, std::size_t line, const TypeHierarchy& hierarchy) {
  Rule rule;
  rule.line = line;
  auto arrow = text.find("=>");
  if (arrow == std::string_view::npos) throw ParseError(line, 0, "expected '=>'");

  std::string_view lhs = text.substr(0, arrow);
  std::set<std::string> captures;
  std::size_t col = 0;
  for (const std::string& word : SplitWhitespace(lhs)) {
    col = lhs.find(word, col);
    PatternToken t;
    if (word.front() == '{') {
      if (word.back() != '}') throw ParseError(line, col, "unterminated capture");
      t = ParseCapture(std::string_view(word).substr(1, word.size() - 2), line, col);
      if (!captures.insert(t.name).second) {
        throw ParseError(line, col, "capture " + t.name + " defined twice");
      }
    } else if (word.front() == '[') {
      if (word.back() != ']' || word.size() < 3) throw ParseError(line, col, "bad optional word");
      t.kind = PatternToken::Kind::kOptional;
      t.words = SplitAlternatives(std::string_view(word).substr(1, word.size() - 2));
    } else {
      t.words = SplitAlternatives(word);
    }
    for (const std::string& w : t.words) {
      if (w.empty()) throw ParseError(line, col, "empty alternative");
    }
    rule.pattern.push_back(std::move(t));
    col += word.size();
  }
  if (rule.pattern.empty()) throw ParseError(line, 0, "empty pattern");

  std::size_t rhs_at = arrow + 2;
  std::string_view rhs = text.substr(rhs_at);
  while (!rhs.empty() && std::isspace(static_cast<unsigned char>(rhs.front()))) {
    rhs.remove_prefix(1);
    ++rhs_at;
  }
  while (!rhs.empty() && std::isspace(static_cast<unsigned char>(rhs.back()))) rhs.remove_suffix(1);
  auto open = rhs.find('(');
  std::string_view name = rhs.substr(0, open);
  auto intent = ParseIntent(name);
  if (!intent) throw ParseError(line, rhs_at, "unknown intent " + std::string(name));
  if (!hierarchy.Contains(name) || !hierarchy.IsSubtype(name, "act")) {
    throw Error(ErrorCode::kValidation,
                fmt::format("line {}: intent {} is not an act type", line, name));
  }
  rule.intent = *intent;
  if (open != std::string_view::npos) {
    if (rhs.back() != ')') throw ParseError(line, rhs_at + rhs.size(), "expected ')'");
    std::string_view args = rhs.substr(open + 1, rhs.size() - open - 2);
    std::set<std::string> slots;
    std::size_t start = 0;
    while (start < args.size()) {
      std::size_t comma = args.find(',', start);
      if (comma == std::string_view::npos) comma = args.size();
      std::string arg;
      for (char c : args.substr(start, comma - start)) {
        if (!std::isspace(static_cast<unsigned char>(c))) arg += c;
      }
      std::size_t where = rhs_at + open + 1 + start;
      start = comma + 1;
      if (arg.empty()) continue;
      auto eq = arg.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
        throw ParseError(line, where, "expected SLOT=capture");
      }
      SlotBinding b;
      b.slot = arg.substr(0, eq);
      std::string value = arg.substr(eq + 1);
      if (value.front() == '@') {
        b.implicit = ParseTargetKind(std::string_view(value).substr(1));
        if (!b.implicit) throw ParseError(line, where, "unknown referent kind " + value);
      } else {
        if (!captures.count(value)) throw ParseError(line, where, "unknown capture " + value);
        captures.erase(value);
        b.capture = value;
      }
      if (!slots.insert(b.slot).second) throw ParseError(line, where, "slot " + b.slot + " repeated");
      rule.bindings.push_back(std::move(b));
    }
  }
  if (!captures.empty()) {
    throw ParseError(line, 0, "capture " + *captures.begin() + " is never bound");
  }
  return rule;
}

// ---- matching ----------------------------------------------------------------

struct Match {
  std::map<std::string, FeatureStructure> values;
  std::set<std::string> deictic;  // captures that opened a referent
};

class Matcher {
 public:
  Matcher(const Rule& rule, const std::vector<std::string>& words, const Ontology& ontology,
          std::chrono::year_month_day today)
      : rule_(rule), words_(words), ontology_(ontology), today_(today) {}

  std::optional<Match> Run() {
    Match m;
    if (Step(0, 0, m)) return m;
    return std::nullopt;
  }

 private:
  static bool Accepts(const PatternToken& t, const std::string& word) {
    return std::find(t.words.begin(), t.words.end(), word) != t.words.end();
  }

  bool Step(std::size_t ti, std::size_t wi, Match& m) {
    if (ti == rule_.pattern.size()) return wi == words_.size();
    const PatternToken& t = rule_.pattern[ti];
    switch (t.kind) {
      case PatternToken::Kind::kWord:
        return wi < words_.size() && Accepts(t, words_[wi]) && Step(ti + 1, wi + 1, m);
      case PatternToken::Kind::kOptional:
        if (wi < words_.size() && Accepts(t, words_[wi]) && Step(ti + 1, wi + 1, m)) return true;
        return Step(ti + 1, wi, m);
      case PatternToken::Kind::kCapture:
        break;
    }
    // Shortest span first so that the literal words after a capture anchor it.
    for (std::size_t end = wi + 1; end <= words_.size(); ++end) {
      auto value = Resolve(t, wi, end);
      if (!value) {
        if (t.capture == PatternToken::Capture::kDeictic) return false;
        continue;
      }
      m.values.insert_or_assign(t.name, *value);
      if (t.capture == PatternToken::Capture::kDeictic) m.deictic.insert(t.name);
      if (Step(ti + 1, end, m)) return true;
      m.values.erase(t.name);
      m.deictic.erase(t.name);
    }
    return false;
  }

  std::optional<ConceptRef> Concept(std::size_t from, std::size_t to,
                                    std::optional<ConceptSource> source) {
    auto key = std::make_pair(from, to);
    auto it = concept_cache_.find(key);
    std::vector<ConceptRef> found;
    if (it != concept_cache_.end()) {
      found = it->second;
    } else {
      found = ontology_.Lookup(Join(words_, from, to));
      concept_cache_.emplace(key, found);
    }
    for (const ConceptRef& ref : found) {
      bool dimension = ref.source == ConceptSource::kAnatomy ||
                       ref.source == ConceptSource::kImaging ||
                       ref.source == ConceptSource::kDisease;
      if (dimension && (!source || ref.source == *source)) return ref;
    }
    return std::nullopt;
  }

  static FeatureStructure ConceptAtom(const ConceptRef& ref) {
    return FeatureStructure::Atom(fs_types::ConceptType(ref.source), ref.iri.value());
  }

  // Items separated by at most one connective; longest items first.
  std::optional<std::vector<ConceptRef>> Segment(std::size_t from, std::size_t to,
                                                 std::optional<ConceptSource> source) {
    if (from == to) return std::vector<ConceptRef>{};
    for (std::size_t end = to; end > from; --end) {
      auto ref = Concept(from, end, source);
      if (!ref) continue;
      std::size_t next = end;
      if (next < to && kConnectives.count(words_[next])) ++next;
      if (next == to && next != end) continue;  // trailing connective
      auto rest = Segment(next, to, source);
      if (!rest) continue;
      rest->insert(rest->begin(), *ref);
      return rest;
    }
    return std::nullopt;
  }

  std::optional<FeatureStructure> Resolve(const PatternToken& t, std::size_t from,
                                          std::size_t to) {
    switch (t.capture) {
      case PatternToken::Capture::kConcept: {
        auto ref = Concept(from, to, t.source);
        if (!ref) return std::nullopt;
        return ConceptAtom(*ref);
      }
      case PatternToken::Capture::kConcepts: {
        if (kConnectives.count(words_[from])) return std::nullopt;
        auto items = Segment(from, to, t.source);
        if (!items || items->empty()) return std::nullopt;
        FeatureStructure list{std::string(fs_types::kNil)};
        for (auto it = items->rbegin(); it != items->rend(); ++it) {
          list = FeatureStructure(std::string(fs_types::kCons))
                     .With({"FIRST"}, ConceptAtom(*it))
                     .With({"REST"}, list);
        }
        return list;
      }
      case PatternToken::Capture::kTime: {
        std::string phrase = Join(words_, from, to);
        try {
          search::DateRange r = search::ResolveTimePhrase(phrase, today_);
          return FeatureStructure(std::string(fs_types::kTimeRange))
              .With({"START"}, FeatureStructure::Atom(std::string(fs_types::kDate), r.start))
              .With({"END"}, FeatureStructure::Atom(std::string(fs_types::kDate), r.end))
              .With({"PHRASE"}, FeatureStructure::Atom(std::string(fs_types::kString), phrase));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kUnknownTimePhrase) throw;
          return std::nullopt;
        }
      }
      case PatternToken::Capture::kDeictic:
        if (to != from + 1 || !kDeicticWords.count(words_[from])) return std::nullopt;
        return FeatureStructure(fs_types::RefType(t.deictic));
      case PatternToken::Capture::kText:
        return FeatureStructure::Atom(std::string(fs_types::kString), Join(words_, from, to));
    }
    return std::nullopt;
  }

  const Rule& rule_;
  const std::vector<std::string>& words_;
  const Ontology& ontology_;
  std::chrono::year_month_day today_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<ConceptRef>> concept_cache_;
};

InterpretedAct Build(const Rule& rule, const Match& match) {
  InterpretedAct act;
  act.intent = rule.intent;
  act.slots = FeatureStructure(std::string(IntentName(rule.intent)));
  for (const SlotBinding& b : rule.bindings) {
    if (b.implicit) {
      act.slots = act.slots.With({b.slot}, FeatureStructure(fs_types::RefType(*b.implicit)));
      act.unresolved.push_back({{b.slot}, *b.implicit});
      continue;
    }
    act.slots = act.slots.With({b.slot}, match.values.at(b.capture));
    if (match.deictic.count(b.capture)) {
      const PatternToken* token = nullptr;
      for (const PatternToken& t : rule.pattern) {
        if (t.kind == PatternToken::Kind::kCapture && t.name == b.capture) token = &t;
      }
      act.unresolved.push_back({{b.slot}, token->deictic});
    }
  }
  return act;
}

}  // namespace

std::string_view IntentName(Intent intent) {
  for (const auto& [i, name] : kIntents) {
    if (i == intent) return name;
  }
  return "Clarify";
}

std::optional<Intent> ParseIntent(std::string_view name) {
  for (const auto& [i, n] : kIntents) {
    if (n == name) return i;
  }
  return std::nullopt;
}

std::string_view TargetKindName(TargetKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "region";
}

std::optional<TargetKind> ParseTargetKind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  return std::nullopt;
}

namespace fs_types {
std::string ConceptType(ConceptSource source) {
  return std::string(ConceptSourceName(source)) + "-concept";
}
std::string RefType(TargetKind kind) { return std::string(TargetKindName(kind)) + "-ref"; }
}  // namespace fs_types

Grammar Grammar::Parse(std::string_view text, const TypeHierarchy& hierarchy) {
  std::vector<std::string> needed = {std::string(fs_types::kCons), std::string(fs_types::kNil),
                                     std::string(fs_types::kTimeRange),
                                     std::string(fs_types::kDate), std::string(fs_types::kIri),
                                     std::string(fs_types::kString), "act"};
  for (auto s : {ConceptSource::kAnatomy, ConceptSource::kImaging, ConceptSource::kDisease}) {
    needed.push_back(fs_types::ConceptType(s));
  }
  for (const auto& [k, name] : kKinds) needed.push_back(fs_types::RefType(k));
  for (const auto& [i, name] : kIntents) needed.emplace_back(name);
  for (const std::string& t : needed) {
    if (!hierarchy.Contains(t)) {
      throw Error(ErrorCode::kValidation, "type hierarchy lacks slot type " + t);
    }
  }

  Grammar g;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (SplitWhitespace(line).empty()) continue;
    g.rules_.push_back(ParseRule(line, line_no, hierarchy));
  }
  return g;
}

const TypeHierarchy& BundledHierarchy() {
  static const TypeHierarchy h = TypeHierarchy::Parse(data::BundledFile("dialogue/types.hier"));
  return h;
}

const Grammar& BundledGrammar() {
  static const Grammar g =
      Grammar::Parse(data::BundledFile("dialogue/grammar.rules"), BundledHierarchy());
  return g;
}

std::vector<InterpretedAct> ParseUtterance(std::string_view text, const Grammar& grammar,
                                           const Ontology& ontology,
                                           std::chrono::year_month_day today) {
  std::vector<InterpretedAct> acts;
  bool matched_any = false;
  for (const std::string& sentence : Sentences(text)) {
    std::vector<std::string> words = Words(sentence);
    std::optional<InterpretedAct> act;
    for (const Rule& rule : grammar.rules()) {
      if (auto m = Matcher(rule, words, ontology, today).Run()) {
        act = Build(rule, *m);
        break;
      }
    }
    if (act) {
      matched_any = true;
      acts.push_back(std::move(*act));
    } else {
      acts.push_back(InterpretedAct::Clarify(
          fmt::format("Sorry, I did not understand \"{}\". Could you rephrase it?",
                      Join(words, 0, words.size()))));
    }
  }
  if (!matched_any) {
    std::string shown = Join(Words(text), 0, Words(text).size());
    if (shown.empty()) return {InterpretedAct::Clarify("I did not catch that. What would you like to do?")};
    return {InterpretedAct::Clarify(
        fmt::format("Sorry, I did not understand \"{}\". Could you rephrase it?", shown))};
  }
  return acts;
}

}  // namespace medico::dialogue

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

#include "medico/store/triple_store.h"

#include "medico/error.h"

namespace medico {

Triple::Triple(Term s, Term p, Term o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (!subject.is_iri()) {
    throw Error(ErrorCode::kValidation, "triple subject must be an IRI");
  }
  if (!predicate.is_iri()) {
    throw Error(ErrorCode::kValidation, "triple predicate must be an IRI");
  }
}

bool Store::AddTo(Index& index, const Term& a, const Term& b, const Term& c) {
  return index[a][b].insert(c).second;
}

void Store::RemoveFrom(Index& index, const Term& a, const Term& b,
                       const Term& c) {
  auto l1 = index.find(a);
  if (l1 == index.end()) return;
  auto l2 = l1->second.find(b);
  if (l2 == l1->second.end()) return;
  l2->second.erase(c);
  if (l2->second.empty()) l1->second.erase(l2);
  if (l1->second.empty()) index.erase(l1);
}

bool Store::Insert(const Triple& t) {
  if (Contains(t)) return false;
  AddTo(spo_, t.subject, t.predicate, t.object);
  AddTo(pos_, t.predicate, t.object, t.subject);
  AddTo(osp_, t.object, t.subject, t.predicate);
  ++size_;
  return true;
}

bool Store::Remove(const Triple& t) {
  if (!Contains(t)) return false;
  RemoveFrom(spo_, t.subject, t.predicate, t.object);
  RemoveFrom(pos_, t.predicate, t.object, t.subject);
  RemoveFrom(osp_, t.object, t.subject, t.predicate);
  --size_;
  return true;
}

bool Store::Contains(const Triple& t) const {
  auto l1 = spo_.find(t.subject);
  if (l1 == spo_.end()) return false;
  auto l2 = l1->second.find(t.predicate);
  if (l2 == l1->second.end()) return false;
  return l2->second.count(t.object) > 0;
}

namespace {

// Enumerates (a, b, c) entries of one permutation index with optional bound
// first and second levels. `emit` receives the entry in index order.
template <typename IndexT, typename Emit>
bool ScanIndex(const IndexT& index, const std::optional<Term>& a,
               const std::optional<Term>& b, const Emit& emit) {
  auto scan_level2 = [&](const Term& ka, const auto& level2) {
    if (b) {
      auto it = level2.find(*b);
      if (it == level2.end()) return true;
      for (const Term& kc : it->second) {
        if (!emit(ka, *b, kc)) return false;
      }
      return true;
    }
    for (const auto& [kb, leaves] : level2) {
      for (const Term& kc : leaves) {
        if (!emit(ka, kb, kc)) return false;
      }
    }
    return true;
  };
  if (a) {
    auto it = index.find(*a);
    if (it == index.end()) return true;
    return scan_level2(*a, it->second);
  }
  for (const auto& [ka, level2] : index) {
    if (!scan_level2(ka, level2)) return false;
  }
  return true;
}

}  // namespace

void Store::ForEachMatch(const MatchPattern& p,
                         const std::function<bool(const Triple&)>& fn) const {
  const bool s = p.subject.has_value();
  const bool pr = p.predicate.has_value();
  const bool o = p.object.has_value();

  if (s && pr && o) {
    Triple t;
    t.subject = *p.subject;
    t.predicate = *p.predicate;
    t.object = *p.object;
    if (Contains(t)) fn(t);
    return;
  }
  auto make = [](const Term& s, const Term& pr, const Term& o) {
    Triple t;
    t.subject = s;
    t.predicate = pr;
    t.object = o;
    return t;
  };
  if (s) {
    // (s, p?, o?): SPO when p is bound or o is free; OSP when only o is bound.
    if (o && !pr) {
      ScanIndex(osp_, p.object, p.subject,
                [&](const Term& ko, const Term& ks, const Term& kp) {
                  return fn(make(ks, kp, ko));
                });
      return;
    }
    ScanIndex(spo_, p.subject, p.predicate,
              [&](const Term& ks, const Term& kp, const Term& ko) {
                return fn(make(ks, kp, ko));
              });
    return;
  }
  if (pr) {
    ScanIndex(pos_, p.predicate, p.object,
              [&](const Term& kp, const Term& ko, const Term& ks) {
                return fn(make(ks, kp, ko));
              });
    return;
  }
  if (o) {
    ScanIndex(osp_, p.object, std::nullopt,
              [&](const Term& ko, const Term& ks, const Term& kp) {
                return fn(make(ks, kp, ko));
              });
    return;
  }
  ScanIndex(spo_, std::nullopt, std::nullopt,
            [&](const Term& ks, const Term& kp, const Term& ko) {
              return fn(make(ks, kp, ko));
            });
}

std::vector<Triple> Store::Match(const MatchPattern& pattern) const {
  std::vector<Triple> out;
  ForEachMatch(pattern, [&](const Triple& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

std::vector<Term> Store::Objects(const Term& subject,
                                 const Term& predicate) const {
  std::vector<Term> out;
  auto l1 = spo_.find(subject);
  if (l1 == spo_.end()) return out;
  auto l2 = l1->second.find(predicate);
  if (l2 == l1->second.end()) return out;
  out.assign(l2->second.begin(), l2->second.end());
  return out;
}

std::optional<Term> Store::FirstObject(const Term& subject,
                                       const Term& predicate) const {
  auto l1 = spo_.find(subject);
  if (l1 == spo_.end()) return std::nullopt;
  auto l2 = l1->second.find(predicate);
  if (l2 == l1->second.end() || l2->second.empty()) return std::nullopt;
  return *l2->second.begin();
}

std::vector<Term> Store::Subjects(const Term& predicate,
                                  const Term& object) const {
  std::vector<Term> out;
  auto l1 = pos_.find(predicate);
  if (l1 == pos_.end()) return out;
  auto l2 = l1->second.find(object);
  if (l2 == l1->second.end()) return out;
  out.assign(l2->second.begin(), l2->second.end());
  return out;
}

bool Store::HasSubject(const Term& subject) const {
  return spo_.count(subject) > 0;
}

std::vector<Triple> Store::Triples() const { return Match({}); }

}  // namespace medico

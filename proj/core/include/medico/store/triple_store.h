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

#ifndef MEDICO_STORE_TRIPLE_STORE_H_
#define MEDICO_STORE_TRIPLE_STORE_H_

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "medico/store/term.h"

namespace medico {

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple() = default;
  // Throws Error(kValidation) when subject or predicate is a literal.
  Triple(Term s, Term p, Term o);

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

// A triple pattern for Store::Match; unset positions are wildcards.
struct MatchPattern {
  std::optional<Term> subject;
  std::optional<Term> predicate;
  std::optional<Term> object;
};

// Set-semantics triple repository with three permutation indexes
// (subject-predicate-object, predicate-object-subject and
// object-subject-predicate). Every stored triple appears exactly once in each
// index.
//
// Store is a plain value: copyable, movable and safe to hand to another
// thread. Use SharedStore for concurrent access.
class Store {
 public:
  // Returns true if the triple was not present before.
  bool Insert(const Triple& triple);
  // Returns true if the triple was present.
  bool Remove(const Triple& triple);
  bool Contains(const Triple& triple) const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // All triples consistent with the bound positions of `pattern`, in
  // (subject, predicate, object) order for the chosen index.
  std::vector<Triple> Match(const MatchPattern& pattern) const;

  // Visits matches without materializing them. Returning false from `fn`
  // stops the scan.
  void ForEachMatch(const MatchPattern& pattern,
                    const std::function<bool(const Triple&)>& fn) const;

  // Objects of (subject, predicate, *).
  std::vector<Term> Objects(const Term& subject, const Term& predicate) const;
  std::optional<Term> FirstObject(const Term& subject,
                                  const Term& predicate) const;
  // Subjects of (*, predicate, object).
  std::vector<Term> Subjects(const Term& predicate, const Term& object) const;
  bool HasSubject(const Term& subject) const;

  // Every triple, sorted.
  std::vector<Triple> Triples() const;

  const PrefixMap& prefixes() const { return prefixes_; }
  void AddPrefix(const std::string& name, const std::string& base) {
    prefixes_[name] = base;
  }

  // Triple-set equality; prefixes are presentation only.
  friend bool operator==(const Store& a, const Store& b) {
    return a.size_ == b.size_ && a.spo_ == b.spo_;
  }

 private:
  using Level2 = std::map<Term, std::set<Term>>;
  using Index = std::map<Term, Level2>;

  static bool AddTo(Index& index, const Term& a, const Term& b, const Term& c);
  static void RemoveFrom(Index& index, const Term& a, const Term& b,
                         const Term& c);

  Index spo_;
  Index pos_;
  Index osp_;
  std::size_t size_ = 0;
  PrefixMap prefixes_;
};

// Single-writer / multiple-reader wrapper. Readers run concurrently under a
// shared lock; writers are serialized and their changes become visible
// atomically when the callback returns.
class SharedStore {
 public:
  SharedStore() = default;
  explicit SharedStore(Store store) : store_(std::move(store)) {}

  template <typename Fn>
  auto Read(Fn&& fn) const {
    std::shared_lock lock(mu_);
    return std::forward<Fn>(fn)(static_cast<const Store&>(store_));
  }

  template <typename Fn>
  auto Write(Fn&& fn) {
    std::unique_lock lock(mu_);
    return std::forward<Fn>(fn)(store_);
  }

  Store Copy() const {
    std::shared_lock lock(mu_);
    return store_;
  }

 private:
  mutable std::shared_mutex mu_;
  Store store_;
};

}  // namespace medico

#endif  // MEDICO_STORE_TRIPLE_STORE_H_

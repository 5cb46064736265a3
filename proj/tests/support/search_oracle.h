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

#ifndef MEDICO_TESTS_SUPPORT_SEARCH_ORACLE_H_
#define MEDICO_TESTS_SUPPORT_SEARCH_ORACLE_H_

// Exhaustive ranking computed straight from raw triples. It rebuilds the
// concept graph, runs Floyd-Warshall and walks the DICOM hierarchy itself.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medico/store/triple_store.h"
#include "medico/vocab.h"
#include "support/oracles.h"

namespace medico::oracle {

struct OracleTerm {
  Term concept_iri;
  std::string dimension;  // "anatomy" | "imaging" | "disease"
};

struct OracleQuery {
  std::vector<OracleTerm> terms;
  std::optional<std::pair<std::string, std::string>> dates;
  std::optional<Term> scope;
  std::optional<Term> exclude_region;
  double lambda = 0.5;
  int max_depth = 2;
  std::map<std::string, double> weights = {{"anatomy", 1}, {"imaging", 1}, {"disease", 1}};
};

struct OracleHit {
  Term patient;
  double score;
};

class RankingOracle {
 public:
  explicit RankingOracle(const Store& store) : store_(store) {
    for (const Triple& t : store.Match({std::nullopt, vocab::Type(), vocab::Concept()})) {
      index_[t.subject] = concepts_.size();
      concepts_.push_back(t.subject);
    }
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (const Term& rel : {vocab::IsA(), vocab::PartOf()}) {
      for (const Triple& t : store.Match({std::nullopt, rel, std::nullopt})) {
        if (!index_.count(t.subject) || !index_.count(t.object)) continue;
        arcs.emplace_back(index_[t.subject], index_[t.object]);
        arcs.emplace_back(index_[t.object], index_[t.subject]);
      }
    }
    dist_ = AllPairsShortest(concepts_.size(), arcs);
  }

  std::optional<int> Distance(const Term& a, const Term& b) const {
    auto ia = index_.find(a), ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end()) return std::nullopt;
    if (store_.FirstObject(a, vocab::Source()) != store_.FirstObject(b, vocab::Source())) {
      return std::nullopt;
    }
    int d = dist_[ia->second][ib->second];
    if (d < 0) return std::nullopt;
    return d;
  }

  std::vector<OracleHit> Rank(const OracleQuery& q) const {
    std::vector<OracleHit> hits;
    for (const Triple& pt : store_.Match({std::nullopt, vocab::Type(), vocab::Patient()})) {
      const Term& patient = pt.subject;
      if (q.scope && patient != *q.scope) continue;
      if (q.dates) {
        bool ok = false;
        for (const Triple& hs : store_.Match({patient, vocab::HasStudy(), std::nullopt})) {
          for (const Triple& d : store_.Match({hs.object, vocab::StudyDate(), std::nullopt})) {
            if (d.object.value() >= q.dates->first && d.object.value() <= q.dates->second) ok = true;
          }
        }
        if (!ok) continue;
      }
      double score = 0;
      for (const OracleTerm& term : q.terms) {
        double best = 0;
        for (const Triple& at : store_.Match({std::nullopt, vocab::Type(), vocab::ImageAnnotation()})) {
          const Term& a = at.subject;
          if (!store_.Match({a, vocab::SupersededBy(), std::nullopt}).empty()) continue;
          Term region = store_.Match({a, vocab::Annotates(), std::nullopt})[0].object;
          if (q.exclude_region && region == *q.exclude_region) continue;
          if (OwnerOf(region) != patient) continue;
          double conf = std::stod(store_.Match({a, vocab::Confidence(), std::nullopt})[0].object.value());
          Term slot = term.dimension == "anatomy"   ? vocab::Anatomy()
                      : term.dimension == "imaging" ? vocab::Visual()
                                                    : vocab::Disease();
          for (const Triple& c : store_.Match({a, slot, std::nullopt})) {
            auto d = Distance(term.concept_iri, c.object);
            if (!d || *d > q.max_depth) continue;
            double v = q.weights.at(term.dimension) * std::pow(q.lambda, *d) * conf;
            best = std::max(best, v);
          }
        }
        score += best;
      }
      if (score <= 0 && !q.terms.empty()) continue;
      hits.push_back({patient, score});
    }
    std::sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b) {
      return a.score != b.score ? a.score > b.score : a.patient < b.patient;
    });
    return hits;
  }

 private:
  std::optional<Term> OwnerOf(const Term& region) const {
    auto target = store_.Match({region, vocab::RegionOf(), std::nullopt});
    if (target.empty()) return std::nullopt;
    Term node = target[0].object;
    auto up = [&](const Term& pred, const Term& child) -> std::optional<Term> {
      auto m = store_.Match({std::nullopt, pred, child});
      if (m.empty()) return std::nullopt;
      return m[0].subject;
    };
    if (store_.Contains({node, vocab::Type(), vocab::Image()})) {
      auto s = up(vocab::HasImage(), node);
      if (!s) return std::nullopt;
      node = *s;
    }
    auto study = up(vocab::HasSeries(), node);
    if (!study) return std::nullopt;
    return up(vocab::HasStudy(), *study);
  }

  const Store& store_;
  std::vector<Term> concepts_;
  std::map<Term, std::size_t> index_;
  std::vector<std::vector<int>> dist_;
};

}  // namespace medico::oracle

#endif  // MEDICO_TESTS_SUPPORT_SEARCH_ORACLE_H_

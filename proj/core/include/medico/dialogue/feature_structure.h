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

#ifndef MEDICO_DIALOGUE_FEATURE_STRUCTURE_H_
#define MEDICO_DIALOGUE_FEATURE_STRUCTURE_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medico::dialogue {

// Finite partial order of type names with a single top. Every pair of types
// has either no common subtype or a unique greatest one, which is checked on
// construction so Meet() is a table lookup.
class TypeHierarchy {
 public:
  static constexpr std::string_view kTop = "top";

  // `subtype child parent` lines, '#' comments. Types are declared by
  // appearing in any line; "top" is implicit. Throws ParseError for
  // malformed lines and Error(kValidation) for cycles or non-unique meets.
  static TypeHierarchy Parse(std::string_view text);
  static TypeHierarchy FromEdges(
      const std::vector<std::pair<std::string, std::string>>& child_parent);

  bool Contains(std::string_view type) const;
  // Greatest lower bound. Throws Error(kNotFound) for undeclared types.
  std::optional<std::string> Meet(std::string_view a, std::string_view b) const;
  // a <= b (a is b or one of its subtypes). Throws Error(kNotFound).
  bool IsSubtype(std::string_view a, std::string_view b) const;
  // Sorted, top included.
  std::vector<std::string> Types() const;

  // Index-level access used by unification.
  int Id(std::string_view type) const;  // throws Error(kNotFound)
  const std::string& Name(int id) const { return names_[id]; }
  int MeetId(int a, int b) const { return meet_[a * names_.size() + b]; }
  bool IsSubtypeId(int a, int b) const { return below_[b][a]; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int, std::less<>> ids_;
  std::vector<std::vector<bool>> below_;  // below_[t][u]: u <= t
  std::vector<int> meet_;                 // -1 when no meet
};

// Rooted graph of typed nodes. A node with a value is an atom and has no
// features. Shared children express reentrancy; cycles are allowed. Values
// are immutable: every operation returns a new structure.
class FeatureStructure {
 public:
  struct Node {
    std::string type;
    std::optional<std::string> value;
    std::map<std::string, int> features;  // feature -> node index
  };

  // A single featureless node.
  explicit FeatureStructure(std::string type = std::string(TypeHierarchy::kTop));
  static FeatureStructure Atom(std::string type, std::string value);

  // Node 0 is the root. Unreachable nodes are dropped and the rest are
  // renumbered in depth-first order. Throws Error(kValidation) for dangling
  // indices or atoms with features.
  static FeatureStructure FromNodes(std::vector<Node> nodes, int root = 0);

  const std::vector<Node>& nodes() const { return *nodes_; }
  const Node& root() const { return nodes_->front(); }
  const Node& node(int i) const { return (*nodes_)[i]; }
  std::size_t size() const { return nodes_->size(); }

  // Node reached by following `path` from the root.
  std::optional<int> Walk(const std::vector<std::string>& path) const;
  // Substructure rooted at `path` (shares nothing with this one).
  std::optional<FeatureStructure> At(const std::vector<std::string>& path) const;
  // Copy of this structure with `value` placed at `path` (intermediate nodes
  // are created with type top). The old subtree at the path, if any, is
  // replaced. Throws Error(kValidation) when the path crosses an atom.
  FeatureStructure With(const std::vector<std::string>& path,
                        const FeatureStructure& value) const;

  // Text notation, e.g. [act AGENT: #1[person], THEME: #1, NAME: "Maier"].
  // Atoms print as type="value" ("value" alone for top). Tags appear only on
  // shared nodes.
  std::string ToString() const;
  // Throws ParseError.
  static FeatureStructure Parse(std::string_view text);

  // Serialisation that is equal for two structures iff they are isomorphic
  // (same shape, types, values and sharing).
  std::string Canonical() const;

 private:
  explicit FeatureStructure(std::shared_ptr<const std::vector<Node>> nodes)
      : nodes_(std::move(nodes)) {}

  std::shared_ptr<const std::vector<Node>> nodes_;
};

bool Isomorphic(const FeatureStructure& a, const FeatureStructure& b);

// Most general structure subsumed by both, or nullopt on a type clash, a
// value clash or an atom meeting a node with features. Undeclared types
// throw Error(kNotFound).
std::optional<FeatureStructure> Unify(const TypeHierarchy& h, const FeatureStructure& a,
                                      const FeatureStructure& b);

// True iff `general` maps into `specific`: root to root, every feature
// followed, mapped types are supertypes (or equal), atom values equal, and
// nodes shared in `general` stay shared in `specific`.
bool Subsumes(const TypeHierarchy& h, const FeatureStructure& general,
              const FeatureStructure& specific);

}  // namespace medico::dialogue

#endif  // MEDICO_DIALOGUE_FEATURE_STRUCTURE_H_

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

#include "medico/dialogue/feature_structure.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include <fmt/format.h>

#include "medico/error.h"

namespace medico::dialogue {

// ---- TypeHierarchy ---------------------------------------------------------

namespace {

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '*' ||
         c == '.' || c == '/';
}

bool IsName(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), IsNameChar);
}

}  // namespace

TypeHierarchy TypeHierarchy::FromEdges(
    const std::vector<std::pair<std::string, std::string>>& child_parent) {
  TypeHierarchy h;
  std::set<std::string> names{std::string(kTop)};
  for (const auto& [c, p] : child_parent) {
    if (!IsName(c) || !IsName(p)) {
      throw Error(ErrorCode::kValidation, "invalid type name in '" + c + " " + p + "'");
    }
    if (c == kTop) throw Error(ErrorCode::kValidation, "top cannot have a supertype");
    if (c == p) throw Error(ErrorCode::kValidation, "type " + c + " is its own supertype");
    names.insert(c);
    names.insert(p);
  }
  h.names_.assign(names.begin(), names.end());
  for (std::size_t i = 0; i < h.names_.size(); ++i) h.ids_.emplace(h.names_[i], int(i));
  const std::size_t n = h.names_.size();
  const int top = h.ids_.find(kTop)->second;

  std::vector<std::vector<int>> parents(n);
  for (const auto& [c, p] : child_parent) parents[h.Id(c)].push_back(h.Id(p));

  // Reflexive-transitive closure by DFS upward; a grey node on the current
  // path means a cycle.
  h.below_.assign(n, std::vector<bool>(n, false));
  std::vector<int> color(n, 0);
  std::vector<std::vector<bool>> up(n, std::vector<bool>(n, false));
  std::function<void(int)> visit = [&](int t) {
    if (color[t] == 2) return;
    if (color[t] == 1) {
      throw Error(ErrorCode::kValidation, "cycle through type " + h.names_[t]);
    }
    color[t] = 1;
    up[t][t] = true;
    up[t][top] = true;
    for (int p : parents[t]) {
      visit(p);
      for (std::size_t u = 0; u < n; ++u) {
        if (up[p][u]) up[t][u] = true;
      }
    }
    color[t] = 2;
  };
  for (std::size_t t = 0; t < n; ++t) visit(int(t));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t u = 0; u < n; ++u) {
      if (up[t][u]) h.below_[u][t] = true;
    }
  }

  std::vector<int> size(n);
  for (std::size_t t = 0; t < n; ++t) {
    size[t] = int(std::count(h.below_[t].begin(), h.below_[t].end(), true));
  }
  h.meet_.assign(n * n, -1);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      int common = 0;
      int glb = -1;
      for (std::size_t u = 0; u < n; ++u) {
        if (h.below_[a][u] && h.below_[b][u]) ++common;
      }
      if (common == 0) continue;
      // Anything below a common subtype is itself common, so the glb is the
      // common subtype whose down-set is the whole common set.
      for (std::size_t u = 0; u < n && glb < 0; ++u) {
        if (h.below_[a][u] && h.below_[b][u] && size[u] == common) glb = int(u);
      }
      if (glb < 0) {
        throw Error(ErrorCode::kValidation,
                    "types " + h.names_[a] + " and " + h.names_[b] + " have no unique meet");
      }
      h.meet_[a * n + b] = h.meet_[b * n + a] = glb;
    }
  }
  return h;
}

TypeHierarchy TypeHierarchy::Parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::pair<std::size_t, std::string_view>> words;
    for (std::size_t i = 0; i < line.size();) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      words.emplace_back(i, line.substr(i, j - i));
      i = j;
    }
    if (words.empty()) continue;
    if (words[0].second != "subtype") {
      throw ParseError(line_no, words[0].first, "expected 'subtype'");
    }
    if (words.size() != 3) {
      throw ParseError(line_no, words.back().first, "expected 'subtype <child> <parent>'");
    }
    for (int k : {1, 2}) {
      if (!IsName(words[k].second)) {
        throw ParseError(line_no, words[k].first, "invalid type name");
      }
    }
    edges.emplace_back(std::string(words[1].second), std::string(words[2].second));
  }
  return FromEdges(edges);
}

bool TypeHierarchy::Contains(std::string_view type) const {
  return ids_.find(type) != ids_.end();
}

int TypeHierarchy::Id(std::string_view type) const {
  auto it = ids_.find(type);
  if (it == ids_.end()) throw Error(ErrorCode::kNotFound, "undeclared type " + std::string(type));
  return it->second;
}

std::optional<std::string> TypeHierarchy::Meet(std::string_view a, std::string_view b) const {
  int m = MeetId(Id(a), Id(b));
  if (m < 0) return std::nullopt;
  return names_[m];
}

bool TypeHierarchy::IsSubtype(std::string_view a, std::string_view b) const {
  return IsSubtypeId(Id(a), Id(b));
}

std::vector<std::string> TypeHierarchy::Types() const { return names_; }

// ---- FeatureStructure ------------------------------------------------------

FeatureStructure::FeatureStructure(std::string type)
    : nodes_(std::make_shared<const std::vector<Node>>(
          std::vector<Node>{Node{std::move(type), std::nullopt, {}}})) {}

FeatureStructure FeatureStructure::Atom(std::string type, std::string value) {
  return FeatureStructure(std::make_shared<const std::vector<Node>>(
      std::vector<Node>{Node{std::move(type), std::move(value), {}}}));
}

FeatureStructure FeatureStructure::FromNodes(std::vector<Node> nodes, int root) {
  const int n = int(nodes.size());
  if (root < 0 || root >= n) throw Error(ErrorCode::kValidation, "root index out of range");
  for (const Node& node : nodes) {
    if (node.value && !node.features.empty()) {
      throw Error(ErrorCode::kValidation, "atom of type " + node.type + " has features");
    }
    for (const auto& [f, c] : node.features) {
      if (c < 0 || c >= n) throw Error(ErrorCode::kValidation, "dangling feature " + f);
    }
  }
  std::vector<int> order(n, -1);
  std::vector<int> sequence;
  std::function<void(int)> number = [&](int i) {
    order[i] = int(sequence.size());
    sequence.push_back(i);
    for (const auto& [f, c] : nodes[i].features) {
      if (order[c] < 0) number(c);
    }
  };
  number(root);
  std::vector<Node> out;
  out.reserve(sequence.size());
  for (int i : sequence) {
    Node node = nodes[i];
    for (auto& [f, c] : node.features) c = order[c];
    out.push_back(std::move(node));
  }
  return FeatureStructure(std::make_shared<const std::vector<Node>>(std::move(out)));
}

std::optional<int> FeatureStructure::Walk(const std::vector<std::string>& path) const {
  int at = 0;
  for (const std::string& f : path) {
    const auto& features = node(at).features;
    auto it = features.find(f);
    if (it == features.end()) return std::nullopt;
    at = it->second;
  }
  return at;
}

std::optional<FeatureStructure> FeatureStructure::At(const std::vector<std::string>& path) const {
  auto at = Walk(path);
  if (!at) return std::nullopt;
  return FromNodes(*nodes_, *at);
}

FeatureStructure FeatureStructure::With(const std::vector<std::string>& path,
                                        const FeatureStructure& value) const {
  if (path.empty()) return value;
  std::vector<Node> nodes = *nodes_;
  int at = 0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    if (nodes[at].value) throw Error(ErrorCode::kValidation, "path crosses atom at " + path[k]);
    auto it = nodes[at].features.find(path[k]);
    if (it != nodes[at].features.end()) {
      at = it->second;
      continue;
    }
    nodes.push_back(Node{std::string(TypeHierarchy::kTop), std::nullopt, {}});
    nodes[at].features[path[k]] = int(nodes.size()) - 1;
    at = int(nodes.size()) - 1;
  }
  if (nodes[at].value) throw Error(ErrorCode::kValidation, "path crosses atom at " + path.back());
  const int offset = int(nodes.size());
  for (Node node : value.nodes()) {
    for (auto& [f, c] : node.features) c += offset;
    nodes.push_back(std::move(node));
  }
  nodes[at].features[path.back()] = offset;
  return FromNodes(std::move(nodes));
}

namespace {

std::string Quote(std::string_view v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string FeatureStructure::ToString() const {
  std::vector<int> indegree(size(), 0);
  for (const Node& node : nodes()) {
    for (const auto& [f, c] : node.features) ++indegree[c];
  }
  ++indegree[0];  // the root is referenced from outside
  std::vector<int> tag(size(), 0);
  int next_tag = 0;
  std::string out;
  std::function<void(int)> emit = [&](int i) {
    const Node& node = this->node(i);
    if (indegree[i] > 1) {
      if (tag[i] > 0) {
        out += fmt::format("#{}", tag[i]);
        return;
      }
      tag[i] = ++next_tag;
      out += fmt::format("#{}", tag[i]);
    }
    if (node.value) {
      if (node.type != TypeHierarchy::kTop) out += node.type + "=";
      out += Quote(*node.value);
      return;
    }
    out += '[';
    bool first = true;
    if (node.type != TypeHierarchy::kTop) {
      out += node.type;
      first = false;
    }
    bool comma = false;
    for (const auto& [f, c] : node.features) {
      if (comma) out += ", ";
      else if (!first) out += ' ';
      comma = true;
      out += f + ": ";
      emit(c);
    }
    out += ']';
  };
  emit(0);
  return out;
}

namespace {

class FsParser {
 public:
  explicit FsParser(std::string_view text) : text_(text) {}

  FeatureStructure Run() {
    int root = Value();
    Skip();
    if (pos_ != text_.size()) Fail("trailing input");
    for (const auto& [t, idx] : tags_) {
      if (!defined_.count(t)) Fail(fmt::format("tag #{} is never defined", t));
    }
    return FeatureStructure::FromNodes(std::move(nodes_), root);
  }

 private:
  [[noreturn]] void Fail(const std::string& reason) { throw ParseError(0, pos_, reason); }

  void Skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool Peek(char c) {
    Skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void Expect(char c) {
    if (!Peek(c)) Fail(fmt::format("expected '{}'", c));
    ++pos_;
  }
  std::string Name() {
    Skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && IsNameChar(text_[pos_])) ++pos_;
    if (start == pos_) Fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }
  std::string Quoted() {
    Expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) Fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) Fail("unterminated string");
        c = text_[pos_++];
      }
      out += c;
    }
  }
  int NewNode() {
    nodes_.push_back({std::string(TypeHierarchy::kTop), std::nullopt, {}});
    return int(nodes_.size()) - 1;
  }

  // value := ('#' N)? body | '#' N
  int Value() {
    Skip();
    if (Peek('#')) {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) Fail("expected tag number");
      int t = std::stoi(std::string(text_.substr(start, pos_ - start)));
      auto [it, fresh] = tags_.try_emplace(t, -1);
      if (fresh) it->second = NewNode();
      int idx = it->second;
      Skip();
      bool has_body = pos_ < text_.size() &&
                      (text_[pos_] == '[' || text_[pos_] == '"' || IsNameChar(text_[pos_]));
      if (has_body) {
        if (!defined_.insert(t).second) Fail(fmt::format("tag #{} defined twice", t));
        Body(idx);
      }
      return idx;
    }
    int idx = NewNode();
    Body(idx);
    return idx;
  }

  // body := '[' type? (feature ':' value (',' feature ':' value)*)? ']'
  //       | type '=' quoted | quoted | type
  void Body(int idx) {
    Skip();
    if (Peek('"')) {
      nodes_[idx].value = Quoted();
      return;
    }
    if (!Peek('[')) {
      std::string type = Name();
      nodes_[idx].type = type;
      if (Peek('=')) {
        ++pos_;
        nodes_[idx].value = Quoted();
      }
      return;
    }
    ++pos_;
    if (Peek(']')) {
      ++pos_;
      return;
    }
    std::string first = Name();
    if (!Peek(':')) {
      nodes_[idx].type = first;
      if (Peek(']')) {
        ++pos_;
        return;
      }
      first = Name();
    }
    std::string feature = first;
    while (true) {
      Expect(':');
      if (nodes_[idx].features.count(feature)) Fail("feature " + feature + " repeated");
      int child = Value();
      nodes_[idx].features[feature] = child;
      if (Peek(']')) {
        ++pos_;
        return;
      }
      Expect(',');
      feature = Name();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<FeatureStructure::Node> nodes_;
  std::map<int, int> tags_;
  std::set<int> defined_;
};

}  // namespace

FeatureStructure FeatureStructure::Parse(std::string_view text) { return FsParser(text).Run(); }

std::string FeatureStructure::Canonical() const {
  std::vector<int> seen(size(), -1);
  int counter = 0;
  std::string out;
  std::function<void(int)> emit = [&](int i) {
    if (seen[i] >= 0) {
      out += fmt::format("@{}", seen[i]);
      return;
    }
    seen[i] = counter++;
    const Node& node = this->node(i);
    out += fmt::format("({}:{}", seen[i], Quote(node.type));
    if (node.value) out += "=" + Quote(*node.value);
    for (const auto& [f, c] : node.features) {
      out += " " + Quote(f) + ">";
      emit(c);
    }
    out += ')';
  };
  emit(0);
  return out;
}

bool Isomorphic(const FeatureStructure& a, const FeatureStructure& b) {
  return a.Canonical() == b.Canonical();
}

// ---- Unification -----------------------------------------------------------

std::optional<FeatureStructure> Unify(const TypeHierarchy& h, const FeatureStructure& a,
                                      const FeatureStructure& b) {
  struct Class {
    int type;
    std::optional<std::string> value;
    std::map<std::string, int> features;  // node ids, not representatives
  };
  const int na = int(a.size());
  const int total = na + int(b.size());
  std::vector<int> parent(total);
  std::vector<Class> cls(total);
  for (int i = 0; i < total; ++i) {
    parent[i] = i;
    const auto& node = i < na ? a.node(i) : b.node(i - na);
    cls[i].type = h.Id(node.type);
    cls[i].value = node.value;
    for (const auto& [f, c] : node.features) cls[i].features[f] = i < na ? c : c + na;
  }
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::vector<std::pair<int, int>> work{{0, na}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    x = find(x);
    y = find(y);
    if (x == y) continue;
    int t = h.MeetId(cls[x].type, cls[y].type);
    if (t < 0) return std::nullopt;
    if (cls[x].value && cls[y].value && *cls[x].value != *cls[y].value) return std::nullopt;
    parent[y] = x;
    cls[x].type = t;
    if (!cls[x].value) cls[x].value = std::move(cls[y].value);
    for (auto& [f, c] : cls[y].features) {
      auto [it, fresh] = cls[x].features.try_emplace(f, c);
      if (!fresh) work.emplace_back(it->second, c);
    }
    cls[y].features.clear();
    if (cls[x].value && !cls[x].features.empty()) return std::nullopt;
  }

  std::vector<FeatureStructure::Node> nodes;
  std::map<int, int> index;
  std::vector<int> pending{find(0)};
  index[find(0)] = 0;
  nodes.push_back({});
  while (!pending.empty()) {
    int rep = pending.back();
    pending.pop_back();
    FeatureStructure::Node node{h.Name(cls[rep].type), cls[rep].value, {}};
    for (const auto& [f, c] : cls[rep].features) {
      int r = find(c);
      auto [it, fresh] = index.try_emplace(r, int(nodes.size()));
      if (fresh) {
        nodes.push_back({});
        pending.push_back(r);
      }
      node.features[f] = it->second;
    }
    nodes[index[rep]] = std::move(node);
  }
  return FeatureStructure::FromNodes(std::move(nodes));
}

bool Subsumes(const TypeHierarchy& h, const FeatureStructure& general,
              const FeatureStructure& specific) {
  std::vector<int> image(general.size(), -1);
  image[0] = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int g = stack.back();
    stack.pop_back();
    const auto& gn = general.node(g);
    const auto& sn = specific.node(image[g]);
    if (!h.IsSubtypeId(h.Id(sn.type), h.Id(gn.type))) return false;
    if (gn.value && gn.value != sn.value) return false;
    for (const auto& [f, c] : gn.features) {
      auto it = sn.features.find(f);
      if (it == sn.features.end()) return false;
      if (image[c] < 0) {
        image[c] = it->second;
        stack.push_back(c);
      } else if (image[c] != it->second) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace medico::dialogue

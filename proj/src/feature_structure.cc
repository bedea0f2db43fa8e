#include "dcxg/feature_structure.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "dcxg/errors.h"

namespace dcxg {

using internal::Graph;
using internal::Node;

std::string PathToString(const Path &path) {
  std::string out;
  for (const PathStep &step : path) {
    if (step.is_index()) {
      out += "[" + std::to_string(step.index) + "]";
    } else {
      if (!out.empty()) out += ".";
      out += step.feature;
    }
  }
  return out.empty() ? "<root>" : out;
}

Path ParsePath(std::string_view text) {
  Path path;
  if (text == "<root>") return path;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '.') {
      ++i;
      continue;
    }
    if (text[i] == '[') {
      size_t close = text.find(']', i);
      if (close == std::string_view::npos) {
        throw StructureError("unterminated index in path " + std::string(text));
      }
      int index = -1;
      auto [ptr, ec] = std::from_chars(text.data() + i + 1, text.data() + close, index);
      if (ec != std::errc() || ptr != text.data() + close || index < 0) {
        throw StructureError("bad index in path " + std::string(text));
      }
      path.emplace_back(index);
      i = close + 1;
      continue;
    }
    size_t end = text.find_first_of(".[", i);
    if (end == std::string_view::npos) end = text.size();
    path.emplace_back(std::string(text.substr(i, end - i)));
    i = end;
  }
  return path;
}

namespace {

std::shared_ptr<const Graph> SingleNode(Node node) {
  auto graph = std::make_shared<Graph>();
  graph->push_back(std::move(node));
  return graph;
}

const std::shared_ptr<const Graph> &UnspecifiedGraph() {
  static const std::shared_ptr<const Graph> graph = SingleNode(Node{});
  return graph;
}

}  // namespace

FeatureStructure::FeatureStructure() : graph_(UnspecifiedGraph()), root_(0) {}

FeatureStructure FeatureStructure::Atom(std::string type) {
  Node node;
  node.label = std::move(type);
  return FeatureStructure(SingleNode(std::move(node)), 0);
}

FeatureStructure FeatureStructure::Text(std::string text) {
  Node node;
  node.kind = Node::Kind::kText;
  node.label = std::move(text);
  return FeatureStructure(SingleNode(std::move(node)), 0);
}

FeatureStructure FeatureStructure::Number(double value) {
  Node node;
  node.kind = Node::Kind::kNumber;
  node.label.clear();
  node.number = value;
  return FeatureStructure(SingleNode(std::move(node)), 0);
}

FeatureStructure FeatureStructure::Vector(VectorRef ref) {
  Node node;
  node.kind = Node::Kind::kVector;
  node.label.clear();
  node.vector = std::move(ref);
  return FeatureStructure(SingleNode(std::move(node)), 0);
}

ValueKind FeatureStructure::kind() const {
  const Node &n = node();
  switch (n.kind) {
    case Node::Kind::kTyped:
      if (!n.features.empty()) return ValueKind::kStruct;
      return n.label == kTopType ? ValueKind::kUnspecified : ValueKind::kAtom;
    case Node::Kind::kText:
      return ValueKind::kText;
    case Node::Kind::kNumber:
      return ValueKind::kNumber;
    case Node::Kind::kList:
      return ValueKind::kList;
    case Node::Kind::kVector:
      return ValueKind::kVector;
  }
  return ValueKind::kUnspecified;
}

std::vector<std::string> FeatureStructure::feature_names() const {
  std::vector<std::string> names;
  for (const auto &[name, child] : node().features) names.push_back(name);
  return names;
}

std::optional<FeatureStructure> FeatureStructure::Get(
    std::string_view feature) const {
  for (const auto &[name, child] : node().features) {
    if (name == feature) return FeatureStructure(graph_, child);
  }
  return std::nullopt;
}

FeatureStructure FeatureStructure::Item(size_t i) const {
  return FeatureStructure(graph_, node().items.at(i));
}

FeatureStructure FeatureStructure::WithoutFeature(std::string_view feature) const {
  Graph copy = *graph_;
  auto &features = copy[root_].features;
  features.erase(std::remove_if(features.begin(), features.end(),
                                [&](const auto &f) { return f.first == feature; }),
                 features.end());
  std::vector<int> roots;
  int r = root_;
  auto graph = CompactGraph(copy, std::span<const int>(&r, 1), &roots);
  return FeatureStructure(graph, roots[0]);
}

std::optional<FeatureStructure> ResolvePath(const FeatureStructure &fs,
                                            std::span<const PathStep> path) {
  FeatureStructure current = fs;
  for (const PathStep &step : path) {
    if (step.is_index()) {
      if (current.kind() != ValueKind::kList ||
          static_cast<size_t>(step.index) >= current.list_size()) {
        return std::nullopt;
      }
      current = current.Item(step.index);
    } else {
      auto next = current.Get(step.feature);
      if (!next) return std::nullopt;
      current = *next;
    }
  }
  return current;
}

namespace {

bool SameContent(const Node &x, const Node &y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Node::Kind::kTyped:
      if (x.label != y.label || x.features.size() != y.features.size()) return false;
      for (size_t i = 0; i < x.features.size(); ++i) {
        if (x.features[i].first != y.features[i].first) return false;
      }
      return true;
    case Node::Kind::kText:
      return x.label == y.label;
    case Node::Kind::kNumber:
      return x.number == y.number;
    case Node::Kind::kList:
      return x.items.size() == y.items.size() && x.open_tail == y.open_tail;
    case Node::Kind::kVector:
      return x.vector == y.vector;
  }
  return false;
}

struct IsoChecker {
  const Graph &ga;
  const Graph &gb;
  std::unordered_map<int, int> a_to_b;
  std::unordered_map<int, int> b_to_a;

  bool Match(int a, int b) {
    auto ia = a_to_b.find(a);
    auto ib = b_to_a.find(b);
    if (ia != a_to_b.end() || ib != b_to_a.end()) {
      return ia != a_to_b.end() && ib != b_to_a.end() && ia->second == b &&
             ib->second == a;
    }
    const Node &x = ga[a];
    const Node &y = gb[b];
    if (!SameContent(x, y)) return false;
    a_to_b.emplace(a, b);
    b_to_a.emplace(b, a);
    for (size_t i = 0; i < x.features.size(); ++i) {
      if (!Match(x.features[i].second, y.features[i].second)) return false;
    }
    for (size_t i = 0; i < x.items.size(); ++i) {
      if (!Match(x.items[i], y.items[i])) return false;
    }
    return true;
  }
};

std::string FormatNumber(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

}  // namespace

bool Isomorphic(const FeatureStructure &a, const FeatureStructure &b) {
  IsoChecker checker{a.graph(), b.graph(), {}, {}};
  return checker.Match(a.root(), b.root());
}

std::string DescribeNode(const FeatureStructure &fs) {
  switch (fs.kind()) {
    case ValueKind::kUnspecified:
      return "unspecified";
    case ValueKind::kAtom:
      return fs.type();
    case ValueKind::kStruct: {
      std::string out = "[";
      if (fs.type() != kTopType) out += fs.type() + " ";
      std::vector<std::string> names = fs.feature_names();
      for (size_t i = 0; i < names.size(); ++i) {
        if (i) out += " ";
        out += names[i];
      }
      return out + "]";
    }
    case ValueKind::kText:
      return "\"" + fs.text() + "\"";
    case ValueKind::kNumber:
      return FormatNumber(fs.number());
    case ValueKind::kList:
      return "list(" + std::to_string(fs.list_size()) + (fs.open_tail() ? ",...)" : ")");
    case ValueKind::kVector:
      return (fs.vector().is_prototype() ? "proto:" : "vec:") + fs.vector().key;
  }
  return "?";
}

int FsBuilder::AddTyped(std::string type) {
  Node node;
  node.label = std::move(type);
  graph_.push_back(std::move(node));
  return static_cast<int>(graph_.size() - 1);
}

int FsBuilder::AddText(std::string text) {
  Node node;
  node.kind = Node::Kind::kText;
  node.label = std::move(text);
  graph_.push_back(std::move(node));
  return static_cast<int>(graph_.size() - 1);
}

int FsBuilder::AddNumber(double value) {
  Node node;
  node.kind = Node::Kind::kNumber;
  node.label.clear();
  node.number = value;
  graph_.push_back(std::move(node));
  return static_cast<int>(graph_.size() - 1);
}

int FsBuilder::AddVector(VectorRef ref) {
  Node node;
  node.kind = Node::Kind::kVector;
  node.label.clear();
  node.vector = std::move(ref);
  graph_.push_back(std::move(node));
  return static_cast<int>(graph_.size() - 1);
}

int FsBuilder::AddList(bool open_tail) {
  Node node;
  node.kind = Node::Kind::kList;
  node.label.clear();
  node.open_tail = open_tail;
  graph_.push_back(std::move(node));
  return static_cast<int>(graph_.size() - 1);
}

void FsBuilder::SetFeature(int parent, std::string name, int child) {
  Node &node = graph_.at(parent);
  if (node.kind != Node::Kind::kTyped) {
    throw StructureError("feature '" + name + "' on a non-struct value");
  }
  auto it = std::lower_bound(
      node.features.begin(), node.features.end(), name,
      [](const auto &f, const std::string &n) { return f.first < n; });
  if (it != node.features.end() && it->first == name) {
    throw StructureError("duplicate feature '" + name + "'");
  }
  node.features.insert(it, {std::move(name), child});
}

void FsBuilder::AppendItem(int list, int child) {
  Node &node = graph_.at(list);
  if (node.kind != Node::Kind::kList) throw StructureError("item on a non-list value");
  node.items.push_back(child);
}

void FsBuilder::SetType(int node, std::string type) { graph_.at(node).label = std::move(type); }

void FsBuilder::SetOpenTail(int list, bool open) { graph_.at(list).open_tail = open; }

bool FsBuilder::HasFeature(int parent, std::string_view name) const {
  for (const auto &[f, child] : graph_.at(parent).features) {
    if (f == name) return true;
  }
  return false;
}

FeatureStructure FsBuilder::Build(int root) {
  std::vector<int> roots;
  auto graph = CompactGraph(graph_, std::span<const int>(&root, 1), &roots);
  graph_.clear();
  return FeatureStructure(std::move(graph), roots[0]);
}

std::shared_ptr<const Graph> CompactGraph(const Graph &graph,
                                          std::span<const int> roots,
                                          std::vector<int> *new_roots) {
  auto out = std::make_shared<Graph>();
  std::vector<int> mapping(graph.size(), -1);
  std::vector<char> state(graph.size(), 0);  // 0 new, 1 on stack, 2 done

  // Iterative post-order would lose the pre-order numbering; depth is small
  // for linguistic structures so recursion is fine.
  auto copy = [&](auto &&self, int old) -> int {
    if (state[old] == 2) return mapping[old];
    if (state[old] == 1) throw StructureError("feature structure contains a cycle");
    state[old] = 1;
    int fresh = static_cast<int>(out->size());
    mapping[old] = fresh;
    out->push_back(graph[old]);
    Node &target = (*out)[fresh];
    std::sort(target.features.begin(), target.features.end(),
              [](const auto &x, const auto &y) { return x.first < y.first; });
    for (size_t i = 0; i < (*out)[fresh].features.size(); ++i) {
      int child = self(self, (*out)[fresh].features[i].second);
      (*out)[fresh].features[i].second = child;
    }
    for (size_t i = 0; i < (*out)[fresh].items.size(); ++i) {
      int child = self(self, (*out)[fresh].items[i]);
      (*out)[fresh].items[i] = child;
    }
    state[old] = 2;
    return fresh;
  };

  new_roots->clear();
  for (int r : roots) new_roots->push_back(copy(copy, r));
  return out;
}

}  // namespace dcxg

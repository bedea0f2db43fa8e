#include "dcxg/unify.h"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "dcxg/errors.h"

namespace dcxg {

using internal::Graph;
using internal::Node;

const char *KindName(UnifyFailure::Kind kind) {
  switch (kind) {
    case UnifyFailure::Kind::kClash:
      return "Clash";
    case UnifyFailure::Kind::kSimilarityBelowThreshold:
      return "SimilarityBelowThreshold";
    case UnifyFailure::Kind::kCycle:
      return "Cycle";
  }
  return "?";
}

std::string UnifyFailure::ToString() const {
  std::ostringstream out;
  out << KindName(kind) << " at " << PathToString(path);
  if (!left.empty() || !right.empty()) out << ": " << left << " vs " << right;
  if (score) out << " (cosine " << *score << ")";
  return out.str();
}

std::optional<double> VectorRefCosine(const VectorRef &a, const VectorRef &b,
                                      const VectorStore &vs) {
  auto resolve = [&](const VectorRef &ref) -> std::optional<Vector> {
    if (ref.is_prototype()) {
      try {
        return BuildPrototype(ref.fillers, vs).vector;
      } catch (const Error &) {
        return std::nullopt;
      }
    }
    const Vector *v = vs.Find(ref.key);
    if (v == nullptr) return std::nullopt;
    return *v;
  };
  auto u = resolve(a);
  auto v = resolve(b);
  if (!u || !v) return std::nullopt;
  return Cosine(*u, *v);
}

namespace {

bool IsBareTop(const Node &n) {
  return n.kind == Node::Kind::kTyped && n.features.empty() && n.label == kTopType;
}

std::string Describe(const Graph &graph, int index) {
  auto shared = std::make_shared<Graph>();
  // DescribeNode only inspects the node itself, so a one-node graph with the
  // features' names suffices.
  shared->push_back(graph[index]);
  for (auto &f : (*shared)[0].features) f.second = 0;
  for (auto &item : (*shared)[0].items) item = 0;
  return DescribeNode(FeatureStructure(shared, 0));
}

const int *FindFeature(const Node &n, const std::string &name) {
  auto it = std::lower_bound(
      n.features.begin(), n.features.end(), name,
      [](const auto &f, const std::string &key) { return f.first < key; });
  if (it == n.features.end() || it->first != name) return nullptr;
  return &it->second;
}

void InsertFeature(Node *n, const std::string &name, int child) {
  auto it = std::lower_bound(
      n->features.begin(), n->features.end(), name,
      [](const auto &f, const std::string &key) { return f.first < key; });
  n->features.insert(it, {name, child});
}

class Unifier {
 public:
  Unifier(const TypeHierarchy &h, const VectorGate *gate) : h_(h), gate_(gate) {}

  // Copies a graph into the arena; returns the offset of its first node.
  int Add(const Graph &graph) {
    int offset = static_cast<int>(arena_.size());
    for (const Node &node : graph) {
      Node copy = node;
      for (auto &f : copy.features) f.second += offset;
      for (int &item : copy.items) item += offset;
      arena_.push_back(std::move(copy));
      parent_.push_back(static_cast<int>(parent_.size()));
    }
    return offset;
  }

  bool Run(int x, int y) {
    Path path;
    return Merge(x, y, &path);
  }

  const UnifyFailure &failure() const { return failure_; }

  UnifyResult Finish(int root) {
    // Resolve every reference to its representative.
    for (Node &node : arena_) {
      for (auto &f : node.features) f.second = Find(f.second);
      for (int &item : node.items) item = Find(item);
    }
    int r = Find(root);
    std::vector<int> roots;
    try {
      auto graph = CompactGraph(arena_, std::span<const int>(&r, 1), &roots);
      return FeatureStructure(std::move(graph), roots[0]);
    } catch (const StructureError &) {
      UnifyFailure f;
      f.kind = UnifyFailure::Kind::kCycle;
      return f;
    }
  }

 private:
  int Find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool Fail(UnifyFailure::Kind kind, const Path &path, int x, int y,
            std::optional<double> score = std::nullopt) {
    failure_.kind = kind;
    failure_.path = path;
    failure_.left = Describe(arena_, x);
    failure_.right = Describe(arena_, y);
    failure_.score = score;
    return false;
  }

  bool Merge(int x, int y, Path *path) {
    x = Find(x);
    y = Find(y);
    if (x == y) return true;
    const Node &nx = arena_[x];
    const Node &ny = arena_[y];

    if (IsBareTop(ny)) {
      parent_[y] = x;
      return true;
    }
    if (IsBareTop(nx)) {
      arena_[x] = arena_[y];
      parent_[y] = x;
      return true;
    }
    if (nx.kind != ny.kind) return Fail(UnifyFailure::Kind::kClash, *path, x, y);

    switch (nx.kind) {
      case Node::Kind::kTyped:
        return MergeTyped(x, y, path);
      case Node::Kind::kText:
        if (nx.label != ny.label) return Fail(UnifyFailure::Kind::kClash, *path, x, y);
        parent_[y] = x;
        return true;
      case Node::Kind::kNumber:
        if (nx.number != ny.number) return Fail(UnifyFailure::Kind::kClash, *path, x, y);
        parent_[y] = x;
        return true;
      case Node::Kind::kList:
        return MergeList(x, y, path);
      case Node::Kind::kVector:
        return MergeVector(x, y, path);
    }
    return false;
  }

  bool MergeTyped(int x, int y, Path *path) {
    std::optional<std::string> glb = h_.Glb(arena_[x].label, arena_[y].label);
    if (!glb) return Fail(UnifyFailure::Kind::kClash, *path, x, y);
    Node other = arena_[y];
    arena_[x].label = *glb;
    parent_[y] = x;

    std::vector<std::string> names;
    for (const auto &f : arena_[x].features) names.push_back(f.first);
    for (const auto &f : other.features) names.push_back(f.first);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    for (const std::string &name : names) {
      const int *theirs = FindFeature(other, name);
      if (theirs == nullptr) continue;
      int rep = Find(x);
      const int *ours = FindFeature(arena_[rep], name);
      if (ours == nullptr) {
        InsertFeature(&arena_[rep], name, *theirs);
        continue;
      }
      int mine = *ours;
      path->emplace_back(name);
      bool ok = Merge(mine, *theirs, path);
      path->pop_back();
      if (!ok) return false;
    }
    return true;
  }

  bool MergeList(int x, int y, Path *path) {
    Node mine = arena_[x];
    Node other = arena_[y];
    size_t m = mine.items.size();
    size_t n = other.items.size();
    bool fits = (m == n) || (m < n && mine.open_tail) || (n < m && other.open_tail);
    if (!fits) return Fail(UnifyFailure::Kind::kClash, *path, x, y);
    parent_[y] = x;
    Node &target = arena_[x];
    if (n > m) target.items = other.items;
    for (size_t i = 0; i < std::min(m, n); ++i) target.items[i] = mine.items[i];
    target.open_tail = mine.open_tail && other.open_tail;
    for (size_t i = 0; i < std::min(m, n); ++i) {
      path->emplace_back(static_cast<int>(i));
      bool ok = Merge(mine.items[i], other.items[i], path);
      path->pop_back();
      if (!ok) return false;
    }
    return true;
  }

  bool MergeVector(int x, int y, Path *path) {
    const VectorRef &a = arena_[x].vector;
    const VectorRef &b = arena_[y].vector;
    if (a == b) {
      parent_[y] = x;
      return true;
    }
    if (gate_ == nullptr) return Fail(UnifyFailure::Kind::kClash, *path, x, y);
    if (gate_->threshold > -1.0) {
      std::optional<double> score = VectorRefCosine(a, b, *gate_->store);
      if (!score || *score < gate_->threshold) {
        return Fail(UnifyFailure::Kind::kSimilarityBelowThreshold, *path, x, y, score);
      }
    }
    // Observation beats expectation; otherwise the left operand stays.
    if (a.is_prototype() && !b.is_prototype()) arena_[x].vector = b;
    parent_[y] = x;
    return true;
  }

  const TypeHierarchy &h_;
  const VectorGate *gate_;
  Graph arena_;
  std::vector<int> parent_;
  UnifyFailure failure_;
};

UnifyResult Run(const FeatureStructure &a, const FeatureStructure &b,
                const TypeHierarchy &h, const VectorGate *gate) {
  Unifier u(h, gate);
  int offset_a = u.Add(a.graph());
  int offset_b = u.Add(b.graph());
  int x = offset_a + a.root();
  int y = offset_b + b.root();
  if (!u.Run(x, y)) return u.failure();
  return u.Finish(x);
}

}  // namespace

UnifyResult Unify(const FeatureStructure &a, const FeatureStructure &b,
                  const TypeHierarchy &h) {
  return Run(a, b, h, nullptr);
}

UnifyResult LooseUnify(const FeatureStructure &a, const FeatureStructure &b,
                       const TypeHierarchy &h, const VectorStore &vs,
                       double threshold) {
  VectorGate gate{&vs, threshold};
  return Run(a, b, h, &gate);
}

FeatureStructure PlaceAt(const Path &path, const FeatureStructure &value) {
  if (path.empty()) return value;
  auto graph = std::make_shared<Graph>(value.graph());
  int child = value.root();
  for (auto step = path.rbegin(); step != path.rend(); ++step) {
    Node wrapper;
    if (step->is_index()) {
      wrapper.kind = Node::Kind::kList;
      wrapper.label.clear();
      wrapper.open_tail = true;
      for (int i = 0; i < step->index; ++i) {
        graph->push_back(Node{});
        wrapper.items.push_back(static_cast<int>(graph->size() - 1));
      }
      wrapper.items.push_back(child);
    } else {
      wrapper.features.push_back({step->feature, child});
    }
    graph->push_back(std::move(wrapper));
    child = static_cast<int>(graph->size() - 1);
  }
  return FeatureStructure(std::move(graph), child);
}

UnifyResult UnifyAt(const FeatureStructure &host, const Path &path,
                    const FeatureStructure &guest, const TypeHierarchy &h,
                    const VectorGate *gate) {
  return Run(host, PlaceAt(path, guest), h, gate);
}

namespace {

class SubsumptionChecker {
 public:
  SubsumptionChecker(const Graph &g, const Graph &s, const TypeHierarchy &h,
                     const VectorGate *gate)
      : g_(g), s_(s), h_(h), gate_(gate) {}

  bool Check(int gi, int si) {
    auto it = mapping_.find(gi);
    if (it != mapping_.end()) return it->second == si;
    mapping_.emplace(gi, si);
    const Node &gn = g_[gi];
    const Node &sn = s_[si];
    if (IsBareTop(gn)) return true;
    if (gn.kind != sn.kind) return false;
    switch (gn.kind) {
      case Node::Kind::kTyped:
        if (!h_.IsSubtype(sn.label, gn.label)) return false;
        for (const auto &[name, child] : gn.features) {
          const int *other = FindFeature(sn, name);
          if (other == nullptr || !Check(child, *other)) return false;
        }
        return true;
      case Node::Kind::kText:
        return gn.label == sn.label;
      case Node::Kind::kNumber:
        return gn.number == sn.number;
      case Node::Kind::kList: {
        size_t m = gn.items.size();
        size_t n = sn.items.size();
        if (gn.open_tail ? n < m : (n != m || sn.open_tail)) return false;
        for (size_t i = 0; i < m; ++i) {
          if (!Check(gn.items[i], sn.items[i])) return false;
        }
        return true;
      }
      case Node::Kind::kVector:
        if (gn.vector == sn.vector) return true;
        if (gate_ == nullptr) return false;
        if (gate_->threshold <= -1.0) return true;
        {
          auto score = VectorRefCosine(gn.vector, sn.vector, *gate_->store);
          return score && *score >= gate_->threshold;
        }
    }
    return false;
  }

 private:
  const Graph &g_;
  const Graph &s_;
  const TypeHierarchy &h_;
  const VectorGate *gate_;
  std::unordered_map<int, int> mapping_;
};

}  // namespace

bool Subsumes(const FeatureStructure &general, const FeatureStructure &specific,
              const TypeHierarchy &h, const VectorGate *gate) {
  SubsumptionChecker checker(general.graph(), specific.graph(), h, gate);
  return checker.Check(general.root(), specific.root());
}

}  // namespace dcxg

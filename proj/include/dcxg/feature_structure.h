#ifndef DCXG_FEATURE_STRUCTURE_H_
#define DCXG_FEATURE_STRUCTURE_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcxg/type_hierarchy.h"
#include "dcxg/vector_store.h"

namespace dcxg {

// Reference to a distributional vector. A plain reference names a word in
// the VectorStore. A prototype reference carries the salient fillers its
// vector is built from; its key names the slot (e.g. "reader").
struct VectorRef {
  std::string key;
  std::vector<WeightedForm> fillers;

  bool is_prototype() const { return !fillers.empty(); }
  bool operator==(const VectorRef &other) const = default;
};

// One step of a feature path: a feature name or a list position.
struct PathStep {
  std::string feature;
  int index = -1;

  PathStep(std::string name) : feature(std::move(name)) {}  // NOLINT
  PathStep(const char *name) : feature(name) {}             // NOLINT
  explicit PathStep(int position) : index(position) {}

  bool is_index() const { return index >= 0; }
  bool operator==(const PathStep &other) const = default;
  auto operator<=>(const PathStep &other) const = default;
};

using Path = std::vector<PathStep>;

// "form.syn.val[1]" style rendering and parsing.
std::string PathToString(const Path &path);
Path ParsePath(std::string_view text);

enum class ValueKind {
  kUnspecified,  // top-typed node without features
  kAtom,         // typed node without features
  kStruct,       // node with at least one feature
  kText,
  kNumber,
  kList,
  kVector,
};

namespace internal {

struct Node {
  enum class Kind : unsigned char { kTyped, kText, kNumber, kList, kVector };

  Kind kind = Kind::kTyped;
  std::string label = std::string(kTopType);  // sort for kTyped, string for kText
  double number = 0.0;
  std::vector<std::pair<std::string, int>> features;  // sorted by name
  std::vector<int> items;
  bool open_tail = false;
  VectorRef vector;
};

using Graph = std::vector<Node>;

}  // namespace internal

// An immutable, rooted, acyclic graph of typed feature/value pairs.
// Reentrancy is expressed by two paths reaching the same node. Copies are
// cheap and share the underlying graph; every operation that changes
// content builds a fresh graph.
//
// Atoms and unspecified values are typed nodes without features, so the
// same unification rule covers atoms, sorts, and nested structures.
class FeatureStructure {
 public:
  // The unspecified value.
  FeatureStructure();

  static FeatureStructure Atom(std::string type);
  static FeatureStructure Text(std::string text);
  static FeatureStructure Number(double value);
  static FeatureStructure Vector(VectorRef ref);

  ValueKind kind() const;
  bool is_unspecified() const { return kind() == ValueKind::kUnspecified; }
  bool is_typed() const { return node().kind == internal::Node::Kind::kTyped; }

  // Sort of a typed node (top for unspecified).
  const std::string &type() const { return node().label; }
  const std::string &text() const { return node().label; }
  double number() const { return node().number; }
  const VectorRef &vector() const { return node().vector; }

  // Features of a typed node in name order.
  std::vector<std::string> feature_names() const;
  size_t num_features() const { return node().features.size(); }
  std::optional<FeatureStructure> Get(std::string_view feature) const;

  size_t list_size() const { return node().items.size(); }
  bool open_tail() const { return node().open_tail; }
  FeatureStructure Item(size_t i) const;

  // Node identity: true when both handles denote the same graph node.
  bool SameNode(const FeatureStructure &other) const {
    return graph_ == other.graph_ && root_ == other.root_;
  }

  // A copy with one top-level feature removed (reachable nodes only).
  FeatureStructure WithoutFeature(std::string_view feature) const;

  const internal::Graph &graph() const { return *graph_; }
  int root() const { return root_; }
  // Another node of the same graph.
  FeatureStructure AtNode(int node) const { return FeatureStructure(graph_, node); }

  // Wraps a node of an existing graph. The graph must be acyclic.
  FeatureStructure(std::shared_ptr<const internal::Graph> graph, int root)
      : graph_(std::move(graph)), root_(root) {}

 private:
  const internal::Node &node() const { return (*graph_)[root_]; }

  std::shared_ptr<const internal::Graph> graph_;
  int root_ = 0;
};

// Value at a path, following reentrancy; nullopt when a step is missing.
std::optional<FeatureStructure> ResolvePath(const FeatureStructure &fs,
                                            std::span<const PathStep> path);

// Structural equality up to node renaming, reentrancy pattern included.
bool Isomorphic(const FeatureStructure &a, const FeatureStructure &b);

// Short human-readable rendering of a single node (for diagnostics).
std::string DescribeNode(const FeatureStructure &fs);

// Incremental construction of feature-structure graphs. Node handles are
// indices into the graph under construction.
class FsBuilder {
 public:
  int AddTyped(std::string type = std::string(kTopType));
  int AddText(std::string text);
  int AddNumber(double value);
  int AddVector(VectorRef ref);
  int AddList(bool open_tail = false);

  // Throws StructureError on a duplicate feature or a non-struct parent.
  void SetFeature(int parent, std::string name, int child);
  void AppendItem(int list, int child);
  void SetType(int node, std::string type);
  void SetOpenTail(int list, bool open);

  bool HasFeature(int parent, std::string_view name) const;
  size_t size() const { return graph_.size(); }

  // Validates acyclicity (throws StructureError) and returns the structure
  // rooted at `root`. The builder is left empty.
  FeatureStructure Build(int root);

 private:
  internal::Graph graph_;
};

// Copies the nodes reachable from roots[i] of the given graph into one new
// graph, sorting features. Returns the new root indices via `new_roots`.
// Throws StructureError on a cycle.
std::shared_ptr<const internal::Graph> CompactGraph(
    const internal::Graph &graph, std::span<const int> roots,
    std::vector<int> *new_roots);

}  // namespace dcxg

#endif  // DCXG_FEATURE_STRUCTURE_H_

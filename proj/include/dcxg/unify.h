#ifndef DCXG_UNIFY_H_
#define DCXG_UNIFY_H_

#include <optional>
#include <string>
#include <variant>

#include "dcxg/feature_structure.h"
#include "dcxg/type_hierarchy.h"
#include "dcxg/vector_store.h"

namespace dcxg {

struct UnifyFailure {
  enum class Kind {
    kClash,                     // incompatible sorts, atoms, kinds or lengths
    kSimilarityBelowThreshold,  // vector pair under the similarity gate
    kCycle,                     // the merged graph would be cyclic
  };

  Kind kind = Kind::kClash;
  Path path;
  std::string left;
  std::string right;
  // Cosine for kSimilarityBelowThreshold; absent when a side is out of
  // vocabulary.
  std::optional<double> score;

  std::string ToString() const;
};

const char *KindName(UnifyFailure::Kind kind);

class UnifyResult {
 public:
  UnifyResult(FeatureStructure fs) : value_(std::move(fs)) {}  // NOLINT
  UnifyResult(UnifyFailure f) : value_(std::move(f)) {}        // NOLINT

  bool ok() const { return value_.index() == 0; }
  explicit operator bool() const { return ok(); }
  const FeatureStructure &value() const { return std::get<0>(value_); }
  const UnifyFailure &failure() const { return std::get<1>(value_); }

 private:
  std::variant<FeatureStructure, UnifyFailure> value_;
};

// Similarity gate for vector-ref pairs. A threshold at or below -1 accepts
// every pair without looking vectors up.
struct VectorGate {
  const VectorStore *store = nullptr;
  double threshold = 0.0;
};

// Most general unifier. Distinct vector-refs clash.
UnifyResult Unify(const FeatureStructure &a, const FeatureStructure &b,
                  const TypeHierarchy &h);

// As Unify, but distinct vector-refs merge when their cosine reaches
// `threshold`. The merged node keeps the non-prototype side; on a tie the
// left operand wins.
UnifyResult LooseUnify(const FeatureStructure &a, const FeatureStructure &b,
                       const TypeHierarchy &h, const VectorStore &vs,
                       double threshold);

// Unifies `guest` into the node of `host` at `path`. Missing path steps are
// created; a list index step requires the host list to reach that position.
// gate == nullptr means strict vector comparison.
UnifyResult UnifyAt(const FeatureStructure &host, const Path &path,
                    const FeatureStructure &guest, const TypeHierarchy &h,
                    const VectorGate *gate = nullptr);

// True iff everything in `general`, reentrancies included, is present in
// `specific`. With a gate, a general vector-ref is matched by any vector it
// passes the gate against.
bool Subsumes(const FeatureStructure &general, const FeatureStructure &specific,
              const TypeHierarchy &h, const VectorGate *gate = nullptr);

// Cosine between two vector-refs (prototypes are built from their
// fillers). nullopt when a side cannot be resolved in the store.
std::optional<double> VectorRefCosine(const VectorRef &a, const VectorRef &b,
                                      const VectorStore &vs);

// Wraps `value` so that it sits at `path` below an otherwise unspecified
// root. Index steps become open lists padded with unspecified items.
FeatureStructure PlaceAt(const Path &path, const FeatureStructure &value);

}  // namespace dcxg

#endif  // DCXG_UNIFY_H_

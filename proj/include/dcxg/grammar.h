#ifndef DCXG_GRAMMAR_H_
#define DCXG_GRAMMAR_H_

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcxg/avm_json.h"
#include "dcxg/feature_structure.h"
#include "dcxg/properties.h"
#include "dcxg/type_hierarchy.h"
#include "dcxg/unify.h"
#include "dcxg/vector_store.h"

namespace dcxg {

struct Cue {
  enum class Kind {
    kSurface,   // exact (case-folded) word form
    kVector,    // similarity to a word's vector
    kFeature,   // a constituent carries `value` (or something more specific) at `path`
    kProperty,  // a property constraint ("lin:1") or a whole kind ("lin") holds
  };

  Kind kind = Kind::kSurface;
  WeightClass weight = WeightClass::kHard;
  std::string word;
  std::optional<int> tag;  // tag the cue was written with, if any
  Path path;
  FeatureStructure value;
  std::string property;
  bool implicit = false;  // generated from a construction's lexemes
  std::string key;        // identity shared by equal cues across objects
  int fan = 1;

  bool lexical() const { return kind == Kind::kSurface || kind == Kind::kVector; }
  std::string Label() const;
};

// Base-activation history: access count and time since last access.
struct History {
  int count = 0;
  double age = 1.0;

  bool operator==(const History &other) const = default;
};

struct Construction {
  std::string name;
  // {form, meaning, arg-st} under one tag scope; properties are held apart.
  FeatureStructure body;
  std::map<int, Path> tags;
  std::vector<PropertyConstraint> properties;
  std::vector<Cue> cues;
  std::vector<std::string> supertypes;
  std::vector<std::string> participants;
  std::vector<std::string> lexemes;  // nonempty for lexical constructions
  bool opaque_meaning = false;
  bool covert_args = false;
  History history;

  // Filled at load: body with all ancestor constructions folded in.
  FeatureStructure expanded;

  bool lexical() const { return !lexemes.empty(); }
  FeatureStructure Form() const;
  FeatureStructure Meaning() const;
};

struct FrameRelation {
  std::string kind;  // inheritance | precedence | perspective
  std::string target;

  bool operator==(const FrameRelation &other) const = default;
};

struct Frame {
  std::string name;
  // {"@type": name, role: element, ...}
  FeatureStructure structure;
  std::map<int, Path> tags;
  std::vector<std::string> elements;
  std::vector<Cue> cues;
  std::vector<FrameRelation> relations;
  History history;
};

struct Event {
  std::string name;
  std::string specialize;
  FeatureStructure refinement;
  std::map<int, Path> tags;
  std::vector<Cue> cues;  // trigger
  History history;
};

enum class ObjectKind { kConstruction, kFrame, kEvent };

const char *ObjectKindName(ObjectKind kind);

class Grammar {
 public:
  TypeHierarchy hierarchy;
  // Entries of the file's "hierarchy" section, in order.
  std::vector<std::pair<std::string, std::vector<std::string>>> declared_types;
  std::vector<Construction> constructions;
  std::vector<Frame> frames;
  std::vector<Event> events;

  const Construction *FindConstruction(std::string_view name) const;
  const Frame *FindFrame(std::string_view name) const;
  const Event *FindEvent(std::string_view name) const;
  std::optional<ObjectKind> KindOf(std::string_view name) const;
};

// Parses and validates a grammar. Throws ParseError for malformed input
// and ValidationError with every failed rule otherwise.
Grammar LoadGrammar(std::istream &in);
Grammar LoadGrammarFile(const std::string &path);
Grammar LoadGrammarJson(const Json &json);

Json SerializeGrammar(const Grammar &g);

// Structural equality (feature structures compared up to node renaming).
bool GrammarsEqual(const Grammar &a, const Grammar &b);

// Checks that every word a frame cue, event cue, or prototype refers to is
// in the store. Throws ValidationError.
void ValidateVocabulary(const Grammar &g, const VectorStore &vs);

// Left fold of the bodies of all ancestor constructions (most generic
// first) with c last. Throws InheritanceClash.
Construction ExpandInheritance(const Construction &c, const Grammar &g);

// Loose-unifies the refinement into the target instance. Argument slots
// that the refinement changed and that carry no `status` yet are marked
// `status: expected`.
UnifyResult ApplyEvent(const Event &e, const FeatureStructure &target_instance,
                       const TypeHierarchy &h, const VectorStore &vs,
                       double sim_threshold);

// Feature names used by the engine.
inline constexpr const char *kStatus = "status";
inline constexpr const char *kExpected = "expected";
inline constexpr const char *kObserved = "observed";

}  // namespace dcxg

#endif  // DCXG_GRAMMAR_H_

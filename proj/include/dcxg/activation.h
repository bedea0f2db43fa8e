#ifndef DCXG_ACTIVATION_H_
#define DCXG_ACTIVATION_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcxg/avm_json.h"
#include "dcxg/feature_structure.h"
#include "dcxg/grammar.h"
#include "dcxg/properties.h"
#include "dcxg/vector_store.h"

namespace dcxg {

struct ActivationParams {
  double mas = 2.0;
  double default_cue_weight = 1.0;
  double hard_cue_weight = 1.0;
  double soft_cue_weight = 0.4;
  double recognition_threshold = 1.5;
  double decay = 0.5;
  double soft_penalty = 0.25;
  double sim_threshold = 0.6;

  // Throws DomainError when a field is out of range.
  void Validate() const;
  double Weight(WeightClass w) const;

  // Reads any subset of the fields above (same names); unknown keys are
  // rejected with ParseError.
  static ActivationParams FromJson(const Json &json, ActivationParams base);
  static ActivationParams FromJson(const Json &json);
  Json ToJson() const;
};

struct CueMatch {
  enum class Kind { kLexical, kSyntactic };

  std::string cue;
  Kind kind = Kind::kLexical;
  WeightClass weight_class = WeightClass::kHard;
  double F = 0.0;
  int fan = 1;
  bool satisfied = false;
};

struct ActivationRecord {
  std::string object;
  double base = 0.0;
  std::vector<CueMatch> cue_matches;
  double total = 0.0;
  std::optional<double> theta;
  double sigma = 0.0;
};

// MAS - ln(fan). Throws DomainError when fan < 1.
double AssociativeStrength(const ActivationParams &p, int fan);

// ln(1 + count) - d ln(time). Throws DomainError on time <= 0 or a
// negative count.
double BaseActivation(int access_count, double time_since_last_access,
                      const ActivationParams &p);

// B + sum over satisfied cues of W * F * (MAS - ln fan), in cue order.
double TotalActivation(const ActivationRecord &record, const ActivationParams &p);

// B + sum over satisfied cues of W * (MAS - ln fan): the form without the
// distributional factor.
double TotalActivationWithoutSimilarity(const ActivationRecord &record,
                                        const ActivationParams &p);

// Surface cues: 1 on a case-folded match, else 0. Vector cues:
// max(0, cosine), 0 when either word is out of vocabulary.
double LexicalF(std::string_view token, const Cue &cue, const VectorStore &vs);

// Vector carried by a frame-role filler: the value itself when it is a
// vector-ref, else its meaning.sem.ds-vector.
std::optional<VectorRef> RoleVector(const FeatureStructure &filler);

// Prototypes of the roles of meaning.sem.frames whose filler vector is a
// prototype. Roles whose prototype cannot be built are left out.
std::map<std::string, Prototype> RolePrototypes(const FeatureStructure &body,
                                                const VectorStore &vs);

// Mean thematic fit over the roles of meaning.sem.frames that have both a
// word filler and a prototype. Fillers marked `status: expected` are not
// yet observed and do not count. Throws NoScorableRoles when none does.
double SemanticCoherence(const FeatureStructure &instance,
                         const std::map<std::string, Prototype> &prototypes,
                         const VectorStore &vs);

// Sum of the weights of satisfied cues.
double Salience(const ActivationRecord &record, const ActivationParams &p);

}  // namespace dcxg

#endif  // DCXG_ACTIVATION_H_

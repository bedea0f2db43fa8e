#ifndef DCXG_PROPERTIES_H_
#define DCXG_PROPERTIES_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcxg {

// Cue and constraint weights. kDefault is used for frame lexical cues,
// which carry no explicit hard/soft marking.
enum class WeightClass { kHard, kSoft, kDefault };

const char *WeightName(WeightClass w);
std::optional<WeightClass> ParseWeight(std::string_view text);

enum class PropertyKind {
  kLinearity,     // lin
  kAdjacency,     // adj
  kCooccurrence,  // cooc
  kExclusion,     // excl
  kRequirement,   // req
  kDependency,    // dependency: stored only, never evaluable
};

const char *PropertyKindName(PropertyKind kind);
std::optional<PropertyKind> ParsePropertyKind(std::string_view text);

struct PropertyConstraint {
  PropertyKind kind = PropertyKind::kLinearity;
  std::vector<int> participants;  // tag numbers
  WeightClass weight = WeightClass::kHard;

  bool operator==(const PropertyConstraint &other) const = default;
};

// Inclusive token span, 0-based.
struct TokenSpan {
  int start = 0;
  int end = 0;

  bool operator==(const TokenSpan &other) const = default;
};

// Participant tag -> span. A tag that is absent or maps to nullopt is
// unmatched.
struct SpanAssignment {
  int sentence_length = 0;
  std::map<int, std::optional<TokenSpan>> spans;

  std::optional<TokenSpan> Get(int tag) const;
};

enum class Verdict { kSatisfied, kViolated, kInapplicable };

const char *VerdictName(Verdict v);

struct PropertyEvaluation {
  std::vector<Verdict> verdicts;  // parallel to the constraints
  int hard_violations = 0;
  int soft_violations = 0;
};

// Throws ValidationError when spans of distinct tags overlap, a span lies
// outside the sentence, or a binary constraint has the wrong arity.
PropertyEvaluation Evaluate(std::span<const PropertyConstraint> constraints,
                            const SpanAssignment &assignment);

// 0 with any hard violation, otherwise (1 - soft_penalty)^soft_violations.
// Throws DomainError unless soft_penalty is in (0, 1].
double RelaxationScore(const PropertyEvaluation &ev, double soft_penalty);

}  // namespace dcxg

#endif  // DCXG_PROPERTIES_H_

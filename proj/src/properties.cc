#include "dcxg/properties.h"

#include <cmath>

#include "dcxg/errors.h"

namespace dcxg {

const char *WeightName(WeightClass w) {
  switch (w) {
    case WeightClass::kHard:
      return "hard";
    case WeightClass::kSoft:
      return "soft";
    case WeightClass::kDefault:
      return "default";
  }
  return "?";
}

std::optional<WeightClass> ParseWeight(std::string_view text) {
  if (text == "hard") return WeightClass::kHard;
  if (text == "soft") return WeightClass::kSoft;
  if (text == "default") return WeightClass::kDefault;
  return std::nullopt;
}

const char *PropertyKindName(PropertyKind kind) {
  switch (kind) {
    case PropertyKind::kLinearity:
      return "lin";
    case PropertyKind::kAdjacency:
      return "adj";
    case PropertyKind::kCooccurrence:
      return "cooc";
    case PropertyKind::kExclusion:
      return "excl";
    case PropertyKind::kRequirement:
      return "req";
    case PropertyKind::kDependency:
      return "dependency";
  }
  return "?";
}

std::optional<PropertyKind> ParsePropertyKind(std::string_view text) {
  for (PropertyKind k : {PropertyKind::kLinearity, PropertyKind::kAdjacency,
                         PropertyKind::kCooccurrence, PropertyKind::kExclusion,
                         PropertyKind::kRequirement, PropertyKind::kDependency}) {
    if (text == PropertyKindName(k)) return k;
  }
  return std::nullopt;
}

const char *VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kSatisfied:
      return "satisfied";
    case Verdict::kViolated:
      return "violated";
    case Verdict::kInapplicable:
      return "inapplicable";
  }
  return "?";
}

std::optional<TokenSpan> SpanAssignment::Get(int tag) const {
  auto it = spans.find(tag);
  if (it == spans.end()) return std::nullopt;
  return it->second;
}

namespace {

void CheckAssignment(const SpanAssignment &a) {
  std::vector<ValidationIssue> issues;
  std::vector<std::pair<int, TokenSpan>> matched;
  for (const auto &[tag, span] : a.spans) {
    if (!span) continue;
    if (span->start < 0 || span->end < span->start || span->end >= a.sentence_length) {
      issues.push_back({"#" + std::to_string(tag), "span outside the sentence"});
    }
    matched.emplace_back(tag, *span);
  }
  for (size_t i = 0; i < matched.size(); ++i) {
    for (size_t j = i + 1; j < matched.size(); ++j) {
      const TokenSpan &x = matched[i].second;
      const TokenSpan &y = matched[j].second;
      if (x.start <= y.end && y.start <= x.end) {
        issues.push_back({"#" + std::to_string(matched[i].first),
                          "span overlaps #" + std::to_string(matched[j].first)});
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Verdict Judge(const PropertyConstraint &c, const SpanAssignment &a) {
  if (c.kind == PropertyKind::kDependency) return Verdict::kInapplicable;
  if (c.participants.size() != 2) {
    throw ValidationError(std::vector<ValidationIssue>{{PropertyKindName(c.kind), "needs exactly 2 participants"}});
  }
  std::optional<TokenSpan> x = a.Get(c.participants[0]);
  std::optional<TokenSpan> y = a.Get(c.participants[1]);
  auto verdict = [](bool ok) { return ok ? Verdict::kSatisfied : Verdict::kViolated; };
  switch (c.kind) {
    case PropertyKind::kLinearity:
      if (!x || !y) return Verdict::kInapplicable;
      return verdict(x->end < y->start);
    case PropertyKind::kAdjacency:
      if (!x || !y) return Verdict::kInapplicable;
      return verdict(x->end + 1 == y->start);
    case PropertyKind::kCooccurrence:
      return verdict(x.has_value() == y.has_value());
    case PropertyKind::kExclusion:
      return verdict(!(x && y));
    case PropertyKind::kRequirement:
      return verdict(!x || y);
    case PropertyKind::kDependency:
      break;
  }
  return Verdict::kInapplicable;
}

}  // namespace

PropertyEvaluation Evaluate(std::span<const PropertyConstraint> constraints,
                            const SpanAssignment &assignment) {
  CheckAssignment(assignment);
  PropertyEvaluation ev;
  for (const PropertyConstraint &c : constraints) {
    Verdict v = Judge(c, assignment);
    ev.verdicts.push_back(v);
    if (v != Verdict::kViolated) continue;
    if (c.weight == WeightClass::kHard) {
      ++ev.hard_violations;
    } else {
      ++ev.soft_violations;
    }
  }
  return ev;
}

double RelaxationScore(const PropertyEvaluation &ev, double soft_penalty) {
  if (!(soft_penalty > 0.0 && soft_penalty <= 1.0)) {
    throw DomainError("soft_penalty must lie in (0, 1]");
  }
  if (ev.hard_violations > 0) return 0.0;
  double score = 1.0;
  for (int i = 0; i < ev.soft_violations; ++i) score *= 1.0 - soft_penalty;
  return score;
}

}  // namespace dcxg

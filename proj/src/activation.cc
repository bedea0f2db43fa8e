#include "dcxg/activation.h"

#include <cmath>

#include "dcxg/errors.h"

namespace dcxg {

void ActivationParams::Validate() const {
  if (!(mas > 0.0)) throw DomainError("mas must be positive");
  if (default_cue_weight < 0.0 || hard_cue_weight < 0.0 || soft_cue_weight < 0.0) {
    throw DomainError("cue weights must be nonnegative");
  }
  if (hard_cue_weight < soft_cue_weight) {
    throw DomainError("hard_cue_weight must be at least soft_cue_weight");
  }
  if (decay < 0.0) throw DomainError("decay must be nonnegative");
  if (!(soft_penalty > 0.0 && soft_penalty <= 1.0)) {
    throw DomainError("soft_penalty must lie in (0, 1]");
  }
  if (!(sim_threshold >= -1.0 && sim_threshold <= 1.0)) {
    throw DomainError("sim_threshold must lie in [-1, 1]");
  }
  if (!std::isfinite(recognition_threshold)) {
    throw DomainError("recognition_threshold must be finite");
  }
}

double ActivationParams::Weight(WeightClass w) const {
  switch (w) {
    case WeightClass::kHard:
      return hard_cue_weight;
    case WeightClass::kSoft:
      return soft_cue_weight;
    case WeightClass::kDefault:
      return default_cue_weight;
  }
  return 0.0;
}

namespace {

struct Field {
  const char *name;
  double ActivationParams::*member;
};

constexpr Field kFields[] = {
    {"mas", &ActivationParams::mas},
    {"default_cue_weight", &ActivationParams::default_cue_weight},
    {"hard_cue_weight", &ActivationParams::hard_cue_weight},
    {"soft_cue_weight", &ActivationParams::soft_cue_weight},
    {"recognition_threshold", &ActivationParams::recognition_threshold},
    {"decay", &ActivationParams::decay},
    {"soft_penalty", &ActivationParams::soft_penalty},
    {"sim_threshold", &ActivationParams::sim_threshold},
};

}  // namespace

ActivationParams ActivationParams::FromJson(const Json &json, ActivationParams base) {
  if (!json.is_object()) throw ParseError("", "parameters must be a JSON object");
  for (auto it = json.begin(); it != json.end(); ++it) {
    bool known = false;
    for (const Field &f : kFields) {
      if (it.key() != f.name) continue;
      if (!it.value().is_number()) throw ParseError("/" + it.key(), "expected a number");
      base.*f.member = it.value().get<double>();
      known = true;
    }
    if (!known) throw ParseError("/" + it.key(), "unknown parameter");
  }
  return base;
}

ActivationParams ActivationParams::FromJson(const Json &json) {
  return FromJson(json, ActivationParams());
}

Json ActivationParams::ToJson() const {
  Json out = Json::object();
  for (const Field &f : kFields) out[f.name] = this->*f.member;
  return out;
}

double AssociativeStrength(const ActivationParams &p, int fan) {
  if (fan < 1) throw DomainError("fan must be at least 1");
  return p.mas - std::log(static_cast<double>(fan));
}

double BaseActivation(int access_count, double time_since_last_access,
                      const ActivationParams &p) {
  if (access_count < 0) throw DomainError("access count must be nonnegative");
  if (!(time_since_last_access > 0.0)) throw DomainError("time since last access must be positive");
  return std::log1p(static_cast<double>(access_count)) - p.decay * std::log(time_since_last_access);
}

double TotalActivation(const ActivationRecord &record, const ActivationParams &p) {
  double sum = 0.0;
  for (const CueMatch &m : record.cue_matches) {
    if (!m.satisfied) continue;
    sum += p.Weight(m.weight_class) * m.F * AssociativeStrength(p, m.fan);
  }
  return record.base + sum;
}

double TotalActivationWithoutSimilarity(const ActivationRecord &record,
                                        const ActivationParams &p) {
  double sum = 0.0;
  for (const CueMatch &m : record.cue_matches) {
    if (!m.satisfied) continue;
    sum += p.Weight(m.weight_class) * AssociativeStrength(p, m.fan);
  }
  return record.base + sum;
}

double LexicalF(std::string_view token, const Cue &cue, const VectorStore &vs) {
  if (cue.kind == Cue::Kind::kSurface) return FoldCase(token) == FoldCase(cue.word) ? 1.0 : 0.0;
  if (cue.kind != Cue::Kind::kVector) return 0.0;
  const Vector *u = vs.Find(token);
  const Vector *v = vs.Find(cue.word);
  if (u == nullptr || v == nullptr) return 0.0;
  return std::max(0.0, Cosine(*u, *v));
}

std::optional<VectorRef> RoleVector(const FeatureStructure &filler) {
  if (filler.kind() == ValueKind::kVector) return filler.vector();
  static const Path kDsVector{"meaning", "sem", "ds-vector"};
  auto v = ResolvePath(filler, kDsVector);
  if (v && v->kind() == ValueKind::kVector) return v->vector();
  return std::nullopt;
}

namespace {

template <typename Fn>
void ForEachRole(const FeatureStructure &fs, Fn fn) {
  static const Path kFrames{"meaning", "sem", "frames"};
  auto frames = ResolvePath(fs, kFrames);
  if (!frames || frames->kind() != ValueKind::kList) return;
  for (size_t i = 0; i < frames->list_size(); ++i) {
    FeatureStructure frame = frames->Item(i);
    for (const std::string &role : frame.feature_names()) {
      if (role == kStatus) continue;
      fn(role, *frame.Get(role));
    }
  }
}

}  // namespace

std::map<std::string, Prototype> RolePrototypes(const FeatureStructure &body,
                                                const VectorStore &vs) {
  std::map<std::string, Prototype> out;
  ForEachRole(body, [&](const std::string &role, const FeatureStructure &filler) {
    auto ref = RoleVector(filler);
    if (!ref || !ref->is_prototype() || out.count(role)) return;
    try {
      out.emplace(role, BuildPrototype(ref->fillers, vs));
    } catch (const Error &) {
      // Out-of-vocabulary fillers leave the role unscored.
    }
  });
  return out;
}

double SemanticCoherence(const FeatureStructure &instance,
                         const std::map<std::string, Prototype> &prototypes,
                         const VectorStore &vs) {
  double sum = 0.0;
  int scored = 0;
  ForEachRole(instance, [&](const std::string &role, const FeatureStructure &filler) {
    auto proto = prototypes.find(role);
    if (proto == prototypes.end()) return;
    auto status = filler.Get(kStatus);
    if (status && status->is_typed() && status->type() == kExpected) return;
    auto ref = RoleVector(filler);
    if (!ref || ref->is_prototype() || !vs.Contains(ref->key)) return;
    sum += ThematicFit(ref->key, proto->second, vs);
    ++scored;
  });
  if (scored == 0) throw NoScorableRoles();
  return sum / scored;
}

double Salience(const ActivationRecord &record, const ActivationParams &p) {
  double sigma = 0.0;
  for (const CueMatch &m : record.cue_matches) {
    if (m.satisfied) sigma += p.Weight(m.weight_class);
  }
  return sigma;
}

}  // namespace dcxg

#include "dcxg/grammar.h"

#include <fstream>
#include <set>
#include <sstream>

#include "dcxg/errors.h"

namespace dcxg {

std::string Cue::Label() const {
  std::string w = WeightName(weight);
  switch (kind) {
    case Kind::kSurface:
      return "surface:" + word + "/" + w;
    case Kind::kVector:
      return "vec:" + word + "/" + w;
    case Kind::kFeature:
      return "feature:" + PathToString(path) + "/" + w;
    case Kind::kProperty:
      return "property:" + property + "/" + w;
  }
  return "?";
}

FeatureStructure Construction::Form() const {
  auto f = body.Get("form");
  return f ? *f : FeatureStructure();
}

FeatureStructure Construction::Meaning() const {
  auto m = body.Get("meaning");
  return m ? *m : FeatureStructure();
}

const char *ObjectKindName(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kConstruction:
      return "construction";
    case ObjectKind::kFrame:
      return "frame";
    case ObjectKind::kEvent:
      return "event";
  }
  return "?";
}

const Construction *Grammar::FindConstruction(std::string_view name) const {
  for (const auto &c : constructions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Frame *Grammar::FindFrame(std::string_view name) const {
  for (const auto &f : frames) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const Event *Grammar::FindEvent(std::string_view name) const {
  for (const auto &e : events) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::optional<ObjectKind> Grammar::KindOf(std::string_view name) const {
  if (FindConstruction(name)) return ObjectKind::kConstruction;
  if (FindFrame(name)) return ObjectKind::kFrame;
  if (FindEvent(name)) return ObjectKind::kEvent;
  return std::nullopt;
}

namespace {

std::string Child(const std::string &loc, const std::string &key) {
  std::string out = loc + "/";
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string Child(const std::string &loc, size_t i) { return loc + "/" + std::to_string(i); }

void ExpectObject(const Json &j, const std::string &loc) {
  if (!j.is_object()) throw ParseError(loc, "expected an object");
}

void ExpectArray(const Json &j, const std::string &loc) {
  if (!j.is_array()) throw ParseError(loc, "expected an array");
}

std::string ExpectString(const Json &j, const std::string &loc) {
  if (!j.is_string()) throw ParseError(loc, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> ParseNames(const Json &j, const std::string &loc) {
  ExpectArray(j, loc);
  std::vector<std::string> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(ExpectString(j[i], Child(loc, i)));
  return out;
}

History ParseHistory(const Json &j, const std::string &loc) {
  ExpectObject(j, loc);
  History h;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string here = Child(loc, it.key());
    if (it.key() == "count") {
      if (!it.value().is_number_unsigned()) throw ParseError(here, "count must be a nonnegative integer");
      h.count = it.value().get<int>();
    } else if (it.key() == "age") {
      if (!it.value().is_number() || !(it.value().get<double>() > 0.0)) {
        throw ParseError(here, "age must be a positive number");
      }
      h.age = it.value().get<double>();
    } else {
      throw ParseError(here, "unknown key");
    }
  }
  return h;
}

WeightClass ParseWeightField(const Json &j, const std::string &loc, WeightClass fallback) {
  if (!j.contains("weight")) return fallback;
  auto w = ParseWeight(ExpectString(j["weight"], Child(loc, "weight")));
  if (!w) throw ParseError(Child(loc, "weight"), "weight must be hard or soft");
  return *w;
}

int ParseTagField(const Json &j, const std::string &loc) {
  auto tag = ParseTagRef(ExpectString(j, loc));
  if (!tag) throw ParseError(loc, "expected a tag like \"#1\"");
  return *tag;
}

Cue ParseLexicalCue(const Json &j, const std::string &loc, WeightClass fallback) {
  Cue cue;
  if (j.is_string()) {
    cue.word = j.get<std::string>();
    cue.weight = fallback;
    if (auto tag = ParseTagRef(cue.word)) {
      cue.tag = *tag;
      cue.word.clear();
    }
    return cue;
  }
  ExpectObject(j, loc);
  cue.weight = ParseWeightField(j, loc, fallback);
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string here = Child(loc, it.key());
    if (it.key() == "tag") {
      cue.tag = ParseTagField(it.value(), here);
    } else if (it.key() == "cue") {
      cue.kind = Cue::Kind::kSurface;
      cue.word = ExpectString(it.value(), here);
    } else if (it.key() == "vec") {
      cue.kind = Cue::Kind::kVector;
      cue.word = ExpectString(it.value(), here);
    } else if (it.key() != "weight") {
      throw ParseError(here, "unknown key in lexical cue");
    }
  }
  if (cue.tag.has_value() == !cue.word.empty()) {
    throw ParseError(loc, "lexical cue needs exactly one of tag, cue, vec");
  }
  return cue;
}

Cue ParseSyntacticCue(const Json &j, const std::string &loc) {
  ExpectObject(j, loc);
  Cue cue;
  cue.kind = Cue::Kind::kFeature;
  cue.weight = ParseWeightField(j, loc, WeightClass::kHard);
  bool has_path = false, has_value = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string here = Child(loc, it.key());
    if (it.key() == "tag") {
      cue.tag = ParseTagField(it.value(), here);
    } else if (it.key() == "property") {
      cue.kind = Cue::Kind::kProperty;
      cue.property = ExpectString(it.value(), here);
    } else if (it.key() == "path") {
      try {
        cue.path = ParsePath(ExpectString(it.value(), here));
      } catch (const StructureError &e) {
        throw ParseError(here, e.what());
      }
      has_path = true;
    } else if (it.key() == "value") {
      cue.value = ParseAvm(it.value(), here).fs;
      has_value = true;
    } else if (it.key() != "weight") {
      throw ParseError(here, "unknown key in syntactic cue");
    }
  }
  int forms = (cue.tag ? 1 : 0) + (cue.kind == Cue::Kind::kProperty ? 1 : 0) + (has_path ? 1 : 0);
  if (forms != 1 || has_value != has_path) {
    throw ParseError(loc, "syntactic cue needs one of tag, property, or path with value");
  }
  return cue;
}

void ParseCueSet(const Json &j, const std::string &loc, std::vector<Cue> *out) {
  ExpectObject(j, loc);
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string here = Child(loc, it.key());
    ExpectArray(it.value(), here);
    if (it.key() == "lexical") {
      for (size_t i = 0; i < it.value().size(); ++i) {
        out->push_back(ParseLexicalCue(it.value()[i], Child(here, i), WeightClass::kHard));
      }
    } else if (it.key() == "syntactic") {
      for (size_t i = 0; i < it.value().size(); ++i) {
        out->push_back(ParseSyntacticCue(it.value()[i], Child(here, i)));
      }
    } else {
      throw ParseError(here, "cue sets hold 'lexical' and 'syntactic' lists");
    }
  }
}

std::vector<PropertyConstraint> ParseProperties(const Json &j, const std::string &loc) {
  ExpectObject(j, loc);
  std::vector<PropertyConstraint> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string here = Child(loc, it.key());
    auto kind = ParsePropertyKind(it.key());
    if (!kind) throw ParseError(here, "unknown property kind");
    ExpectArray(it.value(), here);
    for (size_t i = 0; i < it.value().size(); ++i) {
      const Json &entry = it.value()[i];
      std::string at = Child(here, i);
      const Json *args = &entry;
      WeightClass weight = WeightClass::kHard;
      if (entry.is_object()) {
        if (!entry.contains("args")) throw ParseError(at, "missing args");
        for (auto k = entry.begin(); k != entry.end(); ++k) {
          if (k.key() != "args" && k.key() != "weight") throw ParseError(Child(at, k.key()), "unknown key");
        }
        args = &entry["args"];
        weight = ParseWeightField(entry, at, WeightClass::kHard);
        at = Child(at, "args");
      }
      ExpectArray(*args, at);
      std::vector<int> tags;
      for (size_t k = 0; k < args->size(); ++k) tags.push_back(ParseTagField((*args)[k], Child(at, k)));
      bool chain = *kind == PropertyKind::kLinearity || *kind == PropertyKind::kAdjacency;
      if (chain && tags.size() > 2) {
        for (size_t k = 0; k + 1 < tags.size(); ++k) {
          out.push_back({*kind, {tags[k], tags[k + 1]}, weight});
        }
      } else {
        out.push_back({*kind, tags, weight});
      }
    }
  }
  return out;
}

struct Validator {
  std::vector<ValidationIssue> issues;

  void Add(const std::string &object, const std::string &rule) { issues.push_back({object, rule}); }

  // Resolves tag-based cues and checks property references.
  void ResolveCues(const std::string &owner, const FeatureStructure &fs,
                   const std::map<int, Path> &tags,
                   const std::vector<PropertyConstraint> &properties,
                   std::vector<Cue> *cues) {
    for (Cue &cue : *cues) {
      if (cue.kind == Cue::Kind::kProperty) {
        std::string kind_name = cue.property;
        std::optional<size_t> index;
        size_t colon = cue.property.find(':');
        if (colon != std::string::npos) {
          kind_name = cue.property.substr(0, colon);
          try {
            index = std::stoul(cue.property.substr(colon + 1));
          } catch (const std::exception &) {
            Add(owner, "bad property cue '" + cue.property + "'");
            continue;
          }
        }
        auto kind = ParsePropertyKind(kind_name);
        size_t count = 0;
        for (const auto &p : properties) count += kind && p.kind == *kind;
        if (!kind || count == 0 || (index && *index >= count)) {
          Add(owner, "cue refers to missing property '" + cue.property + "'");
        }
        continue;
      }
      if (!cue.tag) continue;
      auto it = tags.find(*cue.tag);
      if (it == tags.end()) {
        Add(owner, "cue refers to unknown tag #" + std::to_string(*cue.tag));
        continue;
      }
      auto node = ResolvePath(fs, it->second);
      if (cue.kind == Cue::Kind::kFeature) {
        cue.path = it->second;
        cue.value = *node;
        continue;
      }
      switch (node->kind()) {
        case ValueKind::kAtom:
          cue.kind = Cue::Kind::kSurface;
          cue.word = node->type();
          break;
        case ValueKind::kText:
          cue.kind = Cue::Kind::kSurface;
          cue.word = node->text();
          break;
        case ValueKind::kVector:
          cue.kind = Cue::Kind::kVector;
          cue.word = node->vector().key;
          break;
        default:
          Add(owner, "lexical cue #" + std::to_string(*cue.tag) + " is not a word or vector");
      }
    }
  }

  void CheckProperties(const std::string &owner, const std::map<int, Path> &tags,
                       const std::vector<PropertyConstraint> &properties) {
    for (const auto &p : properties) {
      if (p.participants.size() != 2) {
        Add(owner, std::string(PropertyKindName(p.kind)) + " needs exactly 2 participants");
      }
      for (int tag : p.participants) {
        if (!tags.count(tag)) {
          Add(owner, std::string(PropertyKindName(p.kind)) + " refers to unknown tag #" +
                         std::to_string(tag));
        }
      }
    }
  }
};

Json HistoryToJson(const History &h) { return Json{{"count", h.count}, {"age", h.age}}; }

Json CueToJson(const Cue &cue, bool lexical_section) {
  Json out = Json::object();
  if (cue.tag) {
    out["tag"] = "#" + std::to_string(*cue.tag);
  } else if (cue.kind == Cue::Kind::kSurface) {
    out["cue"] = cue.word;
  } else if (cue.kind == Cue::Kind::kVector) {
    out["vec"] = cue.word;
  } else if (cue.kind == Cue::Kind::kProperty) {
    out["property"] = cue.property;
  } else {
    out["path"] = PathToString(cue.path);
    out["value"] = AvmToJson(cue.value, {});
  }
  if (!(lexical_section && cue.weight == WeightClass::kDefault)) out["weight"] = WeightName(cue.weight);
  return out;
}

Json CueSetToJson(const std::vector<Cue> &cues) {
  Json lexical = Json::array();
  Json syntactic = Json::array();
  for (const Cue &cue : cues) {
    if (cue.implicit) continue;
    bool is_lexical = cue.lexical();
    if (is_lexical) {
      lexical.push_back(CueToJson(cue, true));
    } else {
      syntactic.push_back(CueToJson(cue, false));
    }
  }
  Json out = Json::object();
  if (!lexical.empty()) out["lexical"] = lexical;
  if (!syntactic.empty()) out["syntactic"] = syntactic;
  return out;
}

Json PropertiesToJson(const std::vector<PropertyConstraint> &properties) {
  Json out = Json::object();
  for (const auto &p : properties) {
    Json args = Json::array();
    for (int tag : p.participants) args.push_back("#" + std::to_string(tag));
    Json entry = args;
    if (p.weight != WeightClass::kHard) entry = Json{{"args", args}, {"weight", WeightName(p.weight)}};
    out[PropertyKindName(p.kind)].push_back(entry);
  }
  return out;
}

std::string CueKey(const std::string &owner, const Cue &cue) {
  switch (cue.kind) {
    case Cue::Kind::kSurface:
      return "s:" + FoldCase(cue.word);
    case Cue::Kind::kVector:
      return "v:" + FoldCase(cue.word);
    case Cue::Kind::kFeature:
      return "f:" + PathToString(cue.path) + "=" + AvmToJson(cue.value, {}).dump();
    case Cue::Kind::kProperty:
      return "p:" + owner + ":" + cue.property;
  }
  return "";
}

const VectorStore &EmptyStore() {
  static const VectorStore store;
  return store;
}

Construction ParseConstruction(const std::string &name, const Json &j, const std::string &loc) {
  ExpectObject(j, loc);
  Construction c;
  c.name = name;
  Json body = Json::object();
  const Json *cues = nullptr;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string &key = it.key();
    std::string here = Child(loc, key);
    if (key == "form") {
      ExpectObject(it.value(), here);
      Json form = it.value();
      if (form.contains("properties")) {
        c.properties = ParseProperties(form["properties"], Child(here, "properties"));
        form.erase("properties");
      }
      body["form"] = form;
    } else if (key == "meaning" || key == "arg-st") {
      body[key] = it.value();
    } else if (key == "cues") {
      cues = &it.value();
    } else if (key == "supertypes") {
      c.supertypes = ParseNames(it.value(), here);
    } else if (key == "participants") {
      c.participants = ParseNames(it.value(), here);
    } else if (key == "lexemes") {
      c.lexemes = ParseNames(it.value(), here);
    } else if (key == "opaque_meaning" || key == "covert_args") {
      if (!it.value().is_boolean()) throw ParseError(here, "expected true or false");
      (key == "opaque_meaning" ? c.opaque_meaning : c.covert_args) = it.value().get<bool>();
    } else if (key == "history") {
      c.history = ParseHistory(it.value(), here);
    } else {
      throw ParseError(here, "unknown construction key");
    }
  }
  ParsedAvm parsed = ParseAvm(body, loc);
  c.body = parsed.fs;
  c.tags = parsed.tags;
  for (const std::string &lexeme : c.lexemes) {
    Cue cue;
    cue.kind = Cue::Kind::kSurface;
    cue.word = FoldCase(lexeme);
    cue.implicit = true;
    c.cues.push_back(cue);
  }
  if (cues) ParseCueSet(*cues, Child(loc, "cues"), &c.cues);
  return c;
}

Frame ParseFrame(const std::string &name, const Json &j, const std::string &loc) {
  ExpectObject(j, loc);
  Frame f;
  f.name = name;
  Json structure = Json::object();
  structure["@type"] = name;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string &key = it.key();
    std::string here = Child(loc, key);
    if (key == "elements") {
      ExpectObject(it.value(), here);
      for (auto e = it.value().begin(); e != it.value().end(); ++e) {
        if (e.key().empty() || e.key()[0] == '@' || e.key()[0] == '#') {
          throw ParseError(Child(here, e.key()), "invalid role name");
        }
        f.elements.push_back(e.key());
        structure[e.key()] = e.value();
      }
    } else if (key == "lex_cues") {
      ExpectArray(it.value(), here);
      for (size_t i = 0; i < it.value().size(); ++i) {
        f.cues.push_back(ParseLexicalCue(it.value()[i], Child(here, i), WeightClass::kDefault));
      }
    } else if (key == "relations") {
      ExpectArray(it.value(), here);
      for (size_t i = 0; i < it.value().size(); ++i) {
        const Json &r = it.value()[i];
        std::string at = Child(here, i);
        ExpectObject(r, at);
        if (!r.contains("kind") || !r.contains("target") || r.size() != 2) {
          throw ParseError(at, "relation needs kind and target");
        }
        FrameRelation rel{ExpectString(r["kind"], Child(at, "kind")),
                          ExpectString(r["target"], Child(at, "target"))};
        if (rel.kind != "inheritance" && rel.kind != "precedence" && rel.kind != "perspective") {
          throw ParseError(Child(at, "kind"), "relation kind must be inheritance, precedence or perspective");
        }
        f.relations.push_back(rel);
      }
    } else if (key == "history") {
      f.history = ParseHistory(it.value(), here);
    } else {
      throw ParseError(here, "unknown frame key");
    }
  }
  ParsedAvm parsed = ParseAvm(structure, Child(loc, "elements"));
  f.structure = parsed.fs;
  f.tags = parsed.tags;
  for (Cue &cue : f.cues) {
    if (cue.tag) throw ParseError(Child(loc, "lex_cues"), "frame cues name words, not tags");
  }
  return f;
}

Event ParseEvent(const std::string &name, const Json &j, const std::string &loc) {
  ExpectObject(j, loc);
  Event e;
  e.name = name;
  bool has_target = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string &key = it.key();
    std::string here = Child(loc, key);
    if (key == "specialize") {
      e.specialize = ExpectString(it.value(), here);
      has_target = true;
    } else if (key == "refinement") {
      ParsedAvm parsed = ParseAvm(it.value(), here);
      e.refinement = parsed.fs;
      e.tags = parsed.tags;
    } else if (key == "trigger") {
      ParseCueSet(it.value(), here, &e.cues);
    } else if (key == "history") {
      e.history = ParseHistory(it.value(), here);
    } else {
      throw ParseError(here, "unknown event key");
    }
  }
  if (!has_target) throw ParseError(loc, "event needs 'specialize'");
  return e;
}

// Finds arg-st/val pairs and checks they unify position by position.
bool ArgStMatchesVal(const Construction &c, const TypeHierarchy &h) {
  auto arg_st = c.body.Get("arg-st");
  Path val_path{"form", "syn", "val"};
  auto val = ResolvePath(c.body, val_path);
  if (!arg_st || !val) return true;
  if (arg_st->kind() != ValueKind::kList || val->kind() != ValueKind::kList) return true;
  return LooseUnify(*arg_st, *val, h, EmptyStore(), -1.0).ok();
}

void AssignFans(Grammar *g) {
  std::map<std::string, int> counts;
  auto count_object = [&](const std::string &owner, std::vector<Cue> &cues) {
    std::set<std::string> keys;
    for (Cue &cue : cues) {
      cue.key = CueKey(owner, cue);
      keys.insert(cue.key);
    }
    for (const auto &k : keys) ++counts[k];
  };
  for (auto &c : g->constructions) count_object(c.name, c.cues);
  for (auto &f : g->frames) count_object(f.name, f.cues);
  for (auto &e : g->events) count_object(e.name, e.cues);
  auto assign = [&](std::vector<Cue> &cues) {
    for (Cue &cue : cues) cue.fan = counts[cue.key];
  };
  for (auto &c : g->constructions) assign(c.cues);
  for (auto &f : g->frames) assign(f.cues);
  for (auto &e : g->events) assign(e.cues);
}

}  // namespace

Grammar LoadGrammarJson(const Json &json) {
  ExpectObject(json, "");
  Grammar g;
  for (auto it = json.begin(); it != json.end(); ++it) {
    const std::string &key = it.key();
    std::string here = Child("", key);
    if (key == "hierarchy") {
      ExpectObject(it.value(), here);
      for (auto t = it.value().begin(); t != it.value().end(); ++t) {
        g.declared_types.emplace_back(t.key(), ParseNames(t.value(), Child(here, t.key())));
      }
    } else if (key == "constructions") {
      ExpectObject(it.value(), here);
      for (auto c = it.value().begin(); c != it.value().end(); ++c) {
        g.constructions.push_back(ParseConstruction(c.key(), c.value(), Child(here, c.key())));
      }
    } else if (key == "frames") {
      ExpectObject(it.value(), here);
      for (auto f = it.value().begin(); f != it.value().end(); ++f) {
        g.frames.push_back(ParseFrame(f.key(), f.value(), Child(here, f.key())));
      }
    } else if (key == "events") {
      ExpectObject(it.value(), here);
      for (auto e = it.value().begin(); e != it.value().end(); ++e) {
        g.events.push_back(ParseEvent(e.key(), e.value(), Child(here, e.key())));
      }
    } else {
      throw ParseError(here, "unknown top-level key");
    }
  }

  Validator v;
  std::set<std::string> names;
  auto claim = [&](const std::string &name) {
    if (!names.insert(name).second) v.Add(name, "name used by more than one grammar object");
  };
  for (const auto &c : g.constructions) claim(c.name);
  for (const auto &f : g.frames) claim(f.name);
  for (const auto &e : g.events) claim(e.name);

  // Objects join the type hierarchy with their declared supertypes.
  auto declarations = g.declared_types;
  for (const auto &[type, supers] : g.declared_types) {
    if (names.count(type)) v.Add(type, "declare supertypes on the object, not in the hierarchy");
  }
  for (const auto &c : g.constructions) declarations.emplace_back(c.name, c.supertypes);
  for (const auto &f : g.frames) {
    std::vector<std::string> supers;
    for (const auto &r : f.relations) {
      if (r.kind == "inheritance") supers.push_back(r.target);
    }
    declarations.emplace_back(f.name, supers);
  }
  try {
    g.hierarchy = TypeHierarchy(declarations);
  } catch (const ValidationError &e) {
    for (const auto &issue : e.issues()) v.issues.push_back(issue);
    throw ValidationError(v.issues);
  }

  for (auto &c : g.constructions) {
    for (const auto &p : c.participants) {
      if (!g.FindConstruction(p)) v.Add(c.name, "participant " + p + " is not a construction");
    }
    v.CheckProperties(c.name, c.tags, c.properties);
    v.ResolveCues(c.name, c.body, c.tags, c.properties, &c.cues);
    if (!c.covert_args && !ArgStMatchesVal(c, g.hierarchy)) {
      v.Add(c.name, "arg-st and form.syn.val do not unify element-wise");
    }
  }
  for (auto &f : g.frames) {
    for (const auto &r : f.relations) {
      if (!g.FindFrame(r.target)) v.Add(f.name, r.kind + " relation to unknown frame " + r.target);
    }
  }
  for (auto &e : g.events) {
    v.ResolveCues(e.name, e.refinement, e.tags, {}, &e.cues);
    bool hard = false;
    for (const auto &cue : e.cues) hard |= cue.weight == WeightClass::kHard;
    if (!hard) v.Add(e.name, "trigger needs at least one hard cue");
  }
  if (!v.issues.empty()) throw ValidationError(v.issues);

  for (auto &c : g.constructions) {
    try {
      c.expanded = ExpandInheritance(c, g).body;
    } catch (const InheritanceClash &clash) {
      v.Add(c.name, clash.what());
    }
  }
  for (auto &e : g.events) {
    FeatureStructure target;
    if (const Construction *c = g.FindConstruction(e.specialize)) {
      target = c->expanded;
    } else if (const Frame *f = g.FindFrame(e.specialize)) {
      target = f->structure;
    } else {
      v.Add(e.name, "specialize target " + e.specialize + " does not exist");
      continue;
    }
    auto r = LooseUnify(target, e.refinement, g.hierarchy, EmptyStore(), -1.0);
    if (!r) v.Add(e.name, "refinement contradicts " + e.specialize + ": " + r.failure().ToString());
  }
  if (!v.issues.empty()) throw ValidationError(v.issues);

  AssignFans(&g);
  return g;
}

Grammar LoadGrammar(std::istream &in) {
  Json json;
  try {
    json = Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  return LoadGrammarJson(json);
}

Grammar LoadGrammarFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grammar file " + path);
  try {
    return LoadGrammar(in);
  } catch (const ParseError &e) {
    throw ParseError(path + ": " + e.location(), e.reason());
  }
}

Json SerializeGrammar(const Grammar &g) {
  Json out = Json::object();
  Json hierarchy = Json::object();
  for (const auto &[type, supers] : g.declared_types) hierarchy[type] = supers;
  out["hierarchy"] = hierarchy;

  Json constructions = Json::object();
  for (const auto &c : g.constructions) {
    Json j = Json::object();
    if (!c.supertypes.empty()) j["supertypes"] = c.supertypes;
    if (!c.lexemes.empty()) j["lexemes"] = c.lexemes;
    if (!c.participants.empty()) j["participants"] = c.participants;
    if (c.opaque_meaning) j["opaque_meaning"] = true;
    if (c.covert_args) j["covert_args"] = true;
    if (c.history != History{}) j["history"] = HistoryToJson(c.history);
    Json body = AvmToJson(c.body, c.tags);
    if (body.is_object()) {
      for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    }
    if (!c.properties.empty()) j["form"]["properties"] = PropertiesToJson(c.properties);
    Json cues = CueSetToJson(c.cues);
    if (!cues.empty()) j["cues"] = cues;
    constructions[c.name] = j;
  }
  out["constructions"] = constructions;

  Json frames = Json::object();
  for (const auto &f : g.frames) {
    Json j = Json::object();
    Json structure = AvmToJson(f.structure, f.tags);
    Json elements = Json::object();
    // Declared order first; any other feature follows in structure order.
    if (structure.is_object()) {
      for (const std::string &e : f.elements) {
        if (structure.contains(e)) elements[e] = structure[e];
      }
      for (auto it = structure.begin(); it != structure.end(); ++it) {
        if (it.key() != "@type" && !elements.contains(it.key())) elements[it.key()] = it.value();
      }
    }
    j["elements"] = elements;
    if (!f.cues.empty()) {
      Json cues = Json::array();
      for (const Cue &cue : f.cues) cues.push_back(CueToJson(cue, true));
      j["lex_cues"] = cues;
    }
    if (!f.relations.empty()) {
      Json rels = Json::array();
      for (const auto &r : f.relations) rels.push_back(Json{{"kind", r.kind}, {"target", r.target}});
      j["relations"] = rels;
    }
    if (f.history != History{}) j["history"] = HistoryToJson(f.history);
    frames[f.name] = j;
  }
  out["frames"] = frames;

  Json events = Json::object();
  for (const auto &e : g.events) {
    Json j = Json::object();
    j["specialize"] = e.specialize;
    j["refinement"] = AvmToJson(e.refinement, e.tags);
    j["trigger"] = CueSetToJson(e.cues);
    if (e.history != History{}) j["history"] = HistoryToJson(e.history);
    events[e.name] = j;
  }
  out["events"] = events;
  return out;
}

namespace {

bool CuesEqual(const std::vector<Cue> &a, const std::vector<Cue> &b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const Cue &x = a[i];
    const Cue &y = b[i];
    if (x.kind != y.kind || x.weight != y.weight || x.word != y.word || x.tag != y.tag ||
        x.path != y.path || x.property != y.property || x.implicit != y.implicit ||
        x.key != y.key || x.fan != y.fan || !Isomorphic(x.value, y.value)) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool GrammarsEqual(const Grammar &a, const Grammar &b) {
  if (a.declared_types != b.declared_types) return false;
  if (a.constructions.size() != b.constructions.size() || a.frames.size() != b.frames.size() ||
      a.events.size() != b.events.size()) {
    return false;
  }
  for (size_t i = 0; i < a.constructions.size(); ++i) {
    const Construction &x = a.constructions[i];
    const Construction &y = b.constructions[i];
    if (x.name != y.name || x.tags != y.tags || x.properties != y.properties ||
        x.supertypes != y.supertypes || x.participants != y.participants ||
        x.lexemes != y.lexemes || x.opaque_meaning != y.opaque_meaning ||
        x.covert_args != y.covert_args || x.history != y.history ||
        !Isomorphic(x.body, y.body) || !CuesEqual(x.cues, y.cues)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.frames.size(); ++i) {
    const Frame &x = a.frames[i];
    const Frame &y = b.frames[i];
    if (x.name != y.name || x.tags != y.tags || x.elements != y.elements ||
        x.relations != y.relations || x.history != y.history ||
        !Isomorphic(x.structure, y.structure) || !CuesEqual(x.cues, y.cues)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.events.size(); ++i) {
    const Event &x = a.events[i];
    const Event &y = b.events[i];
    if (x.name != y.name || x.specialize != y.specialize || x.tags != y.tags ||
        x.history != y.history || !Isomorphic(x.refinement, y.refinement) ||
        !CuesEqual(x.cues, y.cues)) {
      return false;
    }
  }
  return true;
}

namespace {

void CollectVectorWords(const FeatureStructure &fs, std::set<std::string> *words) {
  for (const auto &node : fs.graph()) {
    if (node.kind != internal::Node::Kind::kVector) continue;
    if (node.vector.is_prototype()) {
      for (const auto &f : node.vector.fillers) words->insert(f.form);
    } else {
      words->insert(node.vector.key);
    }
  }
}

}  // namespace

void ValidateVocabulary(const Grammar &g, const VectorStore &vs) {
  std::vector<ValidationIssue> issues;
  auto check = [&](const std::string &owner, const std::string &word) {
    if (!vs.Contains(word)) issues.push_back({owner, "'" + word + "' is not in the vector store"});
  };
  auto check_fs = [&](const std::string &owner, const FeatureStructure &fs) {
    std::set<std::string> words;
    CollectVectorWords(fs, &words);
    for (const auto &w : words) check(owner, w);
  };
  for (const auto &c : g.constructions) check_fs(c.name, c.body);
  for (const auto &f : g.frames) {
    for (const auto &cue : f.cues) check(f.name, cue.word);
    check_fs(f.name, f.structure);
  }
  for (const auto &e : g.events) {
    for (const auto &cue : e.cues) {
      if (cue.kind == Cue::Kind::kVector) check(e.name, cue.word);
    }
    check_fs(e.name, e.refinement);
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Construction ExpandInheritance(const Construction &c, const Grammar &g) {
  std::vector<const Construction *> chain;
  for (const std::string &a : g.hierarchy.Ancestors(c.name)) {
    if (const Construction *anc = g.FindConstruction(a)) chain.push_back(anc);
  }
  chain.push_back(&c);

  FeatureStructure acc;
  std::vector<const Construction *> folded;
  for (const Construction *next : chain) {
    UnifyResult r = Unify(acc, next->body, g.hierarchy);
    if (!r) {
      const UnifyFailure &f = r.failure();
      std::string first = folded.empty() ? c.name : folded.front()->name;
      for (const Construction *prior : folded) {
        auto at = ResolvePath(prior->body, f.path);
        if (at && !at->is_unspecified()) {
          first = prior->name;
          break;
        }
      }
      throw InheritanceClash(first, next->name, PathToString(f.path), f.ToString());
    }
    acc = r.value();
    folded.push_back(next);
  }
  Construction out = c;
  out.body = acc;
  out.expanded = acc;
  return out;
}

UnifyResult ApplyEvent(const Event &e, const FeatureStructure &target_instance,
                       const TypeHierarchy &h, const VectorStore &vs,
                       double sim_threshold) {
  UnifyResult r = LooseUnify(target_instance, e.refinement, h, vs, sim_threshold);
  if (!r) return r;
  FeatureStructure result = r.value();

  std::vector<Path> slots;
  auto args = e.refinement.Get("arg-st");
  if (args && args->kind() == ValueKind::kList) {
    for (size_t i = 0; i < args->list_size(); ++i) {
      if (!args->Item(i).is_unspecified()) slots.push_back(Path{"arg-st", PathStep(static_cast<int>(i))});
    }
  } else {
    for (const std::string &name : e.refinement.feature_names()) slots.push_back(Path{name});
  }
  for (const Path &slot : slots) {
    auto after = ResolvePath(result, slot);
    if (!after || !after->is_typed() || after->Get(kStatus)) continue;
    auto before = ResolvePath(target_instance, slot);
    if (before && Isomorphic(*before, *after)) continue;
    Path status = slot;
    status.emplace_back(kStatus);
    UnifyResult marked = UnifyAt(result, status, FeatureStructure::Atom(kExpected), h);
    if (marked) result = marked.value();
  }
  return result;
}

}  // namespace dcxg

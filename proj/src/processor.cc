#include "dcxg/processor.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "dcxg/errors.h"

namespace dcxg {

namespace {

const Path kSurfaceForm{"form", "surface_form"};
const Path kCat{"form", "syn", "cat"};
const Path kSelect{"form", "syn", "cat", "select"};
const Path kSpr{"form", "syn", "spr"};
const Path kOwnFrames{"meaning", "sem", "frames"};
constexpr const char *kCxMeaning = "cx-meaning";

bool IsWordChar(unsigned char ch) {
  return std::isalnum(ch) || ch == '\'' || ch == '-' || ch >= 0x80;
}

std::string SpanText(const TokenSpan &s) {
  return std::to_string(s.start) + "-" + std::to_string(s.end);
}

// Root-level feature rename; the rest of the graph is shared structure.
FeatureStructure RenameFeature(const FeatureStructure &fs, const std::string &from,
                               const std::string &to) {
  if (!fs.Get(from)) return fs;
  internal::Graph g = fs.graph();
  auto &features = g[fs.root()].features;
  for (auto &f : features) {
    if (f.first == from) f.first = to;
  }
  std::vector<int> roots;
  int root = fs.root();
  auto compact = CompactGraph(g, std::span<const int>(&root, 1), &roots);
  return FeatureStructure(compact, roots[0]);
}

// Joins nodes from several graphs under {"frames": [...]}. Nodes taken
// from one graph keep their sharing.
FeatureStructure FramesStructure(const std::vector<FeatureStructure> &frames) {
  internal::Graph g;
  std::vector<std::pair<const internal::Graph *, int>> offsets;
  std::vector<int> items;
  for (const FeatureStructure &f : frames) {
    const internal::Graph *src = &f.graph();
    int offset = -1;
    for (const auto &[graph, off] : offsets) {
      if (graph == src) offset = off;
    }
    if (offset < 0) {
      offset = static_cast<int>(g.size());
      offsets.emplace_back(src, offset);
      for (internal::Node n : *src) {
        for (auto &feat : n.features) feat.second += offset;
        for (int &item : n.items) item += offset;
        g.push_back(std::move(n));
      }
    }
    items.push_back(f.root() + offset);
  }
  internal::Node list;
  list.kind = internal::Node::Kind::kList;
  list.items = items;
  g.push_back(list);
  internal::Node root;
  root.features.emplace_back("frames", static_cast<int>(g.size()) - 1);
  g.push_back(root);
  int r = static_cast<int>(g.size()) - 1;
  std::vector<int> roots;
  auto compact = CompactGraph(g, std::span<const int>(&r, 1), &roots);
  return FeatureStructure(compact, roots[0]);
}

FeatureStructure ClosedWordList(const std::string &word) {
  FsBuilder b;
  int list = b.AddList(false);
  b.AppendItem(list, b.AddTyped(word));
  return b.Build(list);
}

// Path to the argument slots: arg-st when present, else form.syn.val.
std::optional<Path> SlotListPath(const FeatureStructure &fs) {
  auto a = fs.Get("arg-st");
  if (a && a->kind() == ValueKind::kList) return Path{"arg-st"};
  Path val{"form", "syn", "val"};
  auto v = ResolvePath(fs, val);
  if (v && v->kind() == ValueKind::kList) return val;
  return std::nullopt;
}

bool HasStatus(const FeatureStructure &slot, const char *status) {
  auto s = slot.Get(kStatus);
  return s && s->is_typed() && s->type() == status;
}

// Items of every list reached through a "frames" feature, in depth-first
// order with features by name.
void CollectFrames(const FeatureStructure &fs, std::vector<FeatureStructure> *out,
                   std::set<std::pair<const internal::Graph *, int>> *seen) {
  std::set<int> visited;
  const internal::Graph &g = fs.graph();
  auto push_frame = [&](int node) {
    if (seen->insert({&g, node}).second) out->push_back(fs.AtNode(node));
  };
  std::function<void(int)> walk = [&](int node) {
    if (!visited.insert(node).second) return;
    const internal::Node &n = g[node];
    for (const auto &[name, child] : n.features) {
      if (name == "frames" && g[child].kind == internal::Node::Kind::kList) {
        for (int item : g[child].items) push_frame(item);
      }
      walk(child);
    }
    for (int item : n.items) walk(item);
  };
  // The structure's own frames come first.
  if (auto own = ResolvePath(fs, kOwnFrames); own && own->kind() == ValueKind::kList) {
    for (size_t i = 0; i < own->list_size(); ++i) {
      FeatureStructure item = own->Item(i);
      if (seen->insert({&item.graph(), item.root()}).second) out->push_back(item);
    }
  }
  walk(fs.root());
}

void CollectTypes(const FeatureStructure &fs, std::set<std::string> *out) {
  for (const internal::Node &n : fs.graph()) {
    if (n.kind == internal::Node::Kind::kTyped && n.label != kTopType) out->insert(n.label);
  }
}

bool HasStoredFrames(const Construction &c) {
  auto f = ResolvePath(c.expanded, kOwnFrames);
  return f && f->kind() == ValueKind::kList && f->list_size() > 0;
}

std::optional<std::vector<std::string>> SurfaceItems(const Construction &c) {
  auto s = ResolvePath(c.expanded, kSurfaceForm);
  if (!s || s->kind() != ValueKind::kList || s->list_size() == 0) return std::nullopt;
  std::vector<std::string> words;
  for (size_t i = 0; i < s->list_size(); ++i) {
    FeatureStructure item = s->Item(i);
    if (item.kind() == ValueKind::kAtom) {
      words.push_back(FoldCase(item.type()));
    } else if (item.kind() == ValueKind::kText) {
      words.push_back(FoldCase(item.text()));
    } else {
      return std::nullopt;
    }
  }
  return words;
}

// Index of the surface item a tag path names, if any.
std::optional<int> SurfaceIndex(const Path &p) {
  if (p.size() == 3 && p[0] == PathStep("form") && p[1] == PathStep("surface_form") &&
      p[2].is_index()) {
    return p[2].index;
  }
  return std::nullopt;
}

// Argument position a tag path points into, if any.
std::optional<int> SlotIndex(const Path &p) {
  if (p.size() >= 2 && p[0] == PathStep("arg-st") && p[1].is_index()) return p[1].index;
  if (p.size() >= 4 && p[0] == PathStep("form") && p[1] == PathStep("syn") &&
      p[2] == PathStep("val") && p[3].is_index()) {
    return p[3].index;
  }
  return std::nullopt;
}

Json FailureJson(const UnifyFailure &f) {
  Json j = Json::object();
  j["failure"] = KindName(f.kind);
  j["path"] = PathToString(f.path);
  j["left"] = f.left;
  j["right"] = f.right;
  j["score"] = f.score ? Json(*f.score) : Json(nullptr);
  return j;
}

std::string FormatNumber(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view sentence) {
  std::vector<Token> out;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    out.push_back({FoldCase(word), static_cast<int>(out.size()), 1.0});
    word.clear();
  };
  for (char ch : sentence) {
    auto u = static_cast<unsigned char>(ch);
    if (std::isspace(u)) {
      flush();
    } else if (IsWordChar(u)) {
      word.push_back(ch);
    } else {
      flush();
      word.push_back(ch);
      flush();
    }
  }
  flush();
  return out;
}

const char *RouteName(Route r) { return r == Route::kDirect ? "direct" : "compositional"; }

std::string TraceRecord::ToLine() const {
  return kind + " " + std::to_string(token) + " " + payload.dump();
}

std::string Constituent::Label() const { return cx + "[" + SpanText(span) + "]"; }

std::vector<std::string> Interpretation::Activated() const {
  std::vector<std::string> out = activated_constructions;
  out.insert(out.end(), activated_frames.begin(), activated_frames.end());
  out.insert(out.end(), activated_events.begin(), activated_events.end());
  return out;
}

struct Processor::Anchor {
  SpanAssignment spans;
  bool surface = false;
  std::vector<int> surface_tokens;  // per surface item; -1 when unmatched
  int head = -1;                    // head constituent for head-anchored anchors
  std::optional<FeatureStructure> merged;
  std::string key;
};

Processor::Processor(const Grammar &grammar, const VectorStore &vectors, ActivationParams params)
    : grammar_(grammar), vectors_(vectors), params_(params) {
  params_.Validate();
  for (const Construction &c : grammar_.constructions) {
    prototypes_.push_back(RolePrototypes(c.expanded, vectors_));
  }
}

int Processor::RecordIndex(std::string_view name) const {
  int i = 0;
  for (const auto &c : grammar_.constructions) {
    if (c.name == name) return i;
    ++i;
  }
  for (const auto &f : grammar_.frames) {
    if (f.name == name) return i;
    ++i;
  }
  for (const auto &e : grammar_.events) {
    if (e.name == name) return i;
    ++i;
  }
  return -1;
}

ParseState Processor::Start() const {
  ParseState s;
  auto add = [&](const std::string &name, const std::vector<Cue> &cues, const History &h,
                 ObjectKind kind) {
    ActivationRecord r;
    r.object = name;
    r.base = BaseActivation(h.count, h.age, params_);
    for (const Cue &cue : cues) {
      CueMatch m;
      m.cue = cue.Label();
      m.kind = cue.lexical() ? CueMatch::Kind::kLexical : CueMatch::Kind::kSyntactic;
      m.weight_class = cue.weight;
      m.fan = cue.fan;
      r.cue_matches.push_back(m);
    }
    r.total = r.base;
    s.records.push_back(std::move(r));
    s.record_kinds.push_back(kind);
  };
  for (const auto &c : grammar_.constructions) add(c.name, c.cues, c.history, ObjectKind::kConstruction);
  for (const auto &f : grammar_.frames) add(f.name, f.cues, f.history, ObjectKind::kFrame);
  for (const auto &e : grammar_.events) add(e.name, e.cues, e.history, ObjectKind::kEvent);
  s.active.assign(s.records.size(), 0);
  s.reported.assign(s.records.size(), std::nan(""));
  return s;
}

void Processor::Emit(ParseState &state, const std::string &kind, Json payload) const {
  int token = state.tokens.empty() ? -1 : static_cast<int>(state.tokens.size()) - 1;
  state.trace.push_back({kind, token, std::move(payload)});
}

std::optional<Processor::Anchor> Processor::FindAnchor(const ParseState &state,
                                                       const Construction &c) const {
  Anchor a;
  a.spans.sentence_length = static_cast<int>(state.tokens.size());
  if (auto words = SurfaceItems(c)) {
    a.surface = true;
    std::vector<char> used(state.tokens.size(), 0);
    int first = -1;
    for (const std::string &w : *words) {
      int found = -1;
      for (size_t t = 0; t < state.tokens.size(); ++t) {
        if (!used[t] && state.tokens[t].surface == w) {
          found = static_cast<int>(t);
          used[t] = 1;
          break;
        }
      }
      a.surface_tokens.push_back(found);
      if (found >= 0 && first < 0) first = found;
    }
    if (first < 0) return std::nullopt;
    for (const auto &[tag, path] : c.tags) {
      auto idx = SurfaceIndex(path);
      if (!idx) continue;
      int tok = a.surface_tokens[*idx];
      a.spans.spans[tag] = tok >= 0 ? std::optional<TokenSpan>(TokenSpan{tok, tok}) : std::nullopt;
    }
    a.key = c.name + "@" + std::to_string(first);
    return a;
  }

  FeatureStructure pattern = RenameFeature(c.expanded, "meaning", kCxMeaning);
  const Constituent *head = nullptr;
  for (const Constituent &k : state.constituents) {
    if (k.parent != -1 || !k.lexical || !k.primary) continue;
    if (head && head->span.end >= k.span.end) continue;
    auto r = LooseUnify(k.fs, pattern, grammar_.hierarchy, vectors_, params_.sim_threshold);
    if (!r) continue;
    head = &k;
    a.merged = r.value();
  }
  if (!head) return std::nullopt;
  a.head = head->id;
  for (const auto &[tag, path] : c.tags) {
    if (auto slot = SlotIndex(path)) {
      auto f = head->fillers.find(*slot);
      if (f == head->fillers.end()) {
        a.spans.spans[tag] = std::nullopt;
      } else {
        a.spans.spans[tag] = state.constituents[f->second].span;
      }
    } else {
      a.spans.spans[tag] = TokenSpan{head->head_token, head->head_token};
    }
  }
  a.key = c.name + "@" + std::to_string(head->id);
  return a;
}

void Processor::UpdateCues(ParseState &state) const {
  VectorGate gate{&vectors_, params_.sim_threshold};
  std::set<std::string> present;
  for (const Constituent &k : state.constituents) CollectTypes(k.fs, &present);
  for (const FrameInstance &f : state.frame_instances) CollectTypes(f.fs, &present);

  auto lexical_f = [&](const Cue &cue) {
    double best = 0.0;
    for (const Token &t : state.tokens) {
      double f = LexicalF(t.surface, cue, vectors_) * t.surprisal_multiplier;
      best = std::max(best, std::clamp(f, 0.0, 1.0));
    }
    return best;
  };
  auto feature_holds = [&](const Cue &cue) {
    for (const Constituent &k : state.constituents) {
      auto node = ResolvePath(k.fs, cue.path);
      if (node && Subsumes(cue.value, *node, grammar_.hierarchy, &gate)) return true;
    }
    return false;
  };

  auto update = [&](int index, const std::vector<Cue> &cues, const Construction *cx) {
    ActivationRecord &r = state.records[index];
    std::optional<Anchor> anchor;
    std::optional<PropertyEvaluation> eval;
    if (cx && !cx->lexical()) {
      anchor = FindAnchor(state, *cx);
      if (anchor) {
        try {
          eval = Evaluate(cx->properties, anchor->spans);
        } catch (const ValidationError &) {
          // Overlapping participants: nothing can be judged.
        }
      }
    }
    for (size_t i = 0; i < cues.size(); ++i) {
      const Cue &cue = cues[i];
      CueMatch &m = r.cue_matches[i];
      double f = 0.0;
      bool ok = false;
      if (cue.lexical()) {
        std::optional<int> surface_item;
        if (cue.tag && anchor && anchor->surface) {
          surface_item = SurfaceIndex(cx->tags.at(*cue.tag));
        }
        if (surface_item) {
          ok = anchor->surface_tokens[*surface_item] >= 0;
          f = ok ? 1.0 : 0.0;
        } else {
          f = lexical_f(cue);
          ok = cue.kind == Cue::Kind::kSurface ? f >= 1.0 : f > 0.0 && f >= params_.sim_threshold;
        }
      } else if (cue.kind == Cue::Kind::kFeature) {
        ok = feature_holds(cue);
        f = ok ? 1.0 : 0.0;
      } else if (cue.kind == Cue::Kind::kProperty && eval) {
        std::string kind_name = cue.property;
        std::optional<size_t> which;
        if (size_t colon = cue.property.find(':'); colon != std::string::npos) {
          kind_name = cue.property.substr(0, colon);
          which = std::stoul(cue.property.substr(colon + 1));
        }
        auto kind = ParsePropertyKind(kind_name);
        size_t n = 0;
        bool all = true;
        for (size_t p = 0; p < cx->properties.size(); ++p) {
          if (cx->properties[p].kind != *kind) continue;
          if (!which || *which == n) all &= eval->verdicts[p] == Verdict::kSatisfied;
          ++n;
        }
        ok = all && n > 0;
        f = ok ? 1.0 : 0.0;
      }
      bool was = m.satisfied;
      m.F = std::max(m.F, f);
      m.satisfied = was || ok;
      if (m.satisfied && !was) {
        Json p = Json::object();
        p["object"] = r.object;
        p["cue"] = m.cue;
        p["F"] = m.F;
        p["fan"] = m.fan;
        p["weight"] = WeightName(m.weight_class);
        Emit(state, "CUE", std::move(p));
      }
    }
    r.total = TotalActivation(r, params_);
    r.sigma = Salience(r, params_);
  };

  int index = 0;
  for (const Construction &c : grammar_.constructions) update(index++, c.cues, &c);
  for (size_t fi = 0; fi < grammar_.frames.size(); ++fi) {
    const Frame &f = grammar_.frames[fi];
    int i = index++;
    update(i, f.cues, nullptr);
    bool cued = false;
    for (const CueMatch &m : state.records[i].cue_matches) cued |= m.satisfied;
    bool has_instance = false;
    for (const FrameInstance &fi2 : state.frame_instances) has_instance |= fi2.frame == f.name;
    if (cued && !has_instance) state.frame_instances.push_back({f.name, f.structure, {}});
  }
  for (const Event &e : grammar_.events) update(index++, e.cues, nullptr);

  // Activation status.
  for (size_t i = 0; i < state.records.size(); ++i) {
    const ActivationRecord &r = state.records[i];
    bool any = false;
    for (const CueMatch &m : r.cue_matches) any |= m.satisfied;
    bool active = false;
    switch (state.record_kinds[i]) {
      case ObjectKind::kConstruction: {
        const Construction &c = grammar_.constructions[i];
        bool instantiated = false;
        for (const Constituent &k : state.constituents) instantiated |= k.cx == c.name;
        active = instantiated || (!c.lexical() && any);
        break;
      }
      case ObjectKind::kFrame:
        active = any || present.count(r.object) > 0;
        break;
      case ObjectKind::kEvent:
        active = std::find(state.fired_events.begin(), state.fired_events.end(), r.object) !=
                 state.fired_events.end();
        break;
    }
    if (!active) continue;
    bool first = !state.active[i];
    state.active[i] = 1;
    if (first || state.reported[i] != r.total) {
      state.reported[i] = r.total;
      Json p = Json::object();
      p["object"] = r.object;
      p["kind"] = ObjectKindName(state.record_kinds[i]);
      p["A"] = r.total;
      p["B"] = r.base;
      p["sigma"] = r.sigma;
      Emit(state, "ACTIVATE", std::move(p));
    }
  }
}

bool Processor::Recompute(ParseState &state, Constituent &c) const {
  FeatureStructure fs = c.base;
  std::vector<std::string> kept;
  bool last_ok = true;
  for (size_t i = 0; i < c.events.size(); ++i) {
    const Event *e = grammar_.FindEvent(c.events[i]);
    auto r = ApplyEvent(*e, fs, grammar_.hierarchy, vectors_, params_.sim_threshold);
    if (r) {
      fs = r.value();
      kept.push_back(c.events[i]);
      continue;
    }
    if (i + 1 == c.events.size()) {
      last_ok = false;
      continue;
    }
    Json p = FailureJson(r.failure());
    p["constituent"] = c.Label();
    p["event"] = c.events[i];
    p["status"] = "mismatch";
    Emit(state, "EXPECT", std::move(p));
  }
  c.events = kept;
  c.fs = fs;
  return last_ok;
}

void Processor::FireEvents(ParseState &state) const {
  int base_index = static_cast<int>(grammar_.constructions.size() + grammar_.frames.size());
  for (size_t ei = 0; ei < grammar_.events.size(); ++ei) {
    const Event &e = grammar_.events[ei];
    const ActivationRecord &r = state.records[base_index + ei];
    bool triggered = true;
    for (const CueMatch &m : r.cue_matches) {
      if (m.weight_class == WeightClass::kHard && !m.satisfied) triggered = false;
    }
    if (!triggered) continue;

    auto fired = [&](const std::string &target, const FeatureStructure &fs) {
      if (std::find(state.fired_events.begin(), state.fired_events.end(), e.name) ==
          state.fired_events.end()) {
        state.fired_events.push_back(e.name);
      }
      Json expected = Json::array();
      if (auto slots = SlotListPath(fs)) {
        auto list = ResolvePath(fs, *slots);
        for (size_t i = 0; i < list->list_size(); ++i) {
          if (HasStatus(list->Item(i), kExpected)) {
            Path p = *slots;
            p.push_back(PathStep(static_cast<int>(i)));
            expected.push_back(PathToString(p));
          }
        }
      }
      Json p = Json::object();
      p["event"] = e.name;
      p["target"] = target;
      p["expected"] = expected;
      Emit(state, "FIRE-EVENT", std::move(p));
    };
    auto clash = [&](const std::string &target, const UnifyFailure &f) {
      Json p = FailureJson(f);
      p["event"] = e.name;
      p["target"] = target;
      Emit(state, "CLASH", std::move(p));
    };

    if (const Construction *t = grammar_.FindConstruction(e.specialize)) {
      FeatureStructure pattern = RenameFeature(t->expanded, "meaning", kCxMeaning);
      for (size_t k = 0; k < state.constituents.size(); ++k) {
        Constituent &c = state.constituents[k];
        if (!c.primary || state.applied.count({e.name, c.id})) continue;
        bool match = c.cx == t->name || grammar_.hierarchy.IsSubtype(c.cx, t->name);
        if (!match && !t->lexical() && c.lexical && c.parent == -1) {
          match = LooseUnify(c.fs, pattern, grammar_.hierarchy, vectors_, params_.sim_threshold).ok();
        }
        if (!match) continue;
        state.applied.insert({e.name, c.id});
        c.events.push_back(e.name);
        if (Recompute(state, c)) {
          fired(c.Label(), c.fs);
        } else {
          c.events.pop_back();
          auto r2 = ApplyEvent(e, c.fs, grammar_.hierarchy, vectors_, params_.sim_threshold);
          clash(c.Label(), r2.failure());
        }
      }
    } else {
      for (size_t k = 0; k < state.frame_instances.size(); ++k) {
        FrameInstance &f = state.frame_instances[k];
        int key = -1 - static_cast<int>(k);
        if (state.applied.count({e.name, key})) continue;
        if (f.frame != e.specialize && !grammar_.hierarchy.IsSubtype(f.frame, e.specialize)) continue;
        state.applied.insert({e.name, key});
        auto r2 = ApplyEvent(e, f.fs, grammar_.hierarchy, vectors_, params_.sim_threshold);
        if (r2) {
          f.fs = r2.value();
          f.events.push_back(e.name);
          fired(f.frame, f.fs);
        } else {
          clash(f.frame, r2.failure());
        }
      }
    }
  }
}

void Processor::Scan(ParseState &state, const Token &token) const {
  Token t = token;
  t.surface = FoldCase(t.surface);
  t.index = static_cast<int>(state.tokens.size());
  state.tokens.push_back(t);

  int absorbed_by = -1;
  for (Constituent &r : state.constituents) {
    if (!r.absorbing || r.parent != -1) continue;
    if (r.surface[r.surface_next] == t.surface) {
      ++r.surface_next;
      r.span.end = t.index;
      r.absorbing = r.surface_next < r.surface.size();
      absorbed_by = r.id;
    } else {
      r.absorbing = false;
    }
  }

  Json lexical = Json::array();
  for (const Construction &c : grammar_.constructions) {
    if (std::find_if(c.lexemes.begin(), c.lexemes.end(), [&](const std::string &l) {
          return FoldCase(l) == t.surface;
        }) == c.lexemes.end()) {
      continue;
    }
    Constituent k;
    k.id = static_cast<int>(state.constituents.size());
    k.cx = c.name;
    k.span = {t.index, t.index};
    k.head_token = t.index;
    k.lexical = true;
    k.primary = lexical.empty();
    k.base = c.expanded;
    auto with_form = UnifyAt(c.expanded, kSurfaceForm, ClosedWordList(t.surface), grammar_.hierarchy);
    if (with_form) k.base = with_form.value();
    k.fs = k.base;
    if (absorbed_by >= 0) {
      k.parent = absorbed_by;
      state.constituents[absorbed_by].daughters.push_back(k.id);
    }
    state.constituents.push_back(std::move(k));
    lexical.push_back(c.name);
  }

  Json p = Json::object();
  p["token"] = t.surface;
  p["lexical"] = lexical;
  p["absorbed_by"] =
      absorbed_by >= 0 ? Json(state.constituents[absorbed_by].Label()) : Json(nullptr);
  p["residue"] = lexical.empty() && absorbed_by < 0;
  Emit(state, "SCAN", std::move(p));

  UpdateCues(state);
  FireEvents(state);
}

std::vector<Recognition> Processor::TryDirectRoute(ParseState &state) const {
  struct Candidate {
    size_t cx;
    Anchor anchor;
    double A;
    int satisfied;
    TokenSpan span;
  };
  std::vector<Candidate> candidates;
  for (size_t i = 0; i < grammar_.constructions.size(); ++i) {
    const Construction &c = grammar_.constructions[i];
    if (c.lexical() || !HasStoredFrames(c)) continue;
    const ActivationRecord &r = state.records[i];
    bool hard_any = false;
    bool hard_all = true;
    int satisfied = 0;
    for (const CueMatch &m : r.cue_matches) {
      satisfied += m.satisfied;
      if (m.weight_class != WeightClass::kHard) continue;
      hard_any = true;
      hard_all &= m.satisfied;
    }
    if (!hard_any || !hard_all || r.total < params_.recognition_threshold) continue;
    auto anchor = FindAnchor(state, c);
    if (!anchor || state.recognized_anchors.count(anchor->key)) continue;
    TokenSpan span;
    if (anchor->surface) {
      span = {static_cast<int>(state.tokens.size()), -1};
      for (int tok : anchor->surface_tokens) {
        if (tok < 0) continue;
        span.start = std::min(span.start, tok);
        span.end = std::max(span.end, tok);
      }
    } else {
      span = state.constituents[anchor->head].span;
    }
    candidates.push_back({i, std::move(*anchor), r.total, satisfied, span});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate &a, const Candidate &b) {
    if (a.A != b.A) return a.A > b.A;
    if (a.satisfied != b.satisfied) return a.satisfied > b.satisfied;
    return a.cx < b.cx;
  });

  std::vector<Recognition> out;
  std::vector<TokenSpan> taken;
  for (Candidate &cand : candidates) {
    bool overlaps = false;
    for (const TokenSpan &s : taken) overlaps |= cand.span.start <= s.end && s.start <= cand.span.end;
    if (overlaps) continue;
    const Construction &c = grammar_.constructions[cand.cx];
    Constituent r;
    r.id = static_cast<int>(state.constituents.size());
    r.cx = c.name;
    r.span = cand.span;
    r.route = Route::kDirect;
    r.opaque = c.opaque_meaning;
    if (cand.anchor.surface) {
      r.base = c.expanded;
      r.surface = *SurfaceItems(c);
      while (r.surface_next < r.surface.size() && cand.anchor.surface_tokens[r.surface_next] >= 0) {
        ++r.surface_next;
      }
      r.absorbing = r.surface_next < r.surface.size();
      r.head_token = cand.span.end;
      for (Constituent &k : state.constituents) {
        if (k.parent != -1 || k.span.start < r.span.start || k.span.end > r.span.end) continue;
        k.parent = r.id;
        r.daughters.push_back(k.id);
      }
    } else {
      Constituent &h = state.constituents[cand.anchor.head];
      r.base = *cand.anchor.merged;
      r.head_token = h.head_token;
      r.fillers = h.fillers;
      r.daughters.push_back(h.id);
      h.parent = r.id;
    }
    r.fs = r.base;
    state.recognized_anchors.insert(cand.anchor.key);
    taken.push_back(r.span);

    Json hard = Json::array();
    const ActivationRecord &rec = state.records[cand.cx];
    for (const CueMatch &m : rec.cue_matches) {
      Json cj = Json::object();
      cj["cue"] = m.cue;
      cj["weight"] = WeightName(m.weight_class);
      cj["satisfied"] = m.satisfied;
      cj["F"] = m.F;
      cj["fan"] = m.fan;
      hard.push_back(cj);
    }
    Json p = Json::object();
    p["construction"] = c.name;
    p["instance"] = r.Label();
    p["A"] = cand.A;
    p["B"] = rec.base;
    p["threshold"] = params_.recognition_threshold;
    p["cues"] = hard;
    p["opaque"] = r.opaque;
    Emit(state, "DIRECT", std::move(p));
    out.push_back({c.name, r.id, static_cast<int>(state.tokens.size()) - 1, cand.A});
    state.constituents.push_back(std::move(r));
  }
  return out;
}

bool Processor::TryAttach(ParseState &state, int head, int dependent, int slot) const {
  VectorGate gate{&vectors_, params_.sim_threshold};
  Constituent &h = state.constituents[head];
  Constituent &d = state.constituents[dependent];
  Path path = *SlotListPath(h.base);
  path.push_back(PathStep(slot));
  FeatureStructure guest = d.fs;
  if (auto g = UnifyAt(d.fs, Path{kStatus}, FeatureStructure::Atom(kObserved), grammar_.hierarchy)) {
    guest = g.value();
  }
  auto before = ResolvePath(h.fs, path);
  bool was_expected = before && HasStatus(*before, kExpected);
  auto r = UnifyAt(h.base, path, guest, grammar_.hierarchy, &gate);
  if (!r) {
    Json p = FailureJson(r.failure());
    p["head"] = h.Label();
    p["dependent"] = d.Label();
    p["slot"] = PathToString(path);
    Emit(state, "CLASH", std::move(p));
    return false;
  }
  Json p = Json::object();
  p["head"] = h.Label();
  p["dependent"] = d.Label();
  p["slot"] = PathToString(path);
  p["host"] = AvmToJson(h.base, {});
  p["guest"] = AvmToJson(guest, {});
  p["sim_threshold"] = params_.sim_threshold;
  h.base = r.value();
  h.fillers[slot] = d.id;
  h.daughters.push_back(d.id);
  d.parent = h.id;
  h.span.start = std::min(h.span.start, d.span.start);
  h.span.end = std::max(h.span.end, d.span.end);
  std::vector<std::string> events_before = h.events;
  Recompute(state, h);
  Emit(state, "COMPOSE", std::move(p));
  if (was_expected) {
    Json e = Json::object();
    e["constituent"] = h.Label();
    e["slot"] = PathToString(path);
    e["status"] = h.events == events_before ? "confirmed" : "mismatch";
    Emit(state, "EXPECT", std::move(e));
  }
  return true;
}

namespace {

std::vector<int> OpenSlots(const Constituent &c) {
  std::vector<int> open;
  auto slots = SlotListPath(c.fs);
  if (!slots) return open;
  auto list = ResolvePath(c.fs, *slots);
  for (size_t i = 0; i < list->list_size(); ++i) {
    if (c.fillers.count(static_cast<int>(i))) continue;
    if (HasStatus(list->Item(i), kObserved)) continue;
    open.push_back(static_cast<int>(i));
  }
  return open;
}

}  // namespace

void Processor::Compose(ParseState &state) const {
  if (state.tokens.empty()) return;
  int t = static_cast<int>(state.tokens.size()) - 1;
  std::vector<int> fresh;
  for (const Constituent &k : state.constituents) {
    if (k.lexical && k.primary && k.head_token == t && k.parent == -1) fresh.push_back(k.id);
  }
  auto left_neighbour = [&](int id) {
    const Constituent &c = state.constituents[id];
    for (const Constituent &k : state.constituents) {
      if (k.id != id && k.parent == -1 && k.primary && k.span.end == c.span.start - 1) return k.id;
    }
    return -1;
  };

  for (int id : fresh) {
    // A selecting neighbour becomes the specifier.
    int l = left_neighbour(id);
    if (l >= 0) {
      const Constituent &left = state.constituents[l];
      auto sel = ResolvePath(left.fs, kSelect);
      auto cat = ResolvePath(state.constituents[id].fs, kCat);
      if (sel && cat && Unify(*sel, *cat, grammar_.hierarchy)) {
        Constituent &c = state.constituents[id];
        auto r = UnifyAt(c.base, kSpr, left.fs, grammar_.hierarchy);
        Json p = Json::object();
        p["head"] = c.Label();
        p["dependent"] = left.Label();
        p["slot"] = PathToString(kSpr);
        if (r) {
          p["host"] = AvmToJson(c.base, {});
          p["guest"] = AvmToJson(left.fs, {});
          p["sim_threshold"] = params_.sim_threshold;
          c.base = r.value();
          c.daughters.push_back(l);
          state.constituents[l].parent = id;
          c.span.start = left.span.start;
          Recompute(state, c);
          Emit(state, "COMPOSE", std::move(p));
        } else {
          Json f = FailureJson(r.failure());
          f.update(p);
          Emit(state, "CLASH", std::move(f));
        }
      }
    }

    // The head takes a saturated left neighbour as its first argument.
    std::vector<int> open = OpenSlots(state.constituents[id]);
    if (!open.empty() && open.front() == 0) {
      l = left_neighbour(id);
      if (l >= 0 && OpenSlots(state.constituents[l]).empty() &&
          !ResolvePath(state.constituents[l].fs, kSelect)) {
        TryAttach(state, id, l, 0);
      }
    }

    // Otherwise the constituent fills the leftmost compatible slot of the
    // nearest head to its left.
    if (state.constituents[id].parent != -1) continue;
    if (ResolvePath(state.constituents[id].fs, kSelect)) continue;
    int head = -1;
    for (const Constituent &k : state.constituents) {
      if (k.id == id || k.parent != -1 || !k.primary) continue;
      if (k.span.end >= state.constituents[id].span.start) continue;
      std::vector<int> slots = OpenSlots(k);
      if (std::none_of(slots.begin(), slots.end(), [](int s) { return s >= 1; })) continue;
      if (head < 0 || k.span.end > state.constituents[head].span.end) head = k.id;
    }
    if (head < 0) continue;
    for (int s : OpenSlots(state.constituents[head])) {
      if (s >= 1 && TryAttach(state, head, id, s)) break;
    }
  }
  LabelSchematic(state);
}

void Processor::LabelSchematic(ParseState &state) const {
  VectorGate gate{&vectors_, params_.sim_threshold};
  for (const Construction &s : grammar_.constructions) {
    if (s.lexical() || HasStoredFrames(s) || SurfaceItems(s)) continue;
    std::vector<int> required;
    if (auto slots = SlotListPath(s.expanded)) {
      auto list = ResolvePath(s.expanded, *slots);
      for (size_t i = 0; i < list->list_size(); ++i) {
        if (!list->Item(i).is_unspecified()) required.push_back(static_cast<int>(i));
      }
    }
    for (const Constituent &h : state.constituents) {
      if (!h.primary || h.route) continue;
      bool done = false;
      for (const auto &[name, id] : state.labels) done |= name == s.name && id == h.id;
      if (done) continue;
      bool filled = true;
      for (int i : required) filled &= h.fillers.count(i) > 0;
      if (!filled || !Subsumes(s.expanded, h.fs, grammar_.hierarchy, &gate)) continue;
      bool cues = true;
      for (const Cue &cue : s.cues) {
        if (cue.kind != Cue::Kind::kFeature || cue.weight != WeightClass::kHard) continue;
        auto node = ResolvePath(h.fs, cue.path);
        cues &= node && Subsumes(cue.value, *node, grammar_.hierarchy, &gate);
      }
      if (!cues) continue;
      state.labels.emplace_back(s.name, h.id);
      Json p = Json::object();
      p["label"] = s.name;
      p["head"] = h.Label();
      p["route"] = RouteName(Route::kCompositional);
      Emit(state, "COMPOSE", std::move(p));
    }
  }
}

Interpretation Processor::Finish(ParseState &state) const {
  UpdateCues(state);
  Interpretation out;
  out.tokens = state.tokens;

  for (const Constituent &c : state.constituents) {
    if (!c.primary) continue;
    auto slots = SlotListPath(c.fs);
    if (!slots) continue;
    auto list = ResolvePath(c.fs, *slots);
    for (size_t i = 0; i < list->list_size(); ++i) {
      if (!HasStatus(list->Item(i), kExpected)) continue;
      Path p = *slots;
      p.push_back(PathStep(static_cast<int>(i)));
      Json j = Json::object();
      j["constituent"] = c.Label();
      j["slot"] = PathToString(p);
      j["status"] = "pending";
      j["filler"] = AvmToJson(list->Item(i), {});
      Emit(state, "EXPECT", std::move(j));
    }
  }

  for (const Token &t : state.tokens) {
    bool covered = false;
    for (const Constituent &c : state.constituents) {
      if (c.lexical && c.head_token == t.index) covered = true;
      if (c.route == Route::kDirect && c.surface.size() && c.span.start <= t.index &&
          t.index <= c.span.end) {
        covered = true;
      }
    }
    if (!covered) out.residue.push_back(t);
  }

  std::vector<FeatureStructure> frames;
  std::set<std::pair<const internal::Graph *, int>> seen;
  std::function<void(const Constituent &)> collect = [&](const Constituent &c) {
    if (c.opaque) {
      if (auto own = ResolvePath(c.fs, kOwnFrames); own && own->kind() == ValueKind::kList) {
        for (size_t i = 0; i < own->list_size(); ++i) frames.push_back(own->Item(i));
      }
      return;
    }
    CollectFrames(c.fs, &frames, &seen);
    if (!c.surface.empty()) {
      for (int d : c.daughters) collect(state.constituents[d]);
    }
  };
  std::vector<const Constituent *> top;
  for (const Constituent &c : state.constituents) {
    if (c.parent == -1 && c.primary) top.push_back(&c);
  }
  std::stable_sort(top.begin(), top.end(), [](const Constituent *a, const Constituent *b) {
    return a->span.start < b->span.start;
  });
  for (const Constituent *c : top) collect(*c);
  for (const FrameInstance &f : state.frame_instances) {
    if (!f.events.empty()) frames.push_back(f.fs);
  }
  out.meaning = FramesStructure(frames);

  for (const Constituent &c : state.constituents) {
    if (c.route) out.route_labels.emplace_back(c.Label(), *c.route);
  }
  for (const auto &[name, id] : state.labels) {
    const Constituent &h = state.constituents[id];
    out.route_labels.emplace_back(name + "[" + SpanText(h.span) + "]", Route::kCompositional);
  }

  for (size_t i = 0; i < state.records.size(); ++i) {
    if (!state.active[i]) continue;
    ActivationRecord &r = state.records[i];
    ObjectScores s;
    s.object = r.object;
    s.kind = state.record_kinds[i];
    s.activation = r.total;
    s.sigma = r.sigma;
    if (s.kind == ObjectKind::kConstruction) {
      for (const Constituent &c : state.constituents) {
        if (c.cx != r.object || !c.primary) continue;
        std::map<std::string, Prototype> protos = prototypes_[i];
        for (int d : c.daughters) {
          int di = RecordIndex(state.constituents[d].cx);
          if (c.route == Route::kDirect && di >= 0) protos.insert(prototypes_[di].begin(), prototypes_[di].end());
        }
        try {
          s.theta = SemanticCoherence(c.fs, protos, vectors_);
        } catch (const NoScorableRoles &) {
        }
        break;
      }
    }
    r.theta = s.theta;
    out.scores.push_back(s);
    switch (s.kind) {
      case ObjectKind::kConstruction:
        out.activated_constructions.push_back(r.object);
        break;
      case ObjectKind::kFrame:
        out.activated_frames.push_back(r.object);
        break;
      case ObjectKind::kEvent:
        out.activated_events.push_back(r.object);
        break;
    }
  }
  out.trace = state.trace;
  return out;
}

Interpretation Processor::Interpret(const std::vector<Token> &sentence) const {
  if (sentence.empty()) throw EmptyInput();
  ParseState state = Start();
  for (const Token &t : sentence) Advance(state, t);
  return Finish(state);
}

void Processor::Advance(ParseState &state, const Token &token) const {
  Scan(state, token);
  TryDirectRoute(state);
  Compose(state);
  // Composition can satisfy feature cues and event triggers.
  UpdateCues(state);
  FireEvents(state);
  TryDirectRoute(state);
}

Interpretation Processor::Interpret(std::string_view sentence) const {
  return Interpret(Tokenize(sentence));
}

Json InterpretationToJson(const Interpretation &interp, std::string_view sentence) {
  Json out = Json::object();
  out["sentence"] = std::string(sentence);
  Json tokens = Json::array();
  for (const Token &t : interp.tokens) tokens.push_back(t.surface);
  out["tokens"] = tokens;
  out["meaning"] = AvmToJson(interp.meaning, {});
  Json routes = Json::array();
  for (const auto &[label, route] : interp.route_labels) {
    routes.push_back({{"instance", label}, {"route", RouteName(route)}});
  }
  out["routes"] = routes;
  out["activated"] = {{"constructions", interp.activated_constructions},
                      {"frames", interp.activated_frames},
                      {"events", interp.activated_events}};
  Json scores = Json::array();
  for (const ObjectScores &s : interp.scores) {
    Json j = Json::object();
    j["object"] = s.object;
    j["kind"] = ObjectKindName(s.kind);
    j["A"] = s.activation;
    j["theta"] = s.theta ? Json(*s.theta) : Json(nullptr);
    j["sigma"] = s.sigma;
    scores.push_back(j);
  }
  out["scores"] = scores;
  Json residue = Json::array();
  for (const Token &t : interp.residue) residue.push_back({{"token", t.surface}, {"index", t.index}});
  out["residue"] = residue;
  Json trace = Json::array();
  for (const TraceRecord &r : interp.trace) {
    trace.push_back({{"kind", r.kind}, {"token", r.token}, {"payload", r.payload}});
  }
  out["trace"] = trace;
  return out;
}

std::string RenderSummary(const Interpretation &interp, std::string_view sentence) {
  std::ostringstream os;
  auto join = [](const std::vector<std::string> &v) {
    if (v.empty()) return std::string("(none)");
    std::string s;
    for (const auto &x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
  };
  os << "sentence: " << sentence << "\n";
  os << "constructions: " << join(interp.activated_constructions) << "\n";
  os << "frames: " << join(interp.activated_frames) << "\n";
  os << "events: " << join(interp.activated_events) << "\n";
  std::vector<std::string> routes;
  for (const auto &[label, route] : interp.route_labels) routes.push_back(label + " " + RouteName(route));
  os << "routes: " << join(routes) << "\n";
  std::vector<std::string> residue;
  for (const Token &t : interp.residue) residue.push_back(t.surface + "@" + std::to_string(t.index));
  os << "residue: " << join(residue) << "\n";
  os << "meaning: " << AvmToJson(interp.meaning, {}).dump() << "\n";
  os << "scores:\n";
  for (const ObjectScores &s : interp.scores) {
    os << "  " << s.object << " A=" << FormatNumber(s.activation)
       << " theta=" << (s.theta ? FormatNumber(*s.theta) : std::string("-"))
       << " sigma=" << FormatNumber(s.sigma) << "\n";
  }
  return os.str();
}

}  // namespace dcxg

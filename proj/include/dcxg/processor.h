#ifndef DCXG_PROCESSOR_H_
#define DCXG_PROCESSOR_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dcxg/activation.h"
#include "dcxg/avm_json.h"
#include "dcxg/feature_structure.h"
#include "dcxg/grammar.h"
#include "dcxg/properties.h"
#include "dcxg/vector_store.h"

namespace dcxg {

struct Token {
  std::string surface;
  int index = 0;
  double surprisal_multiplier = 1.0;
};

// Lowercases, splits on whitespace, and makes each punctuation character
// its own token. Apostrophes and hyphens stay inside words.
std::vector<Token> Tokenize(std::string_view sentence);

enum class Route { kDirect, kCompositional };

const char *RouteName(Route r);

// One trace event. Rendered as "KIND <token> <json>".
struct TraceRecord {
  std::string kind;
  int token = 0;
  Json payload;

  std::string ToLine() const;
};

struct Constituent {
  int id = 0;
  std::string cx;
  TokenSpan span;
  int head_token = 0;
  FeatureStructure base;  // observed content only
  FeatureStructure fs;    // base with event refinements applied
  std::vector<std::string> events;
  std::map<int, int> fillers;  // argument slot -> constituent id
  std::vector<int> daughters;
  int parent = -1;
  bool lexical = false;
  bool primary = true;  // false for alternative lexical readings of a token
  std::optional<Route> route;
  bool opaque = false;
  // Surface-anchored recognitions keep absorbing tokens that continue the
  // stored surface form.
  std::vector<std::string> surface;
  size_t surface_next = 0;
  bool absorbing = false;

  std::string Label() const;
};

struct FrameInstance {
  std::string frame;
  FeatureStructure fs;
  std::vector<std::string> events;
};

struct ParseState {
  std::vector<Token> tokens;
  std::vector<Constituent> constituents;
  std::vector<FrameInstance> frame_instances;
  // One record per grammar object: constructions, frames, events, in
  // declaration order.
  std::vector<ActivationRecord> records;
  std::vector<ObjectKind> record_kinds;
  std::vector<char> active;
  std::vector<double> reported;  // activation last written to the trace
  std::vector<std::string> fired_events;
  std::set<std::pair<std::string, int>> applied;  // (event, constituent or ~frame index)
  std::set<std::string> recognized_anchors;
  // Schematic constructions labelling compositional heads, in the order
  // the labels were assigned.
  std::vector<std::pair<std::string, int>> labels;
  std::vector<TraceRecord> trace;
};

struct Recognition {
  std::string construction;
  int constituent = 0;
  int token = 0;
  double activation = 0.0;
};

struct ObjectScores {
  std::string object;
  ObjectKind kind = ObjectKind::kConstruction;
  double activation = 0.0;
  std::optional<double> theta;
  double sigma = 0.0;
};

struct Interpretation {
  std::vector<Token> tokens;
  // {"frames": [...]}: frames bound by constructions or events.
  FeatureStructure meaning;
  std::vector<std::pair<std::string, Route>> route_labels;
  std::vector<ObjectScores> scores;  // activated objects, declaration order
  std::vector<Token> residue;
  std::vector<std::string> activated_constructions;
  std::vector<std::string> activated_frames;
  std::vector<std::string> activated_events;
  std::vector<TraceRecord> trace;

  std::vector<std::string> Activated() const;
};

class Processor {
 public:
  // The grammar and store must outlive the processor. Throws DomainError
  // on invalid parameters.
  Processor(const Grammar &grammar, const VectorStore &vectors, ActivationParams params);

  ParseState Start() const;

  // Instantiates lexical constructions for the token, updates cue
  // evidence, and fires events whose hard trigger cues are all satisfied.
  void Scan(ParseState &state, const Token &token) const;

  // Recognizes candidates whose hard cues are satisfied and whose
  // activation reaches the threshold.
  std::vector<Recognition> TryDirectRoute(ParseState &state) const;

  // Attaches the constituents of the newest token to open valence slots.
  void Compose(ParseState &state) const;

  // One full step for a token: scan, direct route, compose, then a second
  // round of cues, events and direct route.
  void Advance(ParseState &state, const Token &token) const;

  Interpretation Finish(ParseState &state) const;

  // Throws EmptyInput on an empty sentence.
  Interpretation Interpret(const std::vector<Token> &sentence) const;
  Interpretation Interpret(std::string_view sentence) const;

  const ActivationParams &params() const { return params_; }

 private:
  struct Anchor;

  int RecordIndex(std::string_view name) const;
  void UpdateCues(ParseState &state) const;
  void FireEvents(ParseState &state) const;
  bool Recompute(ParseState &state, Constituent &c) const;
  std::optional<Anchor> FindAnchor(const ParseState &state, const Construction &c) const;
  bool TryAttach(ParseState &state, int head, int dependent, int slot) const;
  void LabelSchematic(ParseState &state) const;
  void Emit(ParseState &state, const std::string &kind, Json payload) const;

  const Grammar &grammar_;
  const VectorStore &vectors_;
  ActivationParams params_;
  std::vector<std::map<std::string, Prototype>> prototypes_;  // per construction
};

// Summary and structured renderings used by the command line.
std::string RenderSummary(const Interpretation &interp, std::string_view sentence);
Json InterpretationToJson(const Interpretation &interp, std::string_view sentence);

}  // namespace dcxg

#endif  // DCXG_PROCESSOR_H_

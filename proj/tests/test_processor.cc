#include <algorithm>
#include <cmath>
#include <fstream>

#include "doctest.h"
#include "dcxg/errors.h"
#include "dcxg/processor.h"
#include "oracle.h"

using namespace dcxg;

namespace {

const Grammar &Fixture() {
  static const Grammar g = LoadGrammarFile(oracle::FixturePath("dcxg.json"));
  return g;
}

const Grammar &InflatedFan() {
  static const Grammar g = LoadGrammarFile(oracle::FixturePath("inflated_fan.json"));
  return g;
}

const VectorStore &Vectors() {
  static const VectorStore vs = VectorStore::LoadFile(oracle::FixturePath("vectors.txt"));
  return vs;
}

std::vector<std::string> Corpus() {
  std::ifstream in(oracle::FixturePath("corpus.txt"));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

std::string TraceText(const Interpretation &in) {
  std::string s;
  for (const auto &r : in.trace) s += r.ToLine() + "\n";
  return s;
}

std::vector<const TraceRecord *> OfKind(const Interpretation &in, const std::string &kind) {
  std::vector<const TraceRecord *> out;
  for (const auto &r : in.trace)
    if (r.kind == kind) out.push_back(&r);
  return out;
}

bool HasRoute(const Interpretation &in, const std::string &label, Route route) {
  return std::find(in.route_labels.begin(), in.route_labels.end(), std::make_pair(label, route)) !=
         in.route_labels.end();
}

FeatureStructure FrameOf(const Interpretation &in, const std::string &type) {
  auto frames = in.meaning.Get("frames");
  REQUIRE(frames);
  for (size_t i = 0; i < frames->list_size(); ++i)
    if (frames->Item(i).type() == type) return frames->Item(i);
  FAIL("frame " << type << " missing");
  return {};
}

std::string SurfaceOf(const FeatureStructure &sign) {
  auto s = ResolvePath(sign, ParsePath("form.surface_form[0]"));
  return s ? s->type() : "";
}

}  // namespace

TEST_CASE("tokenizer") {
  auto t = Tokenize("  Students READ, don't  stop.");
  REQUIRE(t.size() == 6);
  CHECK(t[0].surface == "students");
  CHECK(t[2].surface == ",");
  CHECK(t[3].surface == "don't");
  CHECK(t[5].surface == ".");
  CHECK(t[5].index == 5);
}

TEST_CASE("students read activates its seven objects") {
  Processor p(Fixture(), Vectors(), ActivationParams{});
  Interpretation in = p.Interpret("students read");
  std::vector<std::string> got = in.Activated();
  std::sort(got.begin(), got.end());
  std::vector<std::string> want = {"book-fr", "read-lexeme-cx", "reading-fr", "student-fr",
                                   "student-lexeme-cx", "student-read-event", "subject-predicate-cx"};
  CHECK(got == want);

  FeatureStructure reading = FrameOf(in, "reading-fr");
  auto reader = *reading.Get("reader");
  auto text = *reading.Get("text");
  CHECK(SurfaceOf(reader) == "students");
  CHECK(reader.Get("status")->type() == kObserved);
  CHECK(text.Get("status")->type() == kExpected);
  CHECK(ResolvePath(text, ParsePath("meaning.sem.frames[0]"))->type() == "book-fr");
  CHECK(in.residue.empty());
  CHECK(HasRoute(in, "subject-predicate-cx[0-1]", Route::kCompositional));
}

TEST_CASE("coherence of students read is the reader fit") {
  Processor p(Fixture(), Vectors(), ActivationParams{});
  Interpretation in = p.Interpret("students read");
  auto rows = oracle::ReadVectors(oracle::FixturePath("vectors.txt"));
  auto proto = oracle::Centroid(rows, {{"student", 1}, {"teacher", 1}, {"mary", 1}, {"john", 1}, {"child", 1}});
  double fit = oracle::Cosine(rows.at("student"), proto);
  bool seen = false;
  for (const auto &s : in.scores) {
    if (s.object != "read-lexeme-cx") continue;
    REQUIRE(s.theta.has_value());
    CHECK(*s.theta == doctest::Approx(fit).epsilon(1e-9));
    seen = true;
  }
  CHECK(seen);
}

TEST_CASE("john laughed binds the agent to john") {
  Processor p(Fixture(), Vectors(), ActivationParams{});
  ParseState st = p.Start();
  for (const Token &t : Tokenize("John laughed")) p.Advance(st, t);
  const Constituent *verb = nullptr;
  for (const auto &c : st.constituents)
    if (c.cx == "laughed-lexeme-cx") verb = &c;
  REQUIRE(verb);
  auto subj = ResolvePath(verb->fs, ParsePath("form.syn.val[0]"));
  REQUIRE(subj);
  CHECK(SurfaceOf(*subj) == "john");
  CHECK(ResolvePath(verb->fs, ParsePath("meaning.sem.frames[0].agt"))
            ->SameNode(*ResolvePath(*subj, ParsePath("meaning.sem.ind"))));
  Interpretation in = p.Finish(st);
  CHECK(HasRoute(in, "subject-predicate-cx[0-1]", Route::kCompositional));
  CHECK(FrameOf(in, "laughing-fr").type() == "laughing-fr");
}

TEST_CASE("idiom recognition point and opacity") {
  Processor p(Fixture(), Vectors(), ActivationParams{});
  for (const char *prefix : {"put", "put all"}) {
    Interpretation in = p.Interpret(prefix);
    CHECK(OfKind(in, "DIRECT").empty());
  }
  Interpretation in = p.Interpret("put all eggs in one basket");
  auto direct = OfKind(in, "DIRECT");
  REQUIRE(direct.size() == 1);
  CHECK(direct[0]->token == 2);
  CHECK(direct[0]->payload["construction"] == "put-all-eggs-cx");
  CHECK(HasRoute(in, "put-all-eggs-cx[0-5]", Route::kDirect));
  const Construction *idiom = Fixture().FindConstruction("put-all-eggs-cx");
  auto stored = ResolvePath(idiom->expanded, ParsePath("meaning.sem.frames"));
  REQUIRE(stored);
  CHECK(Isomorphic(*in.meaning.Get("frames"), *stored));
  CHECK(in.residue.empty());
}

TEST_CASE("inflated fan keeps activation under threshold") {
  ActivationParams params;
  Processor p(InflatedFan(), Vectors(), params);
  // Each lexical cue is shared with three frames: fan 4.
  double expected = 2 * params.hard_cue_weight * (params.mas - std::log(4.0));
  CHECK(expected < params.recognition_threshold);

  Interpretation in = p.Interpret("spill the beans");
  CHECK(OfKind(in, "DIRECT").empty());
  bool seen = false;
  for (const auto &s : in.scores) {
    if (s.object != "spill-beans-cx") continue;
    CHECK(std::abs(s.activation - expected) < 1e-9);
    seen = true;
  }
  CHECK(seen);

  Interpretation control = p.Interpret("twiddle thumbs");
  CHECK(OfKind(control, "DIRECT").size() == 1);
}

TEST_CASE("ditransitive order decides direct recognition") {
  Processor p(Fixture(), Vectors(), ActivationParams{});
  Interpretation in = p.Interpret("Mary gives John a book");
  CHECK(HasRoute(in, "ditransitive-cx[0-4]", Route::kDirect));
  FeatureStructure transfer = FrameOf(in, "transfer-fr");
  CHECK(SurfaceOf(*transfer.Get("agent")) == "mary");
  CHECK(SurfaceOf(*transfer.Get("recipient")) == "john");
  CHECK(SurfaceOf(*transfer.Get("theme")) == "book");

  Interpretation swapped = p.Interpret("Mary gives a book John");
  CHECK(OfKind(swapped, "DIRECT").empty());
  for (const auto &[label, route] : swapped.route_labels) CHECK(route != Route::kDirect);
}

TEST_CASE("similarity gate on the object slot") {
  auto rows = oracle::ReadVectors(oracle::FixturePath("vectors.txt"));
  auto proto = oracle::Centroid(rows, {{"book", 1}, {"novel", 1}, {"paper", 1}, {"letter", 1}});
  double c = oracle::Cosine(rows.at("magazine"), proto);
  for (double delta : {-0.05, 0.05}) {
    ActivationParams params;
    params.sim_threshold = c + delta;
    Processor p(Fixture(), Vectors(), params);
    Interpretation in = p.Interpret("John reads a magazine");
    bool composed = false, clashed = false;
    for (const auto &r : in.trace) {
      if (r.payload.value("slot", "") != "arg-st[1]") continue;
      if (r.kind == "COMPOSE") composed = true;
      if (r.kind == "CLASH") {
        clashed = true;
        CHECK(r.payload["failure"] == "SimilarityBelowThreshold");
        CHECK(r.payload["score"].get<double>() == doctest::Approx(c).epsilon(1e-9));
      }
    }
    CHECK(composed == (delta < 0));
    CHECK(clashed == (delta > 0));
  }
}

TEST_CASE("unknown words become residue") {
  Processor p(Fixture(), Vectors(), ActivationParams{});
  Interpretation in = p.Interpret("xyzzy");
  REQUIRE(in.residue.size() == 1);
  CHECK(in.residue[0].surface == "xyzzy");
  CHECK(in.meaning.Get("frames")->list_size() == 0);
  CHECK(in.Activated().empty());
  CHECK_THROWS_AS(p.Interpret("   "), EmptyInput);
}

TEST_CASE("trace invariants over the corpus") {
  ActivationParams params;
  Processor p(Fixture(), Vectors(), params);
  for (const std::string &sentence : Corpus()) {
    CAPTURE(sentence);
    Interpretation a = p.Interpret(sentence);
    Interpretation b = p.Interpret(sentence);
    CHECK(TraceText(a) == TraceText(b));

    // Direct recognitions: every hard cue satisfied, A at threshold.
    for (const TraceRecord *r : OfKind(a, "DIRECT")) {
      CHECK(r->payload["A"].get<double>() >= params.recognition_threshold);
      for (const auto &cue : r->payload["cues"])
        if (cue["weight"] == "hard") CHECK(cue["satisfied"].get<bool>());
    }

    // Every composition step replays from its recorded inputs.
    for (const TraceRecord *r : OfKind(a, "COMPOSE")) {
      if (!r->payload.contains("host")) continue;
      FeatureStructure host = ParseAvm(r->payload["host"], "").fs;
      FeatureStructure guest = ParseAvm(r->payload["guest"], "").fs;
      VectorGate gate{&Vectors(), r->payload["sim_threshold"].get<double>()};
      CHECK(UnifyAt(host, ParsePath(r->payload["slot"].get<std::string>()), guest, Fixture().hierarchy, &gate)
                .ok());
    }

    // Salience never drops for an object as tokens arrive.
    std::map<std::string, double> sigma;
    for (const TraceRecord *r : OfKind(a, "ACTIVATE")) {
      std::string obj = r->payload["object"];
      double s = r->payload["sigma"];
      if (sigma.count(obj)) CHECK(s >= sigma[obj]);
      sigma[obj] = s;
    }
  }
}

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "dcxg/activation.h"
#include "dcxg/cli.h"
#include "dcxg/processor.h"
#include "dcxg/unify.h"
#include "oracle.h"

using namespace dcxg;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string &what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const Grammar &Fixture() {
  static const Grammar g = LoadGrammarFile(oracle::FixturePath("dcxg.json"));
  return g;
}

const VectorStore &Vectors() {
  static const VectorStore vs = VectorStore::LoadFile(oracle::FixturePath("vectors.txt"));
  return vs;
}

bool Reentrancies(const FeatureStructure &x, const FeatureStructure &merged) {
  std::vector<std::optional<Path>> seen(x.graph().size());
  bool ok = true;
  std::function<void(const FeatureStructure &, Path)> walk = [&](const FeatureStructure &fs, Path p) {
    if (seen[fs.root()]) {
      auto a = ResolvePath(merged, *seen[fs.root()]);
      auto b = ResolvePath(merged, p);
      ok = ok && a && b && a->SameNode(*b);
      return;
    }
    seen[fs.root()] = p;
    for (const auto &name : fs.feature_names()) {
      Path q = p;
      q.push_back(name);
      walk(*fs.Get(name), q);
    }
    if (fs.kind() == ValueKind::kList) {
      for (size_t k = 0; k < fs.list_size(); ++k) {
        Path q = p;
        q.push_back(PathStep(static_cast<int>(k)));
        walk(fs.Item(k), q);
      }
    }
  };
  walk(x, {});
  return ok;
}

Outcome UnificationLaws() {
  Outcome o;
  TypeHierarchy h;
  oracle::FsGenerator gen(1234);
  auto start = std::chrono::steady_clock::now();
  const int kCases = 1000;
  for (int i = 0; i < kCases; ++i) {
    FeatureStructure x = gen.Generate(), y = gen.Generate();
    auto xx = Unify(x, x, h);
    o.Require(xx.ok() && Isomorphic(xx.value(), x), "idempotence");
    auto xy = Unify(x, y, h), yx = Unify(y, x, h);
    o.Require(xy.ok() == yx.ok(), "commutativity of success");
    if (xy.ok() && yx.ok()) {
      o.Require(Isomorphic(xy.value(), yx.value()), "commutativity");
      o.Require(Subsumes(x, xy.value(), h) && Subsumes(y, xy.value(), h), "monotonicity");
    }
    FeatureStructure a = gen.Generalize(x), b = gen.Generalize(x), c = gen.Generalize(x);
    auto ab = Unify(a, b, h), bc = Unify(b, c, h);
    o.Require(ab.ok() && bc.ok(), "compatible pairs unify");
    if (ab.ok() && bc.ok()) {
      auto l = Unify(ab.value(), c, h), r = Unify(a, bc.value(), h);
      o.Require(l.ok() && r.ok() && Isomorphic(l.value(), r.value()), "associativity");
    }
    auto xa = Unify(x, a, h);
    o.Require(xa.ok() && Reentrancies(x, xa.value()), "reentrancy preservation");
  }
  double secs = Seconds(start);
  o.Require(secs < 10.0, "runtime");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d structures, %.2fs", kCases, secs);
  o.detail = o.pass ? buf : o.detail + " (" + buf + ")";
  return o;
}

Outcome ActivationArithmetic() {
  Outcome o;
  const double tol = 1e-9;
  ActivationParams p;
  p.mas = 2.0;
  o.Require(std::abs(AssociativeStrength(p, 2) - (2.0 - std::log(2.0))) < tol, "associative strength");
  o.Require(std::abs(AssociativeStrength(p, 1) - 2.0) < tol, "associative strength fan 1");
  p.decay = 0.5;
  o.Require(std::abs(BaseActivation(3, 2.0, p) - (std::log(4.0) - 0.5 * std::log(2.0))) < tol, "base activation");
  p.decay = 0.0;
  o.Require(std::abs(BaseActivation(0, 3.0, p)) < tol, "base activation zero");

  auto match = [](double F, int fan, WeightClass w) {
    CueMatch m;
    m.F = F;
    m.fan = fan;
    m.weight_class = w;
    m.satisfied = true;
    return m;
  };
  p.hard_cue_weight = 1.0;
  p.soft_cue_weight = 0.5;
  ActivationRecord r1;
  r1.cue_matches = {match(1.0, 1, WeightClass::kHard)};
  o.Require(std::abs(TotalActivation(r1, p) - 2.0) < tol, "single cue");
  ActivationRecord r2;
  r2.base = 0.5;
  r2.cue_matches = {match(0.9, 1, WeightClass::kHard), match(1.0, 2, WeightClass::kSoft)};
  o.Require(std::abs(TotalActivation(r2, p) - (0.5 + 1.8 + 0.5 * (2.0 - std::log(2.0)))) < tol, "two cues");

  std::mt19937 rng(77);
  std::uniform_int_distribution<int> fan(1, 20), n(0, 10), cls(0, 2), coin(0, 1);
  std::uniform_real_distribution<double> base(-2.0, 2.0);
  ActivationParams q;
  for (int i = 0; i < 1000; ++i) {
    ActivationRecord r;
    r.base = base(rng);
    for (int k = n(rng); k > 0; --k) {
      CueMatch m = match(1.0, fan(rng), static_cast<WeightClass>(cls(rng)));
      m.satisfied = coin(rng) == 1;
      r.cue_matches.push_back(m);
    }
    o.Require(TotalActivation(r, q) == TotalActivationWithoutSimilarity(r, q), "degeneracy");
  }
  if (o.pass) o.detail = "hand values within 1e-9; 1000 degenerate records exact";
  return o;
}

Outcome PropertyOracle() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  std::vector<PropertyConstraint> all;
  std::vector<int> tags = {1, 2, 3, 4};
  for (PropertyKind k : {PropertyKind::kLinearity, PropertyKind::kAdjacency, PropertyKind::kCooccurrence,
                         PropertyKind::kExclusion, PropertyKind::kRequirement})
    for (int a : tags)
      for (int b : tags)
        if (a != b) all.push_back({k, {a, b}, WeightClass::kHard});
  long assignments = 0, verdicts = 0;
  for (int n = 1; n <= 6; ++n) {
    std::vector<char> used(n, 0);
    SpanAssignment asg;
    asg.sentence_length = n;
    std::function<void(size_t)> rec = [&](size_t k) {
      if (k == tags.size()) {
        ++assignments;
        auto ev = Evaluate(all, asg);
        for (size_t i = 0; i < all.size(); ++i, ++verdicts)
          o.Require(ev.verdicts[i] == oracle::BruteForce(all[i], asg), "verdict disagreement");
        return;
      }
      asg.spans[tags[k]] = std::nullopt;
      rec(k + 1);
      for (int s = 0; s < n; ++s) {
        for (int e = s; e < n && !used[e]; ++e) {
          for (int q = s; q <= e; ++q) used[q] = 1;
          asg.spans[tags[k]] = TokenSpan{s, e};
          rec(k + 1);
          for (int q = s; q <= e; ++q) used[q] = 0;
        }
      }
      asg.spans.erase(tags[k]);
    };
    rec(0);
  }
  double secs = Seconds(start);
  o.Require(secs < 30.0, "runtime");
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%ld assignments, %ld verdicts, %.2fs", assignments, verdicts, secs);
    o.detail = buf;
  }
  return o;
}

std::optional<FeatureStructure> FrameOf(const Interpretation &in, const std::string &type) {
  auto frames = in.meaning.Get("frames");
  if (!frames) return std::nullopt;
  for (size_t i = 0; i < frames->list_size(); ++i)
    if (frames->Item(i).type() == type) return frames->Item(i);
  return std::nullopt;
}

std::string SurfaceOf(const std::optional<FeatureStructure> &sign) {
  if (!sign) return "";
  auto s = ResolvePath(*sign, ParsePath("form.surface_form[0]"));
  return s ? s->type() : "";
}

std::string Status(const std::optional<FeatureStructure> &sign) {
  if (!sign) return "";
  auto s = sign->Get(kStatus);
  return s ? s->type() : "";
}

Outcome StudentRead() {
  Outcome o;
  Processor p(Fixture(), Vectors(), ActivationParams{});
  Interpretation in = p.Interpret("students read");
  auto got = in.Activated();
  std::sort(got.begin(), got.end());
  std::vector<std::string> want = {"book-fr", "read-lexeme-cx", "reading-fr", "student-fr",
                                   "student-lexeme-cx", "student-read-event", "subject-predicate-cx"};
  o.Require(got == want, "activated set differs");
  auto reading = FrameOf(in, "reading-fr");
  o.Require(reading.has_value(), "no reading-fr");
  if (reading) {
    auto reader = reading->Get("reader");
    auto text = reading->Get("text");
    o.Require(SurfaceOf(reader) == "students" && Status(reader) == kObserved, "reader binding");
    o.Require(Status(text) == kExpected, "text not an expectation");
    auto fr = text ? ResolvePath(*text, ParsePath("meaning.sem.frames[0]")) : std::nullopt;
    o.Require(fr && fr->type() == "book-fr", "text is not book-fr");
  }
  if (o.pass) o.detail = "7 objects; reader=students (observed), text=book-fr (expected)";
  return o;
}

Outcome IdiomRecognition() {
  Outcome o;
  Processor p(Fixture(), Vectors(), ActivationParams{});
  auto directs = [](const Interpretation &in) {
    std::vector<const TraceRecord *> out;
    for (const auto &r : in.trace)
      if (r.kind == "DIRECT") out.push_back(&r);
    return out;
  };
  o.Require(directs(p.Interpret("put")).empty(), "recognized after put");
  o.Require(directs(p.Interpret("put all")).empty(), "recognized after put all");
  Interpretation in = p.Interpret("put all eggs in one basket");
  auto d = directs(in);
  o.Require(d.size() == 1 && d[0]->token == 2 && d[0]->payload["construction"] == "put-all-eggs-cx",
            "recognition point");
  bool direct = false;
  for (const auto &[label, route] : in.route_labels)
    direct = direct || (label.rfind("put-all-eggs-cx[", 0) == 0 && route == Route::kDirect);
  o.Require(direct, "route label");
  auto stored = ResolvePath(Fixture().FindConstruction("put-all-eggs-cx")->expanded, ParsePath("meaning.sem.frames"));
  o.Require(stored && Isomorphic(*in.meaning.Get("frames"), *stored), "meaning is not the stored frame");
  if (o.pass) o.detail = "recognized at token 2, route=direct, meaning = stored take-a-risk-fr";
  return o;
}

Outcome Ditransitive() {
  Outcome o;
  std::vector<PropertyConstraint> props = Fixture().FindConstruction("ditransitive-cx")->properties;
  // Fixture tags: 1 verb, 2 subject, 3 obl, 4 obj.
  SpanAssignment good{5, {{2, TokenSpan{0, 0}}, {1, TokenSpan{1, 1}}, {3, TokenSpan{2, 2}}, {4, TokenSpan{3, 4}}}};
  SpanAssignment swap{5, {{2, TokenSpan{0, 0}}, {1, TokenSpan{1, 1}}, {4, TokenSpan{2, 3}}, {3, TokenSpan{4, 4}}}};
  auto ev = Evaluate(props, good);
  o.Require(ev.hard_violations == 0 && ev.soft_violations == 0, "properties violated on canonical order");
  auto sw = Evaluate(props, swap);
  o.Require(sw.hard_violations > 0, "swapped order does not violate lin");

  Processor p(Fixture(), Vectors(), ActivationParams{});
  Interpretation in = p.Interpret("Mary gives John a book");
  auto transfer = FrameOf(in, "transfer-fr");
  o.Require(transfer.has_value(), "no transfer-fr");
  if (transfer) {
    o.Require(SurfaceOf(transfer->Get("agent")) == "mary", "agent");
    o.Require(SurfaceOf(transfer->Get("recipient")) == "john", "recipient");
    o.Require(SurfaceOf(transfer->Get("theme")) == "book", "theme");
  }
  Interpretation swapped = p.Interpret("Mary gives a book John");
  for (const auto &r : swapped.trace) o.Require(r.kind != "DIRECT", "swapped variant recognized");
  if (o.pass) o.detail = "transfer-fr{agent=mary, recipient=john, theme=book}; swapped variant not recognized";
  return o;
}

Outcome SimilarityGate() {
  Outcome o;
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
      composed = composed || r.kind == "COMPOSE";
      clashed = clashed || (r.kind == "CLASH" && r.payload["failure"] == "SimilarityBelowThreshold");
    }
    o.Require(composed == (delta < 0) && clashed == (delta > 0), "processor gate");

    // The same decision at library level.
    const Construction *read = Fixture().FindConstruction("read-lexeme-cx");
    auto obj = ResolvePath(read->expanded, ParsePath("arg-st[1]"));
    auto filler = ParseAvm(Json::parse(R"({"meaning": {"sem": {"ds-vector": {"vec": "magazine"}}}})"), "").fs;
    bool ok = LooseUnify(*obj, filler, Fixture().hierarchy, Vectors(), params.sim_threshold).ok();
    o.Require(ok == (delta < 0), "library gate");
  }
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "cos=%.6f; accepted at %.6f, rejected at %.6f", c, c - 0.05, c + 0.05);
    o.detail = buf;
  }
  return o;
}

std::string RunCorpus(int threads) {
  RunConfig cfg;
  cfg.grammar_path = oracle::FixturePath("dcxg.json");
  cfg.vectors_path = oracle::FixturePath("vectors.txt");
  cfg.input_file = oracle::FixturePath("corpus.txt");
  cfg.mode = OutputMode::kTrace;
  cfg.threads = threads;
  std::istringstream in;
  std::ostringstream out, err;
  if (Run(cfg, in, out, err) != 0) return "error: " + err.str();
  return out.str();
}

Outcome Determinism() {
  Outcome o;
  int n = static_cast<int>(std::max(4u, std::thread::hardware_concurrency()));
  std::string first = RunCorpus(1), second = RunCorpus(1), parallel = RunCorpus(n);
  std::ifstream corpus(oracle::FixturePath("corpus.txt"));
  int sentences = 0;
  for (std::string line; std::getline(corpus, line);) sentences += !line.empty();
  o.Require(sentences >= 20, "corpus too small");
  o.Require(first.rfind("error", 0) != 0, first);
  o.Require(first == second, "two runs differ");
  o.Require(first == parallel, "1 thread vs N threads differ");
  if (o.pass) o.detail = std::to_string(sentences) + " sentences, " + std::to_string(first.size()) +
                         " trace bytes, 1 vs " + std::to_string(n) + " threads identical";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char *name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"unification laws", UnificationLaws},
      {"activation arithmetic", ActivationArithmetic},
      {"property oracle", PropertyOracle},
      {"students read", StudentRead},
      {"idiom recognition point", IdiomRecognition},
      {"ditransitive", Ditransitive},
      {"similarity gate", SimilarityGate},
      {"determinism", Determinism},
  };
  int failed = 0, i = 0;
  for (const auto &c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", ++i, c.name, o.detail.c_str());
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}

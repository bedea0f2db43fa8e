#include <sstream>

#include "doctest.h"
#include "dcxg/errors.h"
#include "dcxg/grammar.h"
#include "oracle.h"

using namespace dcxg;

namespace {

const Grammar &Fixture() {
  static const Grammar g = LoadGrammarFile(oracle::FixturePath("dcxg.json"));
  return g;
}

const VectorStore &Vectors() {
  static const VectorStore vs = VectorStore::LoadFile(oracle::FixturePath("vectors.txt"));
  return vs;
}

Json Minimal() {
  return Json::parse(R"({
    "hierarchy": {},
    "constructions": {"x-cx": {"form": {"syn": {"cat": {"type": "N"}}}}},
    "frames": {},
    "events": {}
  })");
}

bool IssueMentions(const ValidationError &e, const std::string &needle) {
  for (const auto &issue : e.issues())
    if ((issue.object + " " + issue.rule).find(needle) != std::string::npos) return true;
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("fixture grammar loads and events resolve") {
  const Grammar &g = Fixture();
  REQUIRE(g.FindConstruction("read-lexeme-cx"));
  REQUIRE(g.FindFrame("reading-fr"));
  const Event *e = g.FindEvent("student-read-event");
  REQUIRE(e);
  CHECK(g.FindConstruction(e->specialize));
  CHECK(g.KindOf("reading-fr") == ObjectKind::kFrame);
  CHECK_FALSE(g.KindOf("no-such-thing").has_value());
  CHECK_NOTHROW(ValidateVocabulary(g, Vectors()));
}

TEST_CASE("missing specialize target names the event") {
  Json j = Minimal();
  j["events"]["lost-event"] = Json::parse(R"({"specialize": "nowhere-cx", "trigger": {"lexical": [{"cue": "x"}]},
                                              "refinement": {}})");
  try {
    LoadGrammarJson(j);
    FAIL("expected ValidationError");
  } catch (const ValidationError &e) {
    CHECK(IssueMentions(e, "lost-event"));
  }
}

TEST_CASE("cue on an unknown tag is rejected") {
  Json j = Minimal();
  j["constructions"]["x-cx"]["cues"] = Json::parse(R"({"syntactic": [{"tag": "#9"}]})");
  CHECK_THROWS_AS(LoadGrammarJson(j), ValidationError);
}

TEST_CASE("inheritance expansion") {
  const Grammar &g = Fixture();

  const Construction *laughed = g.FindConstruction("laughed-lexeme-cx");
  REQUIRE(laughed);
  const FeatureStructure &x = laughed->expanded;
  auto val0 = ResolvePath(x, ParsePath("form.syn.val[0]"));
  auto subj = ResolvePath(x, ParsePath("arg-st[0]"));
  REQUIRE(val0);
  REQUIRE(subj);
  CHECK(val0->SameNode(*subj));
  CHECK(ResolvePath(x, ParsePath("form.syn.val[0].form.syn.gf"))->type() == "subj");
  CHECK(ResolvePath(x, ParsePath("form.syn.val[0].form.syn.cat.type"))->type() == "N");
  // The frame's agent is the subject's index.
  CHECK(ResolvePath(x, ParsePath("meaning.sem.frames[0].agt"))
            ->SameNode(*ResolvePath(x, ParsePath("arg-st[0].meaning.sem.ind"))));

  // No supertypes: unchanged.
  const Construction *sp = g.FindConstruction("subject-predicate-cx");
  CHECK(Isomorphic(ExpandInheritance(*sp, g).expanded, sp->body));

  // Expansion is idempotent.
  Construction again = ExpandInheritance(*laughed, g);
  CHECK(Isomorphic(again.expanded, laughed->expanded));
}

TEST_CASE("conflicting ancestors clash") {
  Json j = Minimal();
  j["constructions"]["v-cx"] = Json::parse(R"({"form": {"syn": {"cat": {"type": "V"}}}})");
  j["constructions"]["both-cx"] = Json::parse(R"({"supertypes": ["x-cx", "v-cx"], "form": {}})");
  try {
    LoadGrammarJson(j);
    FAIL("expected InheritanceClash");
  } catch (const InheritanceClash &e) {
    CHECK(e.path() == "form.syn.cat.type");
  } catch (const ValidationError &e) {
    CHECK(IssueMentions(e, "syn.cat"));
  }
}

TEST_CASE("grammar round trip") {
  Json out = SerializeGrammar(Fixture());
  Grammar back = LoadGrammarJson(out);
  CHECK(GrammarsEqual(Fixture(), back));
  CHECK(SerializeGrammar(back) == out);
}

TEST_CASE("student-read event pre-fills the object") {
  const Grammar &g = Fixture();
  const Event *e = g.FindEvent("student-read-event");
  const Construction *read = g.FindConstruction("read-lexeme-cx");
  auto r = ApplyEvent(*e, read->expanded, g.hierarchy, Vectors(), 0.6);
  REQUIRE(r.ok());
  auto obj = ResolvePath(r.value(), ParsePath("arg-st[1]"));
  REQUIRE(obj);
  CHECK(ResolvePath(*obj, ParsePath("status"))->type() == kExpected);
  CHECK(ResolvePath(*obj, ParsePath("meaning.sem.frames[0]"))->type() == "book-fr");
  CHECK(ResolvePath(*obj, ParsePath("meaning.sem.ds-vector"))->vector().key == "book");
  // The frame's text role is the same sign.
  CHECK(ResolvePath(r.value(), ParsePath("meaning.sem.frames[0].text"))->SameNode(*obj));

  // Applying it again changes nothing.
  auto twice = ApplyEvent(*e, r.value(), g.hierarchy, Vectors(), 0.6);
  REQUIRE(twice.ok());
  CHECK(Isomorphic(twice.value(), r.value()));
}

TEST_CASE("ditransitive event expects sweets") {
  const Grammar &g = Fixture();
  const Event *e = g.FindEvent("children-sweets-event");
  const Construction *d = g.FindConstruction("ditransitive-cx");
  auto r = ApplyEvent(*e, d->expanded, g.hierarchy, Vectors(), 0.6);
  REQUIRE(r.ok());
  CHECK(ResolvePath(r.value(), ParsePath("arg-st[2].meaning.sem.ds-vector"))->vector().key == "sweets");
  CHECK(ResolvePath(r.value(), ParsePath("arg-st[2].status"))->type() == kExpected);
}

TEST_CASE("an event whose refinement equals the target leaves it unchanged") {
  const Grammar &g = Fixture();
  const Construction *read = g.FindConstruction("read-lexeme-cx");
  Event e;
  e.name = "same-event";
  e.specialize = read->name;
  e.refinement = read->expanded;
  auto r = ApplyEvent(e, read->expanded, g.hierarchy, Vectors(), 0.6);
  REQUIRE(r.ok());
  CHECK(Isomorphic(r.value(), read->expanded));
}

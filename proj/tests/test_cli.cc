#include <sstream>

#include "doctest.h"
#include "dcxg/avm_json.h"
#include "dcxg/cli.h"
#include "oracle.h"

using namespace dcxg;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Call(std::vector<std::string> args, const std::string &input = "") {
  args.insert(args.begin(), "dcxg");
  std::vector<char *> argv;
  for (auto &a : args) argv.push_back(a.data());
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = Main(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> Base() {
  return {"--grammar", oracle::FixturePath("dcxg.json"), "--vectors", oracle::FixturePath("vectors.txt")};
}

}  // namespace

TEST_CASE("summary lists the activated objects") {
  auto args = Base();
  args.push_back("students read");
  Result r = Call(args);
  CHECK(r.code == 0);
  CHECK(r.out.find("constructions: subject-predicate-cx, student-lexeme-cx, read-lexeme-cx") != std::string::npos);
  CHECK(r.out.find("frames: student-fr, book-fr, reading-fr") != std::string::npos);
  CHECK(r.out.find("events: student-read-event") != std::string::npos);
}

TEST_CASE("missing vectors file") {
  Result r = Call({"--grammar", oracle::FixturePath("dcxg.json"), "--vectors", "/nonexistent/v.txt", "x"});
  CHECK(r.code == 1);
  CHECK(r.err.find("/nonexistent/v.txt") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(Call({"--grammar", "g.json"}).code == 2);
  auto args = Base();
  args.insert(args.end(), {"--trace", "--structured", "x"});
  CHECK(Call(args).code == 2);
  args = Base();
  args.insert(args.end(), {"--threads", "zero", "x"});
  CHECK(Call(args).code == 2);
}

TEST_CASE("trace output") {
  auto args = Base();
  args.insert(args.end(), {"--trace", "put all eggs"});
  Result r = Call(args);
  CHECK(r.code == 0);
  CHECK(r.out.find("SCAN 0 ") != std::string::npos);
  CHECK(r.out.find("ACTIVATE ") != std::string::npos);
  CHECK(r.out.find("DIRECT 2 ") != std::string::npos);
}

TEST_CASE("structured output and stdin input") {
  auto args = Base();
  args.push_back("--structured");
  Result r = Call(args, "students read\n\nxyzzy\n");
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j["sentences"].size() == 2);
  CHECK(j["sentences"][0]["sentence"] == "students read");
  CHECK(j["sentences"][1]["residue"][0]["token"] == "xyzzy");
  CHECK(j["params"]["mas"] == 2.0);
}

TEST_CASE("parameter overrides reach the processor") {
  auto args = Base();
  args.insert(args.end(), {"--threshold", "100", "put all eggs in one basket"});
  Result r = Call(args);
  CHECK(r.code == 0);
  CHECK(r.out.find("routes: (none)") != std::string::npos);
}

TEST_CASE("structured meanings parse back to the same notation") {
  auto args = Base();
  args.insert(args.end(), {"--structured", "--file", oracle::FixturePath("corpus.txt")});
  Result r = Call(args);
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["sentences"].size() >= 20);
  for (const auto &s : j["sentences"]) {
    ParsedAvm m = ParseAvm(s["meaning"], "");
    CHECK(AvmToJson(m.fs, m.tags) == s["meaning"]);
  }
}

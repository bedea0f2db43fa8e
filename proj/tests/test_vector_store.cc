#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dcxg/errors.h"
#include "dcxg/vector_store.h"
#include "oracle.h"

using namespace dcxg;

TEST_CASE("load parses header and rows") {
  std::istringstream in("2 3\nbook 1 0 0\nmagazine 0 1 0\n");
  VectorStore vs = VectorStore::Load(in);
  CHECK(vs.size() == 2);
  CHECK(vs.dim() == 3);
  CHECK(vs.Contains("Book"));
  CHECK_FALSE(vs.Contains("novel"));
}

TEST_CASE("load rejects short rows and duplicates") {
  std::istringstream short_row("2 3\nbook 1 0 0\nmagazine 0 1\n");
  CHECK_THROWS_AS(VectorStore::Load(short_row), DimensionMismatch);
  try {
    std::istringstream again("2 3\nbook 1 0 0\nmagazine 0 1\n");
    VectorStore::Load(again);
  } catch (const DimensionMismatch &e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  std::istringstream dup("2 2\nbook 1 0\nbook 0 1\n");
  try {
    VectorStore::Load(dup);
    FAIL("duplicate accepted");
  } catch (const FormatError &e) {
    CHECK(std::string(e.what()).find("book") != std::string::npos);
  }
}

TEST_CASE("cosine hand values") {
  std::vector<double> u{1, 2, 3}, v{4, 5, 6};
  CHECK(Cosine(u, v) == doctest::Approx(0.974631846).epsilon(1e-9));
  CHECK(Cosine(u, v) == doctest::Approx(32.0 / (std::sqrt(14.0) * std::sqrt(77.0))).epsilon(1e-12));
  std::vector<double> x{1, 0}, y{0, 1};
  CHECK(Cosine(x, y) == 0.0);
  CHECK(Cosine(u, u) == doctest::Approx(1.0));
  CHECK_THROWS_AS(Cosine(x, u), DimensionMismatch);
  CHECK_THROWS_AS(Cosine(std::vector<double>{0, 0}, x), ZeroVector);
}

TEST_CASE("cosine symmetry, scale invariance and range") {
  std::mt19937 rng(5);
  std::normal_distribution<double> d;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> u(6), v(6);
    for (auto &x : u) x = d(rng);
    for (auto &x : v) x = d(rng);
    double c = Cosine(u, v);
    CHECK(c == Cosine(v, u));
    std::vector<double> s = u;
    for (auto &x : s) x *= 3.7;
    CHECK(std::fabs(Cosine(s, v) - c) <= 1e-9);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("prototypes over the fixture store") {
  VectorStore vs = VectorStore::LoadFile(oracle::FixturePath("vectors.txt"));
  auto rows = oracle::ReadVectors(oracle::FixturePath("vectors.txt"));

  Prototype single = BuildPrototype(std::vector<WeightedForm>{{"student", 1.0}}, vs);
  const Vector &student = *vs.Find("student");
  for (size_t i = 0; i < student.size(); ++i) CHECK(std::fabs(single.vector[i] - student[i]) <= 1e-12);
  Prototype copies = BuildPrototype(std::vector<WeightedForm>{{"student", 2.0}, {"student", 0.5}}, vs);
  for (size_t i = 0; i < student.size(); ++i) CHECK(std::fabs(copies.vector[i] - student[i]) <= 1e-12);

  Prototype mix = BuildPrototype(std::vector<WeightedForm>{{"book", 1.0}, {"magazine", 1.0}}, vs);
  auto expect = oracle::Centroid(rows, {{"book", 1.0}, {"magazine", 1.0}});
  for (size_t i = 0; i < expect.size(); ++i) CHECK(mix.vector[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  CHECK(ThematicFit("book", mix, vs) ==
        doctest::Approx(oracle::Cosine(rows.at("book"), expect)).epsilon(1e-12));
  CHECK(ThematicFit("student", single, vs) == doctest::Approx(1.0));

  CHECK_THROWS_AS(BuildPrototype(std::vector<WeightedForm>{}, vs), EmptyFillerList);
  CHECK_THROWS_AS(BuildPrototype(std::vector<WeightedForm>{{"xyzzy", 1.0}}, vs), OutOfVocabulary);
  CHECK_THROWS_AS(ThematicFit("xyzzy", mix, vs), OutOfVocabulary);
}

TEST_CASE("thematic fit of an orthogonal word is zero") {
  VectorStore vs = VectorStore::FromRows({{"a", {1, 0}}, {"b", {0, 2}}});
  Prototype p = BuildPrototype(std::vector<WeightedForm>{{"a", 1.0}}, vs);
  CHECK(ThematicFit("b", p, vs) == 0.0);
}

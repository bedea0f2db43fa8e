#include <chrono>
#include <functional>

#include "doctest.h"
#include "dcxg/errors.h"
#include "dcxg/properties.h"
#include "oracle.h"

using namespace dcxg;

namespace {

// Tags: 1 subj, 2 verb, 3 obl, 4 obj.
std::vector<PropertyConstraint> Ditransitive() {
  return {{PropertyKind::kLinearity, {1, 2}, WeightClass::kHard},
          {PropertyKind::kLinearity, {2, 3}, WeightClass::kHard},
          {PropertyKind::kLinearity, {3, 4}, WeightClass::kHard},
          {PropertyKind::kAdjacency, {2, 3}, WeightClass::kHard},
          {PropertyKind::kAdjacency, {3, 4}, WeightClass::kHard}};
}

SpanAssignment Assign(int n, std::map<int, std::optional<TokenSpan>> spans) {
  SpanAssignment a;
  a.sentence_length = n;
  a.spans = std::move(spans);
  return a;
}

// Every way of giving `tags` non-overlapping spans (or none) in a
// sentence of length n.
void Enumerate(int n, const std::vector<int> &tags, size_t k, std::vector<char> &used,
               std::map<int, std::optional<TokenSpan>> &cur,
               const std::function<void(const SpanAssignment &)> &visit) {
  if (k == tags.size()) {
    visit(Assign(n, cur));
    return;
  }
  cur[tags[k]] = std::nullopt;
  Enumerate(n, tags, k + 1, used, cur, visit);
  for (int s = 0; s < n; ++s) {
    for (int e = s; e < n && !used[e]; ++e) {
      if (used[s]) break;
      for (int p = s; p <= e; ++p) used[p] = 1;
      cur[tags[k]] = TokenSpan{s, e};
      Enumerate(n, tags, k + 1, used, cur, visit);
      for (int p = s; p <= e; ++p) used[p] = 0;
    }
  }
  cur.erase(tags[k]);
}

}  // namespace

TEST_CASE("ditransitive order") {
  auto ok = Evaluate(Ditransitive(), Assign(5, {{1, TokenSpan{0, 0}}, {2, TokenSpan{1, 1}},
                                                 {3, TokenSpan{2, 2}}, {4, TokenSpan{3, 4}}}));
  for (Verdict v : ok.verdicts) CHECK(v == Verdict::kSatisfied);
  CHECK(ok.hard_violations == 0);

  auto swapped = Evaluate(Ditransitive(), Assign(5, {{1, TokenSpan{0, 0}}, {2, TokenSpan{1, 1}},
                                                      {4, TokenSpan{2, 2}}, {3, TokenSpan{3, 4}}}));
  CHECK(swapped.verdicts[2] == Verdict::kViolated);
  CHECK(swapped.hard_violations > 0);

  std::vector<PropertyConstraint> lin = {{PropertyKind::kLinearity, {1, 2}, WeightClass::kHard}};
  CHECK(Evaluate(lin, Assign(3, {{1, TokenSpan{0, 0}}})).verdicts[0] == Verdict::kInapplicable);
}

TEST_CASE("dependency is never evaluable") {
  std::vector<PropertyConstraint> dep = {{PropertyKind::kDependency, {1, 2}, WeightClass::kHard}};
  auto ev = Evaluate(dep, Assign(2, {{1, TokenSpan{0, 0}}, {2, TokenSpan{1, 1}}}));
  CHECK(ev.verdicts[0] == Verdict::kInapplicable);
  CHECK(ev.hard_violations == 0);
}

TEST_CASE("evaluation preconditions") {
  std::vector<PropertyConstraint> lin = {{PropertyKind::kLinearity, {1, 2}, WeightClass::kHard}};
  CHECK_THROWS_AS(Evaluate(lin, Assign(3, {{1, TokenSpan{0, 1}}, {2, TokenSpan{1, 2}}})), ValidationError);
  CHECK_THROWS_AS(Evaluate(lin, Assign(3, {{1, TokenSpan{0, 0}}, {2, TokenSpan{2, 3}}})), ValidationError);
  std::vector<PropertyConstraint> bad = {{PropertyKind::kLinearity, {1}, WeightClass::kHard}};
  CHECK_THROWS_AS(Evaluate(bad, Assign(3, {})), ValidationError);
}

TEST_CASE("relaxation score") {
  PropertyEvaluation none;
  CHECK(RelaxationScore(none, 0.25) == 1.0);
  PropertyEvaluation hard;
  hard.hard_violations = 1;
  CHECK(RelaxationScore(hard, 0.25) == 0.0);
  PropertyEvaluation soft;
  soft.soft_violations = 2;
  CHECK(RelaxationScore(soft, 0.25) == doctest::Approx(0.75 * 0.75).epsilon(1e-12));
  CHECK_THROWS_AS(RelaxationScore(soft, 0.0), DomainError);
  CHECK_THROWS_AS(RelaxationScore(soft, 1.5), DomainError);

  // More soft violations never raise the score.
  for (int k = 0; k < 20; ++k) {
    PropertyEvaluation a, b;
    a.soft_violations = k;
    b.soft_violations = k + 1;
    CHECK(RelaxationScore(b, 0.3) <= RelaxationScore(a, 0.3));
  }
}

TEST_CASE("verdicts agree with brute-force enumeration") {
  auto start = std::chrono::steady_clock::now();
  const PropertyKind kinds[] = {PropertyKind::kLinearity, PropertyKind::kAdjacency,
                                PropertyKind::kCooccurrence, PropertyKind::kExclusion,
                                PropertyKind::kRequirement};
  std::vector<int> tags = {1, 2, 3, 4};
  std::vector<PropertyConstraint> all;
  for (PropertyKind k : kinds)
    for (int a : tags)
      for (int b : tags)
        if (a != b) all.push_back({k, {a, b}, WeightClass::kSoft});

  long cases = 0, mismatches = 0;
  for (int n = 1; n <= 6; ++n) {
    std::vector<char> used(n, 0);
    std::map<int, std::optional<TokenSpan>> cur;
    Enumerate(n, tags, 0, used, cur, [&](const SpanAssignment &a) {
      auto ev = Evaluate(all, a);
      int soft = 0;
      for (size_t i = 0; i < all.size(); ++i) {
        Verdict expect = oracle::BruteForce(all[i], a);
        ++cases;
        if (ev.verdicts[i] != expect) ++mismatches;
        if (expect == Verdict::kViolated) ++soft;
      }
      if (ev.soft_violations != soft) ++mismatches;
    });
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(cases > 1000);
  CHECK(mismatches == 0);
  CHECK(secs < 30.0);
}

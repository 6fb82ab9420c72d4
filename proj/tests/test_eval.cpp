#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "pivotforge/error.hpp"
#include "pivotforge/eval.hpp"

using namespace pivotforge;

namespace {

std::vector<std::string> Chars(const std::string& s) {
  std::vector<std::string> out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

std::vector<int> RandomSeq(std::mt19937_64& rng, size_t max_len, int alphabet) {
  std::vector<int> s(rng() % (max_len + 1));
  for (auto& x : s) x = static_cast<int>(rng() % alphabet);
  return s;
}

// Applies the edit script to `ref` and returns the result.
template <typename T>
std::vector<T> Replay(const std::vector<T>& ref, const std::vector<T>& hyp, const Alignment& a) {
  std::vector<T> out;
  size_t r = 0;
  for (const auto& op : a.ops) {
    switch (op.kind) {
      case EditKind::kMatch:
        CHECK(ref[op.ref] == hyp[op.hyp]);
        out.push_back(ref[op.ref]);
        ++r;
        break;
      case EditKind::kSubstitute:
        CHECK(ref[op.ref] != hyp[op.hyp]);
        out.push_back(hyp[op.hyp]);
        ++r;
        break;
      case EditKind::kDelete:
        ++r;
        break;
      case EditKind::kInsert:
        out.push_back(hyp[op.hyp]);
        break;
    }
  }
  CHECK(r == ref.size());
  return out;
}

std::vector<TextPair> Pairs(std::initializer_list<TextPair> list) { return list; }

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("alignment basics") {
  const auto same = Align(Chars("abc"), Chars("abc"));
  CHECK(same.cost == 0);
  CHECK(std::all_of(same.ops.begin(), same.ops.end(),
                    [](const EditOp& op) { return op.kind == EditKind::kMatch; }));
  const auto del = Align(std::vector<std::string>{"a"}, std::vector<std::string>{});
  CHECK(del.cost == 1);
  REQUIRE(del.ops.size() == 1);
  CHECK(del.ops[0].kind == EditKind::kDelete);
  CHECK(Align(Chars("kitten"), Chars("sitting")).cost == 3);
  CHECK(oracle::EditDistance(Chars("kitten"), Chars("sitting")) == 3);
}

TEST_CASE("tie-breaking prefers substitution over delete plus insert") {
  const auto a = Align(Chars("ab"), Chars("ac"));
  REQUIRE(a.ops.size() == 2);
  CHECK(a.ops[1].kind == EditKind::kSubstitute);
  // "ab" -> "ba": two substitutions beat delete/insert pairs of equal cost.
  const auto b = Align(Chars("ab"), Chars("ba"));
  CHECK(b.cost == 2);
  CHECK(b.ops.size() == 2);
}

TEST_CASE("alignment agrees with the recursive oracle and replays") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto a = RandomSeq(rng, 9, 3 + static_cast<int>(rng() % 3));
    const auto b = RandomSeq(rng, 9, 3 + static_cast<int>(rng() % 3));
    const auto al = Align(a, b);
    CHECK(al.cost == oracle::EditDistance(a, b));
    const auto edits = std::count_if(al.ops.begin(), al.ops.end(),
                                     [](const EditOp& op) { return op.kind != EditKind::kMatch; });
    CHECK(al.cost == edits);
    CHECK(Replay(a, b, al) == b);
  }
}

TEST_CASE("edit cost is symmetric and obeys the triangle inequality") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = RandomSeq(rng, 8, 3);
    const auto b = RandomSeq(rng, 8, 3);
    const auto c = RandomSeq(rng, 8, 3);
    const auto ab = Align(a, b).cost, ba = Align(b, a).cost;
    CHECK(ab == ba);
    CHECK(Align(a, c).cost <= ab + Align(b, c).cost);
  }
}

TEST_CASE("word error rate") {
  CHECK(WordErrorRate(Pairs({{"a b", "a b"}, {"c", "c"}})) == 0.0);
  CHECK(WordErrorRate(Pairs({{"a b", "a c d"}})) == 1.0);
  const auto counts = WordErrorCounts(Pairs({{"a b", "a c d"}}));
  CHECK(counts.substitutions == 1);
  CHECK(counts.insertions == 1);
  CHECK(counts.deletions == 0);
  CHECK(counts.reference_length == 2);
  // Long hypotheses push the rate past 1.
  CHECK(WordErrorRate(Pairs({{"a", "b c d"}})) == 3.0);
  // Pooled, not averaged per utterance: (0 + 2) / (1 + 4).
  CHECK(WordErrorRate(Pairs({{"a", "a"}, {"a b c d", "a b"}})) == doctest::Approx(0.4));
  CHECK_THROWS_WITH_AS(WordErrorRate(Pairs({{"a", "a"}, {" .. ", "x"}})),
                       doctest::Contains("pair 1"), Error);
  CHECK_THROWS_AS(WordErrorRate({}), Error);
}

TEST_CASE("normalization") {
  CHECK(WordErrorRate(Pairs({{"Habari, Yako!", "habari yako"}})) == 0.0);
  Normalization raw;
  raw.enabled = false;
  CHECK(WordErrorRate(Pairs({{"Habari, Yako!", "habari yako"}}), raw) == 1.0);
  CHECK(Normalize("  A\t\tb  ", {}) == "a b");
  CHECK(CharTokens("a  b", {}) == std::vector<std::string>{"a", " ", "b"});
  CHECK(CharTokens("ñA", {}) == std::vector<std::string>{"ñ", "a"});
}

TEST_CASE("word error rate ignores consistent case changes") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TextPair> pairs, upper;
    for (int i = 0; i < 3; ++i) {
      std::string r = testing::RandomWord(rng, 1, 5, 4) + " " + testing::RandomWord(rng, 1, 5, 4);
      std::string h = testing::RandomWord(rng, 0, 5, 4) + " " + testing::RandomWord(rng, 0, 5, 4);
      pairs.emplace_back(r, h);
      for (auto* s : {&r, &h}) {
        for (auto& c : *s) {
          if (rng() % 2) c = static_cast<char>(std::toupper(c));
        }
      }
      upper.emplace_back(r, h);
    }
    CHECK(WordErrorRate(pairs) == WordErrorRate(upper));
    CHECK(CharErrorRate(pairs) == CharErrorRate(upper));
  }
}

TEST_CASE("character error rate") {
  CHECK(CharErrorRate(Pairs({{"abc", "abc"}})) == 0.0);
  CHECK(CharErrorRate(Pairs({{"ab", "aa"}})) == 0.5);
  CHECK(CharErrorRate(Pairs({{"abc", ""}})) == 1.0);
  // The space between words is one token.
  CHECK(CharErrorRate(Pairs({{"a b", "ab"}})) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("reduction rates") {
  CHECK(ReductionRate(0.782, 0.200) == doctest::Approx(0.744).epsilon(0.001 / 0.744));
  CHECK(ReductionRate(0.844, 0.300) == doctest::Approx(0.645).epsilon(0.001 / 0.645));
  CHECK(ReductionRate(0.5, 0.5) == 0.0);
  CHECK(ReductionRate(0.5, 0.75) == -0.5);
  CHECK_THROWS_AS(ReductionRate(0.0, 0.1), Error);
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(0.001, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = u(rng), a = u(rng), b = u(rng);
    CHECK(ReductionRate(x, 0.0) == 1.0);
    if (a <= b) CHECK(ReductionRate(x, a) >= ReductionRate(x, b));
  }
}

TEST_CASE("per-character report") {
  const auto perfect = PerCharReport(Pairs({{"abc def", "abc def"}}));
  CHECK(perfect.outliers.empty());
  for (const auto& [c, p] : perfect.proportion) CHECK(p == 0.0);
  CHECK_FALSE(perfect.proportion.contains(" "));

  // Every letter once per sentence; "s" is always heard as "z".
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  std::string heard = alphabet;
  heard[alphabet.find('s')] = 'z';
  std::vector<TextPair> pairs;
  for (int i = 0; i < 10; ++i) pairs.emplace_back(alphabet, heard);
  const auto report = PerCharReport(pairs);
  CHECK(report.proportion.size() == 26);
  CHECK(report.proportion.at("s") == 1.0);
  CHECK(report.occurrences.at("s") == 10);
  CHECK(report.mean == doctest::Approx(1.0 / 26.0));
  CHECK(report.outliers == std::set<std::string>{"s"});

  // Relative mode flags everything that deviates by a quarter of the mean.
  const auto relative = PerCharReport(pairs, {}, OutlierMode::kRelative);
  CHECK(relative.outliers.size() == 26);
}

TEST_CASE("evaluate bundles both rates and the metadata") {
  const auto r = Evaluate(Pairs({{"Jambo rafiki.", "jambo rafiki"}, {"habari", "habai"}}));
  CHECK(r.wer == doctest::Approx(1.0 / 3.0));
  CHECK(r.cer == doctest::Approx(1.0 / 18.0));
  CHECK(r.normalization.enabled);
  CHECK(r.per_char.proportion.at("r") == 0.5);
}

TEST_CASE("A-B tallies") {
  std::vector<ABRecord> all_a;
  for (int i = 0; i < 20; ++i) all_a.push_back({"c" + std::to_string(i), Preference::kA});
  const auto t = TallyAB(all_a);
  CHECK(t.comparisons == 20);
  CHECK(t.wins_a == 20);
  CHECK(t.proportion_a() == 1.0);

  const auto empty = TallyAB({});
  CHECK(empty.comparisons == 0);
  CHECK(empty.wins_a == 0);
  CHECK(empty.wins_b == 0);

  std::vector<ABRecord> split;
  for (int i = 0; i < 20; ++i) {
    split.push_back({"c" + std::to_string(i), i < 12 ? Preference::kA : Preference::kB});
  }
  const auto s = TallyAB(split);
  CHECK(s.proportion_a() == doctest::Approx(0.6));
  CHECK(s.proportion_b() == doctest::Approx(0.4));
  CHECK(s.wins_a + s.wins_b <= s.comparisons);

  split.push_back({"c3", Preference::kB});
  CHECK_THROWS_AS(TallyAB(split), Error);
}

}  // TEST_SUITE

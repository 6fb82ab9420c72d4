#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "pivotforge/error.hpp"
#include "pivotforge/text.hpp"
#include "pivotforge/translit.hpp"

using namespace pivotforge;

namespace {

using RuleList = std::vector<std::pair<std::string, std::string>>;

PhoneMap MapOf(const RuleList& rules) {
  std::vector<RewriteRule> out;
  for (const auto& [src, repl] : rules) {
    out.push_back({text::Decode(src), text::Decode(repl), ""});
  }
  return PhoneMap("swh", "spa", std::move(out));
}

std::string SourceDir() { return PIVOTFORGE_SOURCE_DIR; }

// Random map of `count` distinct sources of length 1..3 over the first
// `alphabet` letters.
RuleList RandomRules(std::mt19937_64& rng, int alphabet, size_t count) {
  RuleList rules;
  std::set<std::string> seen;
  while (rules.size() < count) {
    auto src = testing::RandomWord(rng, 1, 3, alphabet);
    if (!seen.insert(src).second) continue;
    rules.emplace_back(src, testing::RandomWord(rng, 0, 3, 26));
  }
  return rules;
}

}  // namespace

TEST_SUITE("translit") {

TEST_CASE("jambo becomes chambo") {
  const auto map = MapOf({{"j", "ch"}, {"a", "a"}, {"m", "m"}, {"b", "b"}, {"o", "o"}});
  CHECK(Transliterate("jambo", map) == "chambo");
  CHECK(oracle::TransliterateStrict("jambo", {{"j", "ch"}, {"a", "a"}, {"m", "m"}, {"b", "b"},
                                              {"o", "o"}}) == "chambo");
  CHECK(Transliterate("", map) == "");
}

TEST_CASE("longer cluster wins") {
  const RuleList rules = {{"n", "n"}, {"ny", "ñ"}, {"a", "a"}};
  CHECK(Transliterate("nya", MapOf(rules)) == "ña");
  CHECK(oracle::TransliterateStrict("nya", rules) == "ña");
}

TEST_CASE("input is lowercased and replacements are not rescanned") {
  const auto map = MapOf({{"a", "b"}, {"b", "a"}, {"j", "ch"}, {"c", "k"}, {"h", "x"}});
  CHECK(Transliterate("AbJ", map) == "bach");
}

TEST_CASE("unmapped policies") {
  const auto map = MapOf({{"a", "a"}});
  CHECK(Transliterate("a b.", map, UnmappedPolicy::kCopy) == "a b.");
  CHECK(Transliterate("axa", map, UnmappedPolicy::kDrop) == "aa");
  CHECK(Transliterate("a, 42!", map) == "a, 42!");
  try {
    Transliterate("aqa", map);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
    CHECK(std::string(e.what()) == "unmapped grapheme 'q' (U+0071) at offset 1");
  }
}

TEST_CASE("explicit passthrough replaces the default classes") {
  const auto map = ParsePhoneMap("@map swh spa\n@passthrough -\na => e\n");
  CHECK(Transliterate("a-a a", map) == "e-e e");
  CHECK_THROWS_AS(Transliterate("a.", map), Error);
}

TEST_CASE("parse errors") {
  CHECK(ParsePhoneMap("").rules().empty());
  CHECK(ParsePhoneMap("# only a comment\n").rules().empty());
  CHECK_THROWS_WITH_AS(ParsePhoneMap("@map swh spa\nj => ch\nj => y\n"),
                       doctest::Contains("duplicate source 'j'"), Error);
  CHECK_THROWS_WITH_AS(ParsePhoneMap("a => b\n"), doctest::Contains("line 1"), Error);
  CHECK_THROWS_WITH_AS(ParsePhoneMap("@map swh\n"), doctest::Contains("line 1"), Error);
  CHECK_THROWS_WITH_AS(ParsePhoneMap("@map swh spa\n@nope\n"),
                       doctest::Contains("unknown directive"), Error);
  CHECK_THROWS_WITH_AS(ParsePhoneMap("@map swh spa\na b => c\n"),
                       doctest::Contains("whitespace"), Error);
  CHECK_THROWS_WITH_AS(ParsePhoneMap("@map swh spa\nab\n"), doctest::Contains("line 2"), Error);
}

TEST_CASE("comments, notes and an empty replacement") {
  const auto map = ParsePhoneMap(
      "# header comment\n"
      "@map swh spa\n"
      "\n"
      "ng' => n   # velar nasal\n"
      "h =>\n");
  REQUIRE(map.rules().size() == 2);
  CHECK(map.target_language() == "swh");
  CHECK(map.pivot_language() == "spa");
  CHECK(map.rules()[0].note == "velar nasal");
  CHECK(Transliterate("ng'h", map) == "n");
}

TEST_CASE("bundled swahili to spanish map") {
  const auto map = LoadPhoneMap(SourceDir() + "/data/maps/swh-spa.map");
  CHECK(map.pivot_language() == "spa");
  CHECK(Transliterate("jambo", map) == "chambo");
  CHECK(Transliterate("Nyumba ya shule", map) == "ñumba ya chule");
  CHECK(Transliterate("ng'ombe", map) == "nombe");
  // The 24 single letters of the Kiswahili alphabet (c only occurs in ch) plus the multigraphs.
  Manifest corpus;
  corpus.language = "swh";
  corpus.entries.push_back(testing::Utt("a", "abdefghijklmnoprstuvwyz, ch dh gh kh ng' ny sh th"));
  const auto report = CheckCoverage(map, corpus);
  CHECK(report.unmapped.empty());
}

TEST_CASE("coverage reports the apostrophe of ng' when only ng is mapped") {
  const auto map = MapOf({{"n", "n"}, {"g", "g"}, {"o", "o"}, {"m", "m"}, {"b", "b"}, {"e", "e"}});
  Manifest corpus;
  corpus.language = "swh";
  corpus.entries.push_back(testing::Utt("a", "ng'ombe ng'ombe"));
  corpus.entries.push_back(testing::Utt("b", "ng'o"));
  const auto report = CheckCoverage(map, corpus);
  REQUIRE(report.unmapped.size() == 1);
  CHECK(report.unmapped.at(U'\'') == 3);
  CHECK(report.mapped == std::set<char32_t>{U'n', U'g', U'o', U'm', U'b', U'e'});
}

TEST_CASE("coverage keeps mapped and unmapped disjoint") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rules = RandomRules(rng, 5, 4);
    Manifest corpus;
    corpus.language = "swh";
    for (int i = 0; i < 4; ++i) {
      corpus.entries.push_back(testing::Utt(std::to_string(i), testing::RandomWord(rng, 1, 8, 6)));
    }
    const auto report = CheckCoverage(MapOf(rules), corpus);
    for (char32_t c : report.mapped) CHECK_FALSE(report.unmapped.contains(c));
    for (const auto& [c, n] : report.unmapped) CHECK(n >= 1);
  }
}

TEST_CASE("matches the segmentation oracle on short strings") {
  std::mt19937_64 rng(17);
  const auto inputs = oracle::AllSequences(4, 5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rules = RandomRules(rng, 4, 5);
    const auto map = MapOf(rules);
    for (const auto& seq : inputs) {
      std::string input;
      for (int s : seq) input.push_back(static_cast<char>('a' + s));
      CHECK(Transliterate(input, map, UnmappedPolicy::kCopy) ==
            oracle::TransliterateCopy(input, rules));
      const auto strict = oracle::TransliterateStrict(input, rules);
      if (strict) {
        CHECK(Transliterate(input, map) == *strict);
      } else {
        CHECK_THROWS_AS(Transliterate(input, map), Error);
      }
    }
  }
}

TEST_CASE("output alphabet closure and length bound") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rules = RandomRules(rng, 3, 6);
    const auto map = MapOf(rules);
    std::set<char> allowed = {' '};
    size_t longest = 1;
    for (const auto& [src, repl] : rules) {
      allowed.insert(repl.begin(), repl.end());
      longest = std::max(longest, repl.size());
    }
    const std::string input = testing::RandomWord(rng, 0, 6, 3) + " " + testing::RandomWord(rng, 0, 6, 3);
    std::string out;
    try {
      out = Transliterate(input, map);
    } catch (const Error&) {
      continue;
    }
    for (char c : out) CHECK(allowed.contains(c));
    CHECK(out.size() <= input.size() * longest);
    CHECK(Transliterate(input, map) == out);
  }
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "pivotforge/error.hpp"
#include "pivotforge/pivot.hpp"

using namespace pivotforge;

namespace {

DistanceTable Read(const std::string& rows) {
  std::istringstream in("facet,lang_a,lang_b,distance\n" + rows);
  return ReadDistances(in);
}

std::vector<std::string> Codes(const PivotRanking& r) {
  std::vector<std::string> out;
  for (const auto& sp : r.scored) out.push_back(sp.code);
  return out;
}

// Table where composite(target, c_i) = scores[i] on both facets.
DistanceTable Flat(const std::string& target, const std::vector<std::pair<std::string, double>>& scores) {
  DistanceTable t;
  for (const auto& [code, d] : scores) {
    t.Add("geographic", target, code, d);
    t.Add("genetic", target, code, d);
  }
  return t;
}

}  // namespace

TEST_SUITE("pivot") {

TEST_CASE("table lookups are symmetric") {
  const auto t = Read("genetic,swh,ara,0.9\n");
  CHECK(t.Lookup("genetic", "ara", "swh") == 0.9);
  CHECK(t.Lookup("genetic", "swh", "ara") == 0.9);
  CHECK_FALSE(t.Lookup("geographic", "swh", "ara").has_value());
  CHECK(t.Lookup("genetic", "ita", "ita") == 0.0);
}

TEST_CASE("table validation") {
  CHECK_THROWS_WITH_AS(Read("genetic,swh,ara,1.3\n"), doctest::Contains("outside [0, 1]"), Error);
  CHECK_NOTHROW(Read("geographic,ita,ita,0.0\n"));
  CHECK_THROWS_WITH_AS(Read("geographic,ita,ita,0.1\n"), doctest::Contains("self-distance"), Error);
  CHECK_THROWS_WITH_AS(Read("genetic,a,b,0.1\ngenetic,b,a,0.2\n"), doctest::Contains("line 3"), Error);
  CHECK_NOTHROW(Read("genetic,a,b,0.1\ngenetic,b,a,0.1\n"));
  CHECK_THROWS_AS(Read("genetic,a,b\n"), Error);
  CHECK_THROWS_AS(Read("genetic,a,b,x\n"), Error);
  std::istringstream bad_header("a,b,c,d\n");
  CHECK_THROWS_AS(ReadDistances(bad_header), Error);
}

TEST_CASE("weights") {
  CHECK(DefaultWeights() == FacetWeights{{"geographic", 0.5}, {"genetic", 0.5}, {"phonological", 0.0}});
  const auto w = ParseWeights("geo=2,gen=1,phon=0.5");
  CHECK(w.at("geographic") == 2.0);
  CHECK(w.at("genetic") == 1.0);
  CHECK(w.at("phonological") == 0.5);
  CHECK_THROWS_AS(ParseWeights("geo=-1"), Error);
  CHECK_THROWS_AS(ParseWeights("geo"), Error);
  CHECK_THROWS_AS(ParseWeights("geo=1,geographic=2"), Error);
}

TEST_CASE("composite distance") {
  const auto t = Read("geographic,a,b,0.2\ngenetic,a,b,0.4\n");
  CHECK(CompositeDistance(t, "a", "b", {{"geographic", 1}, {"genetic", 1}}) == doctest::Approx(0.3));
  CHECK(CompositeDistance(t, "a", "a", {{"geographic", 1}}) == 0.0);
  const auto u = Read("geographic,a,b,0.3\ngenetic,a,b,0.6\n");
  CHECK(CompositeDistance(u, "a", "b", {{"geographic", 2}, {"genetic", 1}}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(CompositeDistance(t, "a", "b", {{"phonological", 1}}), Error);
  CHECK_THROWS_AS(CompositeDistance(t, "a", "b", {{"geographic", 0}}), Error);
}

TEST_CASE("ranking basics") {
  const auto one = RankPivots(Flat("grn", {{"spa", 0.4}}), "grn", {"spa"}, DefaultWeights());
  CHECK(Codes(one) == std::vector<std::string>{"spa"});
  CHECK(one.ties.empty());

  const auto tied = RankPivots(Flat("grn", {{"spa", 0.4}, {"fra", 0.4}}), "grn", {"spa", "fra"},
                               DefaultWeights());
  CHECK(Codes(tied) == std::vector<std::string>{"fra", "spa"});
  CHECK(tied.ties == std::vector<std::vector<std::string>>{{"fra", "spa"}});

  CHECK_THROWS_AS(RankPivots(Flat("grn", {}), "grn", {}, DefaultWeights()), Error);
  CHECK_THROWS_AS(RankPivots(Flat("grn", {{"spa", 0.4}}), "grn", {"grn", "spa"}, DefaultWeights()),
                  Error);
}

TEST_CASE("missing facets make a candidate unscorable") {
  DistanceTable t = Flat("grn", {{"spa", 0.3}});
  t.Add("geographic", "grn", "afr", 0.9);
  t.Add("phonological", "grn", "afr", 0.1);
  const auto r = RankPivots(t, "grn", {"spa", "afr", "tur"}, DefaultWeights());
  CHECK(Codes(r) == std::vector<std::string>{"spa"});
  CHECK(r.unscorable == std::vector<std::string>{"afr", "tur"});
  const auto phon = RankPivots(t, "grn", {"afr"}, ParseWeights("phon=1"));
  CHECK(Codes(phon) == std::vector<std::string>{"afr"});
}

TEST_CASE("guarani: spanish is strictly closest") {
  const auto t = Read(
      "geographic,grn,spa,0.25\ngenetic,grn,spa,1.0\n"
      "geographic,grn,fra,0.55\ngenetic,grn,fra,1.0\n"
      "geographic,grn,afr,0.60\ngenetic,grn,afr,1.0\nphonological,grn,afr,0.2\n");
  const auto r = RankPivots(t, "grn", {"fra", "afr", "spa"}, DefaultWeights());
  REQUIRE(r.scored.size() == 3);
  CHECK(r.scored.front().code == "spa");
  // Exhaustive comparison against every other candidate.
  for (const auto& other : {"fra", "afr"}) {
    CHECK(CompositeDistance(t, "grn", "spa", DefaultWeights()) <
          CompositeDistance(t, "grn", other, DefaultWeights()));
  }
}

TEST_CASE("shortlist") {
  const auto r = RankPivots(Flat("ita", {{"ron", 0.1}, {"fin", 0.5}, {"spa", 0.9}}), "ita",
                            {"spa", "fin", "ron"}, DefaultWeights());
  CHECK(Shortlist(r, 1) == std::vector<std::string>{"ron", "fin"});
  CHECK(Shortlist(r, 3) == std::vector<std::string>{"ron", "fin", "spa"});
  CHECK(Shortlist(r, 10) == std::vector<std::string>{"ron", "fin", "spa"});
  const auto two = RankPivots(Flat("ita", {{"ron", 0.2}, {"spa", 0.3}}), "ita", {"spa", "ron"},
                              DefaultWeights());
  CHECK(Shortlist(two, 2) == std::vector<std::string>{"ron", "spa"});
}

TEST_CASE("ranking invariances on random tables") {
  std::mt19937_64 rng(53);
  const std::vector<std::string> langs = {"ara", "spa", "fra", "ita", "tur", "afr", "fin", "ron"};
  for (int trial = 0; trial < 200; ++trial) {
    DistanceTable t;
    for (const auto& code : langs) {
      for (const char* facet : {"geographic", "genetic", "phonological"}) {
        if (rng() % 10 == 0) continue;
        // Coarse grid so that exact ties happen.
        t.Add(facet, "swh", code, static_cast<double>(rng() % 11) / 10.0);
      }
    }
    FacetWeights w = {{"geographic", static_cast<double>(1 + rng() % 4)},
                      {"genetic", static_cast<double>(rng() % 4)},
                      {"phonological", static_cast<double>(rng() % 3)}};
    auto candidates = langs;
    const auto base = RankPivots(t, "swh", candidates, w);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    CHECK(Codes(RankPivots(t, "swh", candidates, w)) == Codes(base));
    FacetWeights scaled = w;
    const double c = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
    for (auto& [facet, x] : scaled) x *= c;
    const auto rescaled = RankPivots(t, "swh", candidates, scaled);
    CHECK(Codes(rescaled) == Codes(base));
    CHECK(rescaled.unscorable == base.unscorable);
    for (size_t i = 1; i < base.scored.size(); ++i) {
      CHECK(base.scored[i - 1].composite <= base.scored[i].composite + kScoreTieTolerance);
    }
    CHECK(CompositeDistance(t, "spa", "spa", w) == 0.0);
  }
}

}  // TEST_SUITE

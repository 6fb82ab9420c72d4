#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace pivotforge {

inline constexpr std::string_view kGeographic = "geographic";
inline constexpr std::string_view kGenetic = "genetic";
inline constexpr std::string_view kPhonological = "phonological";

// Facet name -> nonnegative weight.
using FacetWeights = std::map<std::string, double>;

// Geographic 0.5, genetic 0.5, phonological 0.
FacetWeights DefaultWeights();

// "geo=0.5,gen=0.5"; accepts full facet names and the abbreviations
// geo, gen, phon (also phono).
FacetWeights ParseWeights(std::string_view spec);

// Pairwise typological distances per facet, kept symmetric.
class DistanceTable {
 public:
  DistanceTable();

  // Rejects values outside [0,1], nonzero self-distances and conflicts
  // with an existing value for the same unordered pair.
  void Add(const std::string& facet, const std::string& a, const std::string& b, double distance);

  // Self-distance is always 0.
  std::optional<double> Lookup(std::string_view facet, std::string_view a,
                               std::string_view b) const;

  const std::set<std::string>& facets() const { return facets_; }
  size_t size() const { return entries_.size(); }

 private:
  std::set<std::string> facets_;
  // (facet, min(a,b), max(a,b)) -> distance
  std::map<std::tuple<std::string, std::string, std::string>, double, std::less<>> entries_;
};

// CSV with header `facet,lang_a,lang_b,distance`.
DistanceTable ReadDistances(std::istream& in);
DistanceTable LoadDistances(const std::filesystem::path& path);

// Weighted mean over facets with positive weight.
double CompositeDistance(const DistanceTable& t, std::string_view a, std::string_view b,
                         const FacetWeights& weights);

struct ScoredPivot {
  std::string code;
  double composite = 0.0;
  std::map<std::string, double> per_facet;
};

struct PivotRanking {
  std::string target;
  std::vector<ScoredPivot> scored;         // ascending composite, ties by code
  std::vector<std::vector<std::string>> ties;  // groups of >= 2 equal scores
  std::vector<std::string> unscorable;     // missing a weighted facet; sorted
};

// Scores within this distance of their neighbour are treated as equal, so
// rescaling the weights cannot reorder candidates through rounding noise.
inline constexpr double kScoreTieTolerance = 1e-9;

PivotRanking RankPivots(const DistanceTable& t, const std::string& target,
                        const std::vector<std::string>& candidates, const FacetWeights& weights);

// The m best candidates, then the candidate whose composite score lies
// nearest the mean over all scored candidates when it is not already
// included.
std::vector<std::string> Shortlist(const PivotRanking& ranking, size_t m);

}  // namespace pivotforge

#include "pivotforge/pivot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "pivotforge/error.hpp"
#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

std::string CanonicalFacet(std::string_view name) {
  if (name == "geo") return std::string(kGeographic);
  if (name == "gen") return std::string(kGenetic);
  if (name == "phon" || name == "phono") return std::string(kPhonological);
  return std::string(name);
}

double ParseNumber(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(where + "invalid number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> SplitComma(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    out.push_back(text::Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string Pair(std::string_view a, std::string_view b) {
  return "(" + std::string(a) + ", " + std::string(b) + ")";
}

}  // namespace

FacetWeights DefaultWeights() {
  return {{std::string(kGeographic), 0.5},
          {std::string(kGenetic), 0.5},
          {std::string(kPhonological), 0.0}};
}

FacetWeights ParseWeights(std::string_view spec) {
  FacetWeights weights;
  for (auto item : SplitComma(spec)) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("weight '" + std::string(item) + "' is not of the form facet=value");
    }
    const auto facet = CanonicalFacet(text::Trim(item.substr(0, eq)));
    const double w = ParseNumber(text::Trim(item.substr(eq + 1)), "weights: ");
    if (w < 0.0) throw InvalidArgument("weight for '" + facet + "' is negative");
    if (!weights.emplace(facet, w).second) {
      throw InvalidArgument("facet '" + facet + "' weighted twice");
    }
  }
  return weights;
}

DistanceTable::DistanceTable()
    : facets_{std::string(kGeographic), std::string(kGenetic), std::string(kPhonological)} {}

void DistanceTable::Add(const std::string& facet, const std::string& a, const std::string& b,
                        double distance) {
  if (!(distance >= 0.0 && distance <= 1.0)) {
    throw InvalidArgument("distance " + std::to_string(distance) + " for " + facet + " " +
                          Pair(a, b) + " is outside [0, 1]");
  }
  if (a == b && distance != 0.0) {
    throw InvalidArgument("self-distance for " + facet + " " + Pair(a, b) + " must be 0");
  }
  auto key = a < b ? std::make_tuple(facet, a, b) : std::make_tuple(facet, b, a);
  const auto [it, inserted] = entries_.emplace(std::move(key), distance);
  if (!inserted && it->second != distance) {
    throw InvalidArgument("asymmetric or conflicting " + facet + " distance for " + Pair(a, b) +
                          ": " + std::to_string(it->second) + " vs " + std::to_string(distance));
  }
  facets_.insert(facet);
}

std::optional<double> DistanceTable::Lookup(std::string_view facet, std::string_view a,
                                            std::string_view b) const {
  if (a == b) return 0.0;
  const auto key = a < b ? std::make_tuple(facet, a, b) : std::make_tuple(facet, b, a);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

DistanceTable ReadDistances(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
  if (!std::getline(in, line)) throw ParseError("empty distance file: missing header");
  ++line_no;
  const auto header = SplitComma(text::Trim(line));
  if (header != std::vector<std::string_view>{"facet", "lang_a", "lang_b", "distance"}) {
    throw ParseError(where() + "expected header 'facet,lang_a,lang_b,distance'");
  }
  DistanceTable table;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::Trim(line);
    if (trimmed.empty()) continue;
    const auto fields = SplitComma(trimmed);
    if (fields.size() != 4) throw ParseError(where() + "expected 4 fields");
    if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw ParseError(where() + "empty facet or language code");
    }
    const double d = ParseNumber(fields[3], where());
    try {
      table.Add(CanonicalFacet(fields[0]), std::string(fields[1]), std::string(fields[2]), d);
    } catch (const Error& e) {
      throw Error(e.kind(), where() + e.what());
    }
  }
  return table;
}

DistanceTable LoadDistances(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open distance table '" + path.string() + "'");
  try {
    return ReadDistances(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

double CompositeDistance(const DistanceTable& t, std::string_view a, std::string_view b,
                         const FacetWeights& weights) {
  double total_weight = 0.0;
  double sum = 0.0;
  for (const auto& [facet, w] : weights) {
    if (w < 0.0) throw InvalidArgument("weight for '" + facet + "' is negative");
    if (w == 0.0) continue;
    const auto d = t.Lookup(facet, a, b);
    if (!d) throw InvalidArgument("missing " + facet + " distance for " + Pair(a, b));
    sum += w * *d;
    total_weight += w;
  }
  if (!(total_weight > 0.0)) throw InvalidArgument("facet weights must sum to a positive value");
  return sum / total_weight;
}

PivotRanking RankPivots(const DistanceTable& t, const std::string& target,
                        const std::vector<std::string>& candidates, const FacetWeights& weights) {
  if (candidates.empty()) throw InvalidArgument("no candidate pivot languages given");
  std::vector<std::string> unique(candidates);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (std::binary_search(unique.begin(), unique.end(), target)) {
    throw InvalidArgument("target '" + target + "' is listed among the candidates");
  }

  PivotRanking ranking;
  ranking.target = target;
  for (const auto& code : unique) {
    ScoredPivot sp;
    sp.code = code;
    bool complete = true;
    for (const auto& [facet, w] : weights) {
      if (w == 0.0) continue;
      const auto d = t.Lookup(facet, target, code);
      if (!d) {
        complete = false;
        break;
      }
      sp.per_facet[facet] = *d;
    }
    if (!complete) {
      ranking.unscorable.push_back(code);
      continue;
    }
    sp.composite = CompositeDistance(t, target, code, weights);
    ranking.scored.push_back(std::move(sp));
  }

  auto& scored = ranking.scored;
  std::sort(scored.begin(), scored.end(), [](const ScoredPivot& a, const ScoredPivot& b) {
    return a.composite != b.composite ? a.composite < b.composite : a.code < b.code;
  });
  // Chain near-equal neighbours into tie groups, each ordered by code.
  size_t begin = 0;
  while (begin < scored.size()) {
    size_t end = begin + 1;
    while (end < scored.size() &&
           scored[end].composite - scored[end - 1].composite <= kScoreTieTolerance) {
      ++end;
    }
    std::sort(scored.begin() + begin, scored.begin() + end,
              [](const ScoredPivot& a, const ScoredPivot& b) { return a.code < b.code; });
    if (end - begin > 1) {
      auto& group = ranking.ties.emplace_back();
      for (size_t i = begin; i < end; ++i) group.push_back(scored[i].code);
    }
    begin = end;
  }
  return ranking;
}

std::vector<std::string> Shortlist(const PivotRanking& ranking, size_t m) {
  if (m < 1) throw InvalidArgument("shortlist size must be at least 1");
  std::vector<std::string> out;
  const auto& scored = ranking.scored;
  for (size_t i = 0; i < std::min(m, scored.size()); ++i) out.push_back(scored[i].code);
  if (scored.empty()) return out;

  double mean = 0.0;
  for (const auto& sp : scored) mean += sp.composite;
  mean /= static_cast<double>(scored.size());
  size_t nearest = 0;
  for (size_t i = 1; i < scored.size(); ++i) {
    if (std::abs(scored[i].composite - mean) < std::abs(scored[nearest].composite - mean)) {
      nearest = i;
    }
  }
  if (std::find(out.begin(), out.end(), scored[nearest].code) == out.end()) {
    out.push_back(scored[nearest].code);
  }
  return out;
}

}  // namespace pivotforge

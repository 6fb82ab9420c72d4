#include "pivotforge/reports.hpp"

#include <cstdio>

#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

Json Counts(const ErrorCounts& c) {
  Json j;
  j["substitutions"] = c.substitutions;
  j["deletions"] = c.deletions;
  j["insertions"] = c.insertions;
  j["reference_length"] = c.reference_length;
  return j;
}

std::string Percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * rate);
  return buf;
}

}  // namespace

Json ToJson(const CorpusStats& stats) {
  Json j;
  j["utterances"] = stats.utterance_count;
  j["hours"] = stats.total_hours;
  j["speakers"] = stats.speaker_count;
  Json genders = Json::array();
  for (Gender g : stats.gender_mix) genders.push_back(ToString(g));
  j["genders"] = std::move(genders);
  j["missing_duration"] = stats.missing_duration;
  return j;
}

Json ToJson(const CoverageReport& report) {
  Json j;
  Json mapped = Json::array();
  for (char32_t c : report.mapped) mapped.push_back(text::Encode(c));
  Json unmapped = Json::object();
  for (const auto& [c, n] : report.unmapped) unmapped[text::Encode(c)] = n;
  j["mapped"] = std::move(mapped);
  j["unmapped"] = std::move(unmapped);
  return j;
}

Json ToJson(const PivotRanking& ranking, const std::vector<std::string>& shortlist) {
  Json j;
  j["target"] = ranking.target;
  Json scored = Json::array();
  for (const auto& sp : ranking.scored) {
    Json item;
    item["code"] = sp.code;
    item["composite"] = sp.composite;
    Json facets = Json::object();
    for (const auto& [facet, d] : sp.per_facet) facets[facet] = d;
    item["facets"] = std::move(facets);
    scored.push_back(std::move(item));
  }
  j["scored"] = std::move(scored);
  j["ties"] = ranking.ties;
  j["unscorable"] = ranking.unscorable;
  j["shortlist"] = shortlist;
  return j;
}

Json ToJson(const AugmentationPolicy& p) {
  Json j;
  j["authentic_count"] = p.authentic_count;
  j["duplication_factor"] = p.duplication_factor;
  j["synthetic_count"] = p.synthetic_count;
  j["balanced"] = p.balanced();
  j["total"] = p.total();
  return j;
}

Json ToJson(const ExperimentGrid& grid) {
  Json cells = Json::array();
  for (const auto& cell : grid.cells) {
    Json c = ToJson(cell.policy);
    c["label"] = cell.label;
    cells.push_back(std::move(c));
  }
  return cells;
}

Json ToJson(const EvalReport& report) {
  Json j;
  j["wer"] = report.wer;
  j["cer"] = report.cer;
  j["word_counts"] = Counts(report.word);
  j["char_counts"] = Counts(report.character);
  Json per_char = Json::object();
  for (const auto& [c, p] : report.per_char.proportion) {
    per_char[c] = {{"proportion", p}, {"occurrences", report.per_char.occurrences.at(c)}};
  }
  j["per_char"] = std::move(per_char);
  j["per_char_mean"] = report.per_char.mean;
  j["outliers"] = report.per_char.outliers;
  j["outlier_rule"] = {
      {"mode", report.per_char.mode == OutlierMode::kAbsolute ? "absolute" : "relative"},
      {"threshold", report.per_char.threshold},
      {"note", "deviation of a character's substitution+deletion proportion from the mean "
               "over characters"}};
  j["normalization"] = {{"enabled", report.normalization.enabled},
                        {"lowercase", report.normalization.lowercase},
                        {"strip", report.normalization.strip},
                        {"collapse_whitespace", true}};
  return j;
}

Json ToJson(const ABTally& tally) {
  Json j;
  j["comparisons"] = tally.comparisons;
  j["wins_a"] = tally.wins_a;
  j["wins_b"] = tally.wins_b;
  j["proportion_a"] = tally.proportion_a();
  j["proportion_b"] = tally.proportion_b();
  return j;
}

AugmentationPolicy PolicyFromJson(const nlohmann::json& j) {
  AugmentationPolicy p;
  p.authentic_count = j.at("authentic_count").get<int64_t>();
  p.duplication_factor = j.at("duplication_factor").get<int64_t>();
  p.synthetic_count = j.at("synthetic_count").get<int64_t>();
  Validate(p);
  return p;
}

std::string TsvRow(const EvalReport& report, const std::string& target, const std::string& pivot) {
  return target + "\t" + pivot + "\t" + Percent(report.wer) + "\t" + Percent(report.cer);
}

}  // namespace pivotforge

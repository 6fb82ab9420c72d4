#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pivotforge/corpus.hpp"
#include "pivotforge/eval.hpp"
#include "pivotforge/mix.hpp"
#include "pivotforge/pivot.hpp"
#include "pivotforge/translit.hpp"

namespace pivotforge {

// JSON renderings used by the command-line tool. Keys keep insertion order
// so the output is stable byte for byte.
using Json = nlohmann::ordered_json;

Json ToJson(const CorpusStats& stats);
Json ToJson(const CoverageReport& report);
Json ToJson(const PivotRanking& ranking, const std::vector<std::string>& shortlist);
Json ToJson(const AugmentationPolicy& policy);
Json ToJson(const ExperimentGrid& grid);
Json ToJson(const EvalReport& report);
Json ToJson(const ABTally& tally);

AugmentationPolicy PolicyFromJson(const nlohmann::json& j);

// target, pivot, WER %, CER % (tab separated).
std::string TsvRow(const EvalReport& report, const std::string& target, const std::string& pivot);

}  // namespace pivotforge

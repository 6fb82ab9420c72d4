#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pivotforge/corpus.hpp"
#include "pivotforge/eval.hpp"
#include "pivotforge/mix.hpp"
#include "pivotforge/translit.hpp"
#include "pivotforge/tts.hpp"

namespace pivotforge {

// Turns prompt entries into a synthesis job. With a phone map the provider
// reads the transliterated text while the manifest keeps the original
// transcript.
SynthesisJob MakeSynthesisJob(const Manifest& prompts, std::vector<Voice> voices,
                              const std::string& pivot_language, const PhoneMap* map = nullptr,
                              UnmappedPolicy on_unmapped = UnmappedPolicy::kError);

struct JoinedPairs {
  std::vector<TextPair> pairs;  // in reference order
  std::vector<std::string> missing_hypothesis;
  std::vector<std::string> missing_reference;
};

JoinedPairs JoinById(const Manifest& references, const Manifest& hypotheses);

struct PipelineConfig {
  std::string target_language;
  std::string pivot_language;  // empty: best-ranked candidate from the distance table
  std::filesystem::path authentic;
  std::filesystem::path prompt_pool;
  std::optional<std::filesystem::path> phone_map;
  std::optional<std::filesystem::path> distances;
  std::vector<std::string> candidates;
  std::string weights = "geo=0.5,gen=0.5";
  std::vector<std::filesystem::path> held_out;  // leakage check
  std::filesystem::path cache_dir;
  std::filesystem::path out_dir;
  std::string provider = "mock";
  std::string voices;  // "id[:M|F],..."
  std::optional<int64_t> authentic_count;
  std::optional<int64_t> duplication_factor;
  std::optional<int64_t> synthetic_count;
  PolicyLimits limits;
  int ngram = 2;
  size_t parallelism = 4;
  UnmappedPolicy on_unmapped = UnmappedPolicy::kError;
  uint64_t seed = 0;
};

// Reads a JSON config; relative paths resolve against `base_dir`. Unknown
// keys are rejected.
PipelineConfig ConfigFromJson(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::ordered_json ToJson(const PipelineConfig& config);

// Throws InvalidArgument when a referenced input path does not exist or a
// required field is missing.
void Validate(const PipelineConfig& config);

struct RunResult {
  std::filesystem::path prompts;
  std::filesystem::path synthetic;
  std::filesystem::path training;
  std::filesystem::path summary;
  std::filesystem::path resolved_config;
  AugmentationPolicy policy;
  int64_t cache_hits = 0;
  std::vector<std::pair<std::string, std::string>> synthesis_failures;
  nlohmann::ordered_json summary_json;
};

// select -> (transliterate) -> synthesize -> mix, writing every intermediate
// manifest under out_dir. Stage failures are rethrown prefixed with the
// stage name. `provider` overrides the configured backend.
RunResult RunPipeline(const PipelineConfig& config, TtsProvider* provider = nullptr);

}  // namespace pivotforge

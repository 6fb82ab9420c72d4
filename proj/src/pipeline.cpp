#include "pivotforge/pipeline.hpp"

#include <fstream>
#include <set>
#include <unordered_map>

#include "pivotforge/error.hpp"
#include "pivotforge/log.hpp"
#include "pivotforge/pivot.hpp"
#include "pivotforge/reports.hpp"
#include "pivotforge/select.hpp"
#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

namespace fs = std::filesystem;

template <typename Fn>
auto Stage(std::string_view name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "stage '" + std::string(name) + "': " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("stage '" + std::string(name) + "': " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw IoError("stage '" + std::string(name) + "': " + e.what());
  }
}

void WriteJson(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

double Hours(const Manifest& m) { return ComputeStats(m).total_hours; }

}  // namespace

SynthesisJob MakeSynthesisJob(const Manifest& prompts, std::vector<Voice> voices,
                              const std::string& pivot_language, const PhoneMap* map,
                              UnmappedPolicy on_unmapped) {
  SynthesisJob job;
  job.voices = std::move(voices);
  job.pivot_language = pivot_language;
  job.target_language = prompts.language;
  job.texts.reserve(prompts.entries.size());
  for (const auto& u : prompts.entries) {
    JobText t;
    t.id = u.id;
    t.text = u.text;
    if (map != nullptr) {
      try {
        t.tts_input = Transliterate(u.text, *map, on_unmapped);
      } catch (const Error& e) {
        throw Error(e.kind(), "utterance '" + u.id + "': " + e.what());
      }
      t.transliterated = true;
    } else {
      t.tts_input = u.text;
    }
    job.texts.push_back(std::move(t));
  }
  return job;
}

JoinedPairs JoinById(const Manifest& references, const Manifest& hypotheses) {
  JoinedPairs out;
  std::unordered_map<std::string_view, const Utterance*> hyp_by_id;
  for (const auto& u : hypotheses.entries) hyp_by_id.emplace(u.id, &u);
  std::set<std::string_view> matched;
  for (const auto& r : references.entries) {
    const auto it = hyp_by_id.find(r.id);
    if (it == hyp_by_id.end()) {
      out.missing_hypothesis.push_back(r.id);
      continue;
    }
    out.pairs.emplace_back(r.text, it->second->text);
    matched.insert(r.id);
  }
  for (const auto& h : hypotheses.entries) {
    if (!matched.contains(h.id)) out.missing_reference.push_back(h.id);
  }
  return out;
}

PipelineConfig ConfigFromJson(const nlohmann::json& j, const fs::path& base_dir) {
  static const std::set<std::string> kKeys = {
      "target_language", "pivot_language", "authentic",          "prompt_pool",
      "phone_map",       "distances",      "candidates",         "weights",
      "held_out",        "cache_dir",      "out_dir",            "provider",
      "voices",          "authentic_count", "duplication_factor", "synthetic_count",
      "synthetic_per_authentic", "synthetic_ceiling", "ngram", "parallelism",
      "on_unmapped",     "seed"};
  if (!j.is_object()) throw ParseError("pipeline config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ParseError("unknown pipeline config key '" + key + "'");
  }
  auto path = [&](const std::string& key) -> fs::path {
    fs::path p = j.at(key).get<std::string>();
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  PipelineConfig c;
  try {
    c.target_language = j.value("target_language", "");
    c.pivot_language = j.value("pivot_language", "");
    if (j.contains("authentic")) c.authentic = path("authentic");
    if (j.contains("prompt_pool")) c.prompt_pool = path("prompt_pool");
    if (j.contains("phone_map")) c.phone_map = path("phone_map");
    if (j.contains("distances")) c.distances = path("distances");
    if (j.contains("candidates")) c.candidates = j["candidates"].get<std::vector<std::string>>();
    c.weights = j.value("weights", c.weights);
    if (j.contains("held_out")) {
      for (const auto& p : j["held_out"]) {
        fs::path hp = p.get<std::string>();
        c.held_out.push_back(hp.is_relative() && !base_dir.empty() ? base_dir / hp : hp);
      }
    }
    if (j.contains("out_dir")) c.out_dir = path("out_dir");
    if (j.contains("cache_dir")) c.cache_dir = path("cache_dir");
    c.provider = j.value("provider", c.provider);
    c.voices = j.value("voices", c.voices);
    if (j.contains("authentic_count")) c.authentic_count = j["authentic_count"].get<int64_t>();
    if (j.contains("duplication_factor")) {
      c.duplication_factor = j["duplication_factor"].get<int64_t>();
    }
    if (j.contains("synthetic_count")) c.synthetic_count = j["synthetic_count"].get<int64_t>();
    c.limits.synthetic_per_authentic =
        j.value("synthetic_per_authentic", c.limits.synthetic_per_authentic);
    c.limits.synthetic_ceiling = j.value("synthetic_ceiling", c.limits.synthetic_ceiling);
    c.ngram = j.value("ngram", c.ngram);
    c.parallelism = j.value("parallelism", c.parallelism);
    c.on_unmapped = ParseUnmappedPolicy(j.value("on_unmapped", "error"));
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
  return c;
}

nlohmann::ordered_json ToJson(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["target_language"] = c.target_language;
  j["pivot_language"] = c.pivot_language;
  j["authentic"] = c.authentic.string();
  j["prompt_pool"] = c.prompt_pool.string();
  if (c.phone_map) j["phone_map"] = c.phone_map->string();
  if (c.distances) j["distances"] = c.distances->string();
  j["candidates"] = c.candidates;
  j["weights"] = c.weights;
  auto held = nlohmann::ordered_json::array();
  for (const auto& p : c.held_out) held.push_back(p.string());
  j["held_out"] = std::move(held);
  j["cache_dir"] = c.cache_dir.string();
  j["out_dir"] = c.out_dir.string();
  j["provider"] = c.provider;
  j["voices"] = c.voices;
  if (c.authentic_count) j["authentic_count"] = *c.authentic_count;
  if (c.duplication_factor) j["duplication_factor"] = *c.duplication_factor;
  if (c.synthetic_count) j["synthetic_count"] = *c.synthetic_count;
  j["synthetic_per_authentic"] = c.limits.synthetic_per_authentic;
  j["synthetic_ceiling"] = c.limits.synthetic_ceiling;
  j["ngram"] = c.ngram;
  j["parallelism"] = c.parallelism;
  j["on_unmapped"] = c.on_unmapped == UnmappedPolicy::kError  ? "error"
                     : c.on_unmapped == UnmappedPolicy::kCopy ? "copy"
                                                              : "drop";
  j["seed"] = c.seed;
  return j;
}

void Validate(const PipelineConfig& c) {
  if (c.target_language.empty()) throw InvalidArgument("config: target_language is required");
  if (c.out_dir.empty()) throw InvalidArgument("config: out_dir is required");
  auto require = [](const fs::path& p, const char* what) {
    if (p.empty()) throw InvalidArgument(std::string("config: ") + what + " is required");
    if (!fs::exists(p)) {
      throw InvalidArgument(std::string("config: ") + what + " '" + p.string() +
                            "' does not exist");
    }
  };
  require(c.authentic, "authentic");
  require(c.prompt_pool, "prompt_pool");
  if (c.phone_map) require(*c.phone_map, "phone_map");
  if (c.distances) require(*c.distances, "distances");
  for (const auto& p : c.held_out) require(p, "held_out");
  if (c.pivot_language.empty() && (!c.distances || c.candidates.empty())) {
    throw InvalidArgument("config: pivot_language, or distances plus candidates, is required");
  }
  if (c.parallelism < 1) throw InvalidArgument("config: parallelism must be at least 1");
  if (c.ngram != 1 && c.ngram != 2) throw InvalidArgument("config: ngram must be 1 or 2");
}

RunResult RunPipeline(const PipelineConfig& input, TtsProvider* provider) {
  PipelineConfig config = input;
  Stage("config", [&] { Validate(config); });
  if (config.cache_dir.empty()) config.cache_dir = config.out_dir / "tts-cache";
  fs::create_directories(config.out_dir);

  const LoadOptions load{Split::kTrain, config.target_language};
  const Manifest authentic =
      Stage("ingest", [&] { return LoadManifest(config.authentic, ManifestFormat::kJsonl, load); });
  const Manifest pool = Stage("ingest", [&] {
    return LoadManifest(config.prompt_pool, ManifestFormat::kJsonl,
                        {Split::kPool, config.target_language});
  });

  if (config.pivot_language.empty()) {
    config.pivot_language = Stage("rank-pivots", [&] {
      const auto table = LoadDistances(*config.distances);
      const auto ranking =
          RankPivots(table, config.target_language, config.candidates, ParseWeights(config.weights));
      if (ranking.scored.empty()) throw InvalidArgument("no candidate pivot could be scored");
      log::Info("rank-pivots", "selected pivot", {{"pivot", ranking.scored.front().code}});
      return ranking.scored.front().code;
    });
  }

  const ProviderKind kind = Stage("synth", [&] { return ParseProviderKind(config.provider); });
  if (config.voices.empty() && kind == ProviderKind::kMock) config.voices = "mock-0:F,mock-1:M";
  const auto voices =
      Stage("synth", [&] { return ParseVoices(config.voices, kind, config.pivot_language); });

  RunResult result;
  result.resolved_config = config.out_dir / "resolved_config.json";
  WriteJson(result.resolved_config, ToJson(config));

  // Policy from the authentic size and the eligible prompt supply.
  AugmentationPolicy policy = Stage("mix", [&] {
    const int64_t n = config.authentic_count.value_or(static_cast<int64_t>(authentic.entries.size()));
    int64_t eligible = 0;
    for (const auto& u : pool.entries) {
      if (text::Decode(u.text).size() <= kMaxPromptChars) ++eligible;
    }
    AugmentationPolicy p = RecommendPolicy(n, eligible, config.limits);
    if (config.synthetic_count) p.synthetic_count = *config.synthetic_count;
    if (config.duplication_factor) p.duplication_factor = *config.duplication_factor;
    Validate(p);
    return p;
  });
  log::Info("mix", "policy", ToJson(policy));

  Manifest prompts;
  prompts.split = Split::kPool;
  prompts.language = config.target_language;
  if (policy.synthetic_count > 0) {
    prompts = Stage("select", [&] {
      return SelectDiverse(pool, static_cast<size_t>(policy.synthetic_count), config.ngram);
    });
  }
  result.prompts = config.out_dir / "prompts.jsonl";
  SaveManifest(result.prompts, prompts, ManifestFormat::kJsonl);
  log::Info("select", "prompts selected", {{"count", prompts.entries.size()}});

  Manifest synthetic;
  synthetic.split = Split::kPool;
  synthetic.language = config.target_language;
  if (!prompts.entries.empty()) {
    std::optional<PhoneMap> map;
    if (config.phone_map) map = Stage("translit", [&] { return LoadPhoneMap(*config.phone_map); });
    const SynthesisJob job = Stage("translit", [&] {
      return MakeSynthesisJob(prompts, voices, config.pivot_language, map ? &*map : nullptr,
                              config.on_unmapped);
    });
    std::unique_ptr<TtsProvider> owned;
    if (provider == nullptr) {
      owned = Stage("synth", [&]() -> std::unique_ptr<TtsProvider> {
        if (kind == ProviderKind::kMock) return std::make_unique<MockProvider>();
        return CloudProvider::FromEnvironment(kind);
      });
      provider = owned.get();
    }
    SynthesisResult synth = Stage("synth", [&] {
      return SynthesizeCorpus(job, *provider, config.parallelism, config.cache_dir);
    });
    result.cache_hits = synth.cache_hits;
    result.synthesis_failures = synth.failures;
    for (const auto& [id, error] : synth.failures) {
      log::Warn("synth", "synthesis failed", {{"id", id}, {"error", error}});
    }
    log::Info("synth", "synthesis finished",
              {{"produced", synth.manifest.entries.size()},
               {"failures", synth.failures.size()},
               {"cache_hits", synth.cache_hits}});
    synthetic = std::move(synth.manifest);
  }
  result.synthetic = config.out_dir / "synthetic.jsonl";
  SaveManifest(result.synthetic, synthetic, ManifestFormat::kJsonl);

  // Failed prompts shrink S; rebalance d unless it was pinned.
  const auto produced = static_cast<int64_t>(synthetic.entries.size());
  if (produced < policy.synthetic_count) {
    const int64_t pinned_d = policy.duplication_factor;
    policy = RecommendPolicy(policy.authentic_count, produced,
                             {.synthetic_per_authentic = produced, .synthetic_ceiling = produced});
    if (config.duplication_factor) policy.duplication_factor = pinned_d;
  }
  result.policy = policy;

  const Manifest training = Stage("mix", [&] {
    Manifest train = BuildTrainingSet(authentic, synthetic, policy, config.seed);
    std::vector<Manifest> held;
    for (const auto& p : config.held_out) {
      held.push_back(LoadManifest(p, ManifestFormat::kJsonl, {Split::kTest, config.target_language}));
    }
    if (const auto leaked = FindLeakage(train, held); !leaked.empty()) {
      throw InvalidArgument(std::to_string(leaked.size()) +
                            " training ids also appear in held-out data, e.g. '" + leaked.front() +
                            "'");
    }
    return train;
  });
  result.training = config.out_dir / "train.jsonl";
  SaveManifest(result.training, training, ManifestFormat::kJsonl);

  int64_t authentic_copies = 0;
  int64_t synthetic_entries = 0;
  for (const auto& u : training.entries) {
    (u.source == Source::kSynthetic ? synthetic_entries : authentic_copies)++;
  }
  Json summary;
  summary["target_language"] = config.target_language;
  summary["pivot_language"] = config.pivot_language;
  summary["transliterated"] = config.phone_map.has_value();
  summary["policy"] = ToJson(policy);
  summary["counts"] = {{"authentic_available", authentic.entries.size()},
                       {"prompt_pool", pool.entries.size()},
                       {"prompts", prompts.entries.size()},
                       {"synthetic", synthetic.entries.size()},
                       {"synthesis_failures", result.synthesis_failures.size()},
                       {"training_entries", training.entries.size()},
                       {"training_authentic_copies", authentic_copies},
                       {"training_synthetic", synthetic_entries}};
  summary["hours"] = {{"synthetic", Hours(synthetic)}, {"training", Hours(training)}};
  summary["artifacts"] = {{"prompts", result.prompts.string()},
                          {"synthetic", result.synthetic.string()},
                          {"training", result.training.string()},
                          {"resolved_config", result.resolved_config.string()}};
  result.summary = config.out_dir / "run_summary.json";
  WriteJson(result.summary, summary);
  result.summary_json = std::move(summary);
  log::Info("run", "pipeline finished", {{"training_entries", training.entries.size()}});
  return result;
}

}  // namespace pivotforge

// pivotforge: command-line front end. Every subcommand wraps one library
// operation; `run` chains select, transliterate, synth and mix.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pivotforge/corpus.hpp"
#include "pivotforge/error.hpp"
#include "pivotforge/eval.hpp"
#include "pivotforge/log.hpp"
#include "pivotforge/mix.hpp"
#include "pivotforge/pipeline.hpp"
#include "pivotforge/pivot.hpp"
#include "pivotforge/reports.hpp"
#include "pivotforge/select.hpp"
#include "pivotforge/translit.hpp"
#include "pivotforge/tts.hpp"

namespace pf = pivotforge;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInternal = 70;

void Emit(const pf::Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw pf::IoError("cannot write '" + out_path + "'");
  out << j.dump(2) << '\n';
}

std::vector<std::string> SplitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int64_t> ParseIntList(const std::string& s) {
  std::vector<int64_t> out;
  for (const auto& item : SplitCsv(s)) {
    try {
      size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw pf::ParseError("invalid integer '" + item + "'");
    }
  }
  return out;
}

pf::Manifest Load(const std::string& path, const std::string& format = "jsonl",
                  pf::Split split = pf::Split::kPool, const std::string& language = "") {
  return pf::LoadManifest(path, pf::ParseManifestFormat(format), {split, language});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pivot-language TTS augmentation toolkit for low-resource ASR"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug|info|warn|error|off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a manifest and rewrite it as canonical JSONL");
  std::string ingest_in, ingest_format = "jsonl", ingest_out, ingest_split = "pool", ingest_lang;
  ingest->add_option("--input", ingest_in)->required();
  ingest->add_option("--format", ingest_format)->check(CLI::IsMember({"jsonl", "csv"}));
  ingest->add_option("--out", ingest_out)->required();
  ingest->add_option("--split", ingest_split)->check(CLI::IsMember({"train", "val", "test", "pool"}));
  ingest->add_option("--language", ingest_lang);

  // stats
  auto* stats = app.add_subcommand("stats", "Utterance, hour and speaker counts");
  std::string stats_in, stats_format = "jsonl";
  stats->add_option("--manifest", stats_in)->required();
  stats->add_option("--format", stats_format)->check(CLI::IsMember({"jsonl", "csv"}));

  // split
  auto* split = app.add_subcommand("split", "Seeded train/val/test split");
  std::string split_in, split_out;
  size_t split_train = 0, split_val = 0, split_test = 0;
  uint64_t split_seed = 0;
  split->add_option("--manifest", split_in)->required();
  split->add_option("--train", split_train)->required();
  split->add_option("--val", split_val)->required();
  split->add_option("--test", split_test)->required();
  split->add_option("--seed", split_seed);
  split->add_option("--out", split_out, "Directory for train/val/test.jsonl")->required();

  // select
  auto* select = app.add_subcommand("select", "Pick phonetically diverse TTS prompts");
  std::string select_in, select_out;
  size_t select_k = 0;
  int select_ngram = 2;
  select->add_option("--manifest", select_in)->required();
  select->add_option("--k", select_k)->required();
  select->add_option("--ngram", select_ngram)->check(CLI::IsMember({1, 2}));
  select->add_option("--out", select_out)->required();

  // translit
  auto* translit = app.add_subcommand("translit", "Rewrite text into pivot orthography");
  std::string tr_map, tr_text, tr_manifest, tr_out, tr_unmapped = "error";
  bool tr_coverage = false;
  translit->add_option("--map", tr_map)->required();
  auto* tr_text_opt = translit->add_option("--text", tr_text);
  auto* tr_manifest_opt = translit->add_option("--manifest", tr_manifest);
  tr_text_opt->excludes(tr_manifest_opt);
  translit->add_option("--out", tr_out);
  translit->add_option("--unmapped", tr_unmapped)->check(CLI::IsMember({"error", "copy", "drop"}));
  translit->add_flag("--coverage", tr_coverage, "Report graphemes the map leaves unmatched");

  // rank-pivots
  auto* rank = app.add_subcommand("rank-pivots", "Rank candidate pivots by typological distance");
  std::string rank_table, rank_target, rank_candidates, rank_weights = "geo=0.5,gen=0.5";
  size_t rank_m = 1;
  rank->add_option("--distances", rank_table)->required();
  rank->add_option("--target", rank_target)->required();
  rank->add_option("--candidates", rank_candidates)->required();
  rank->add_option("--weights", rank_weights);
  rank->add_option("--shortlist", rank_m);

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize prompts through a TTS provider");
  std::string syn_manifest, syn_pivot, syn_voices, syn_out, syn_map, syn_provider = "mock",
                                                                     syn_cache, syn_unmapped = "error";
  size_t syn_parallel = 4;
  synth->add_option("--manifest", syn_manifest)->required();
  synth->add_option("--pivot", syn_pivot)->required();
  synth->add_option("--voices", syn_voices)->required();
  synth->add_option("--out", syn_out)->required();
  synth->add_option("--translit-map", syn_map);
  synth->add_option("--unmapped", syn_unmapped)->check(CLI::IsMember({"error", "copy", "drop"}));
  synth->add_option("--provider", syn_provider)->check(CLI::IsMember({"mock", "cloud", "cloud_a", "cloud_b"}));
  synth->add_option("--cache-dir", syn_cache);
  synth->add_option("--parallelism", syn_parallel)->check(CLI::PositiveNumber);

  // mix
  auto* mix = app.add_subcommand("mix", "Build a duplicated-authentic plus synthetic training manifest");
  std::string mix_auth, mix_syn, mix_check, mix_out;
  std::optional<int64_t> mix_n, mix_d, mix_s;
  int64_t mix_ceiling = 8000;
  uint64_t mix_seed = 0;
  mix->add_option("--authentic", mix_auth)->required();
  mix->add_option("--synthetic", mix_syn)->required();
  mix->add_option("--n", mix_n, "Authentic count (default: all)");
  mix->add_option("--dup", mix_d, "Duplication factor (default: recommended)");
  mix->add_option("--synth-count", mix_s, "Synthetic count (default: recommended)");
  mix->add_option("--synth-ceiling", mix_ceiling, "Cap used by the recommendation");
  mix->add_option("--seed", mix_seed);
  mix->add_option("--check-against", mix_check, "Comma-separated held-out manifests");
  mix->add_option("--out", mix_out)->required();

  // grid
  auto* grid = app.add_subcommand("grid", "Emit an experiment grid as JSON");
  std::string grid_n = "300,1000,3900", grid_s = "0,4000,8000,14737", grid_d = "1", grid_out;
  grid->add_option("--authentic-sizes", grid_n);
  grid->add_option("--synthetic-sizes", grid_s);
  grid->add_option("--dup", grid_d);
  grid->add_option("--out", grid_out);

  // eval
  auto* eval = app.add_subcommand("eval", "WER/CER and per-character diagnostics");
  std::string ev_ref, ev_hyp, ev_format = "json", ev_target = "-", ev_pivot = "-", ev_out;
  bool ev_raw = false, ev_relative = false;
  eval->add_option("--ref", ev_ref)->required();
  eval->add_option("--hyp", ev_hyp)->required();
  eval->add_option("--format", ev_format)->check(CLI::IsMember({"json", "tsv"}));
  eval->add_flag("--no-normalize", ev_raw);
  eval->add_flag("--relative-outliers", ev_relative);
  eval->add_option("--target", ev_target, "Label for the tsv row");
  eval->add_option("--pivot", ev_pivot, "Label for the tsv row");
  eval->add_option("--out", ev_out);

  // run
  auto* run = app.add_subcommand("run", "Run select, transliterate, synth and mix from a config");
  std::string run_config, run_out, run_provider;
  std::optional<uint64_t> run_seed;
  run->add_option("--config", run_config)->required();
  run->add_option("--out", run_out, "Overrides out_dir");
  run->add_option("--provider", run_provider)->check(CLI::IsMember({"mock", "cloud", "cloud_a", "cloud_b"}));
  run->add_option("--seed", run_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error exits 1.
    return app.exit(e) == 0 ? 0 : 1;
  }

  static const std::map<std::string, pf::log::Level> kLevels = {
      {"debug", pf::log::Level::kDebug}, {"info", pf::log::Level::kInfo},
      {"warn", pf::log::Level::kWarn},   {"error", pf::log::Level::kError},
      {"off", pf::log::Level::kOff}};
  pf::log::SetLevel(kLevels.at(log_level));

  try {
    if (*ingest) {
      const auto m = Load(ingest_in, ingest_format, pf::ParseSplit(ingest_split), ingest_lang);
      pf::SaveManifest(ingest_out, m, pf::ManifestFormat::kJsonl);
      pf::log::Info("ingest", "manifest written", {{"entries", m.entries.size()}, {"out", ingest_out}});
    } else if (*stats) {
      Emit(pf::ToJson(pf::ComputeStats(Load(stats_in, stats_format))), "");
    } else if (*split) {
      const auto parts = pf::SplitManifest(Load(split_in), {split_train, split_val, split_test}, split_seed);
      pf::SaveManifest(fs::path(split_out) / "train.jsonl", parts.train, pf::ManifestFormat::kJsonl);
      pf::SaveManifest(fs::path(split_out) / "val.jsonl", parts.val, pf::ManifestFormat::kJsonl);
      pf::SaveManifest(fs::path(split_out) / "test.jsonl", parts.test, pf::ManifestFormat::kJsonl);
    } else if (*select) {
      const auto chosen = pf::SelectDiverse(Load(select_in), select_k, select_ngram);
      pf::SaveManifest(select_out, chosen, pf::ManifestFormat::kJsonl);
      pf::log::Info("select", "prompts selected",
                    {{"k", chosen.entries.size()}, {"types", pf::CoveredTypes(chosen, select_ngram)}});
    } else if (*translit) {
      const auto map = pf::LoadPhoneMap(tr_map);
      const auto policy = pf::ParseUnmappedPolicy(tr_unmapped);
      if (tr_coverage) {
        if (tr_manifest.empty()) throw pf::InvalidArgument("--coverage needs --manifest");
        Emit(pf::ToJson(pf::CheckCoverage(map, Load(tr_manifest))), tr_out);
      } else if (!tr_manifest.empty()) {
        auto m = Load(tr_manifest);
        for (auto& u : m.entries) u.text = pf::Transliterate(u.text, map, policy);
        if (tr_out.empty()) {
          pf::WriteManifest(std::cout, m, pf::ManifestFormat::kJsonl);
        } else {
          pf::SaveManifest(tr_out, m, pf::ManifestFormat::kJsonl);
        }
      } else {
        std::cout << pf::Transliterate(tr_text, map, policy) << '\n';
      }
    } else if (*rank) {
      const auto table = pf::LoadDistances(rank_table);
      const auto ranking =
          pf::RankPivots(table, rank_target, SplitCsv(rank_candidates), pf::ParseWeights(rank_weights));
      Emit(pf::ToJson(ranking, pf::Shortlist(ranking, rank_m)), "");
    } else if (*synth) {
      const auto prompts = Load(syn_manifest);
      const auto kind = pf::ParseProviderKind(syn_provider);
      std::optional<pf::PhoneMap> map;
      if (!syn_map.empty()) map = pf::LoadPhoneMap(syn_map);
      const auto job = pf::MakeSynthesisJob(prompts, pf::ParseVoices(syn_voices, kind, syn_pivot), syn_pivot,
                                            map ? &*map : nullptr, pf::ParseUnmappedPolicy(syn_unmapped));
      std::unique_ptr<pf::TtsProvider> provider;
      if (kind == pf::ProviderKind::kMock) {
        provider = std::make_unique<pf::MockProvider>();
      } else {
        provider = pf::CloudProvider::FromEnvironment(kind);
      }
      const fs::path cache = syn_cache.empty() ? fs::path(syn_out) / "tts-cache" : fs::path(syn_cache);
      const auto result = pf::SynthesizeCorpus(job, *provider, syn_parallel, cache);
      pf::SaveManifest(fs::path(syn_out) / "synthetic.jsonl", result.manifest, pf::ManifestFormat::kJsonl);
      for (const auto& [id, error] : result.failures) {
        pf::log::Warn("synth", "synthesis failed", {{"id", id}, {"error", error}});
      }
      pf::log::Info("synth", "synthesis finished",
                    {{"produced", result.manifest.entries.size()},
                     {"failures", result.failures.size()},
                     {"cache_hits", result.cache_hits}});
    } else if (*mix) {
      const auto authentic = Load(mix_auth, "jsonl", pf::Split::kTrain);
      const auto synthetic = Load(mix_syn, "jsonl", pf::Split::kPool, authentic.language);
      const int64_t n = mix_n.value_or(static_cast<int64_t>(authentic.entries.size()));
      pf::AugmentationPolicy policy = pf::RecommendPolicy(
          n, static_cast<int64_t>(synthetic.entries.size()), {.synthetic_ceiling = mix_ceiling});
      if (mix_s) policy.synthetic_count = *mix_s;
      if (mix_d) policy.duplication_factor = *mix_d;
      const auto train = pf::BuildTrainingSet(authentic, synthetic, policy, mix_seed);
      std::vector<pf::Manifest> held;
      for (const auto& path : SplitCsv(mix_check)) held.push_back(Load(path, "jsonl", pf::Split::kTest));
      if (const auto leaked = pf::FindLeakage(train, held); !leaked.empty()) {
        throw pf::InvalidArgument(std::to_string(leaked.size()) +
                                  " training ids leak into held-out data, e.g. '" + leaked.front() + "'");
      }
      pf::SaveManifest(mix_out, train, pf::ManifestFormat::kJsonl);
      pf::log::Info("mix", "training manifest written", pf::ToJson(policy));
    } else if (*grid) {
      Emit(pf::ToJson(pf::MakeGrid(ParseIntList(grid_n), ParseIntList(grid_s), ParseIntList(grid_d))),
           grid_out);
    } else if (*eval) {
      const auto joined = pf::JoinById(Load(ev_ref), Load(ev_hyp));
      if (!joined.missing_hypothesis.empty() || !joined.missing_reference.empty()) {
        pf::log::Warn("eval", "unmatched ids",
                      {{"missing_hypothesis", joined.missing_hypothesis},
                       {"missing_reference", joined.missing_reference}});
      }
      pf::Normalization norm;
      norm.enabled = !ev_raw;
      const auto report = pf::Evaluate(
          joined.pairs, norm, ev_relative ? pf::OutlierMode::kRelative : pf::OutlierMode::kAbsolute);
      if (ev_format == "tsv") {
        std::cout << pf::TsvRow(report, ev_target, ev_pivot) << '\n';
      } else {
        auto j = pf::ToJson(report);
        j["pairs"] = joined.pairs.size();
        j["unmatched"] = {{"missing_hypothesis", joined.missing_hypothesis},
                          {"missing_reference", joined.missing_reference}};
        Emit(j, ev_out);
      }
    } else if (*run) {
      std::ifstream in(run_config);
      if (!in) throw pf::IoError("cannot open config '" + run_config + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw pf::ParseError(run_config + ": " + e.what());
      }
      auto config = pf::ConfigFromJson(j, fs::path(run_config).parent_path());
      if (!run_out.empty()) config.out_dir = run_out;
      if (!run_provider.empty()) config.provider = run_provider;
      if (run_seed) config.seed = *run_seed;
      const auto result = pf::RunPipeline(config);
      std::cout << result.summary_json.dump(2) << '\n';
    }
  } catch (const pf::Error& e) {
    pf::log::Write(pf::log::Level::kError, app.get_subcommands().front()->get_name(), e.what());
    return pf::ExitCode(e.kind());
  } catch (const std::exception& e) {
    pf::log::Write(pf::log::Level::kError, app.get_subcommands().front()->get_name(), e.what());
    return kExitInternal;
  }
  return 0;
}

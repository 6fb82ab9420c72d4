#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pivotforge {

enum class Gender { kMale, kFemale, kUnknown };
enum class Source { kAuthentic, kSynthetic, kNoise };
enum class Split { kTrain, kVal, kTest, kPool };
enum class ManifestFormat { kJsonl, kCsv };

std::string_view ToString(Gender g);
std::string_view ToString(Source s);
std::string_view ToString(Split s);
Gender ParseGender(std::string_view s);
Source ParseSource(std::string_view s);
Split ParseSplit(std::string_view s);
ManifestFormat ParseManifestFormat(std::string_view s);

// Where a synthetic utterance came from.
struct Provenance {
  std::string provider;
  std::string voice_id;
  std::string pivot_language;
  bool transliterated = false;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Utterance {
  std::string id;
  std::string text;
  std::optional<std::string> audio_ref;
  std::optional<double> duration_s;
  std::string speaker_id;
  Gender gender = Gender::kUnknown;
  std::string language;  // ISO-639-3 of the transcript
  Source source = Source::kAuthentic;
  std::optional<Provenance> provenance;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

// Throws InvalidArgument if the utterance breaks a field invariant
// (empty id, negative duration, synthetic without pivot provenance).
void Validate(const Utterance& u);

struct Manifest {
  std::vector<Utterance> entries;
  Split split = Split::kPool;
  std::string language;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

// Checks id uniqueness, per-entry invariants and that every entry's
// language matches the manifest language.
void Validate(const Manifest& m);

struct CorpusStats {
  int64_t utterance_count = 0;
  double total_hours = 0.0;
  int64_t speaker_count = 0;
  std::set<Gender> gender_mix;
  int64_t missing_duration = 0;
};

struct LoadOptions {
  Split split = Split::kPool;
  // Empty: taken from the first entry that declares a language. Entries
  // without a language inherit the manifest language.
  std::string language;
};

Manifest ReadManifest(std::istream& in, ManifestFormat format, const LoadOptions& options = {});
Manifest LoadManifest(const std::filesystem::path& path, ManifestFormat format,
                      const LoadOptions& options = {});

void WriteManifest(std::ostream& out, const Manifest& m, ManifestFormat format);
void SaveManifest(const std::filesystem::path& path, const Manifest& m, ManifestFormat format);

struct SplitCounts {
  size_t train = 0;
  size_t val = 0;
  size_t test = 0;
};

struct SplitResult {
  Manifest train;
  Manifest val;
  Manifest test;
};

// Seeded permutation, then consecutive slices of the requested sizes.
SplitResult SplitManifest(const Manifest& m, SplitCounts counts, uint64_t seed);

CorpusStats ComputeStats(const Manifest& m);

}  // namespace pivotforge

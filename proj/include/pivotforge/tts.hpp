#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pivotforge/corpus.hpp"
#include "pivotforge/error.hpp"

namespace pivotforge {

// Canonical audio: 16 kHz, 16-bit signed PCM, mono, RIFF/WAVE.
inline constexpr int kSampleRate = 16000;
inline constexpr std::string_view kAudioFormat = "wav-pcm16-16000hz-mono";

std::string EncodeWav(std::span<const int16_t> samples);
// Duration in seconds of a canonical WAV; throws ParseError on any other
// layout.
double WavDuration(std::string_view wav);

enum class ProviderKind { kCloudA, kCloudB, kMock };

std::string_view ToString(ProviderKind p);
ProviderKind ParseProviderKind(std::string_view s);

struct Voice {
  ProviderKind provider = ProviderKind::kMock;
  std::string voice_id;
  std::string language;  // pivot language
  Gender gender = Gender::kUnknown;
};

// "id" or "id:M" / "id:F", comma separated.
std::vector<Voice> ParseVoices(std::string_view spec, ProviderKind provider,
                               const std::string& language);

struct Audio {
  std::string wav;
  double duration_s = 0.0;
};

class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, bool retryable)
      : Error(ErrorKind::kProvider, message), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class TtsProvider {
 public:
  virtual ~TtsProvider() = default;
  virtual std::string name() const = 0;
  virtual size_t max_chars() const { return 5000; }
  // Raw provider call, no retries. Throws ProviderError.
  virtual Audio Synthesize(const std::string& text, const Voice& voice) = 0;
};

// Offline provider: each character becomes a 20 ms triangle-wave segment
// whose pitch depends on the code point and the voice id (whitespace is
// silence). Output is a pure function of (text, voice_id).
class MockProvider final : public TtsProvider {
 public:
  static constexpr int kSamplesPerChar = kSampleRate / 50;

  std::string name() const override { return "mock"; }
  Audio Synthesize(const std::string& text, const Voice& voice) override;

  int64_t calls() const { return calls_.load(); }

 private:
  std::atomic<int64_t> calls_{0};
};

// JSON over HTTP(S): POST {text, voice_id, audio_config} and expect
// {"audio": <base64 wav>}. 408, 429, 5xx and transport failures are
// retryable; other statuses are rejections.
class CloudProvider final : public TtsProvider {
 public:
  CloudProvider(std::string url, std::string api_key, ProviderKind kind = ProviderKind::kCloudA);
  // Reads PIVOTFORGE_TTS_URL and PIVOTFORGE_TTS_KEY.
  static std::unique_ptr<CloudProvider> FromEnvironment(ProviderKind kind = ProviderKind::kCloudA);

  std::string name() const override { return std::string(ToString(kind_)); }
  Audio Synthesize(const std::string& text, const Voice& voice) override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::string api_key_;
  ProviderKind kind_;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleeping the thread
};

// Validates the text, then calls the provider with exponential backoff on
// retryable failures.
Audio Synthesize(TtsProvider& provider, const std::string& text, const Voice& voice,
                 const RetryPolicy& retry = {});

struct JobText {
  std::string id;
  std::string text;      // transcript stored in the output manifest
  std::string tts_input;  // what the provider reads (transliterated or not)
  bool transliterated = false;
};

struct SynthesisJob {
  std::vector<JobText> texts;
  std::vector<Voice> voices;  // round-robin by text index
  std::string pivot_language;
  std::string target_language;
};

struct SynthesisResult {
  Manifest manifest;  // ordered as the job texts, failures omitted
  std::vector<std::pair<std::string, std::string>> failures;  // (id, error)
  int64_t cache_hits = 0;
};

// "tts-<pivot>-<id>"
std::string SyntheticId(const std::string& pivot, const std::string& id);

// Hex SHA-256 of (provider, voice id, text, audio format).
std::string CacheKey(std::string_view provider, std::string_view voice_id, std::string_view text);

// Results are cached as <cache_dir>/<key>.wav plus a <key>.json sidecar.
// Up to `parallelism` provider requests are in flight at once.
SynthesisResult SynthesizeCorpus(const SynthesisJob& job, TtsProvider& provider,
                                 size_t parallelism, const std::filesystem::path& cache_dir,
                                 const RetryPolicy& retry = {});

}  // namespace pivotforge

#include "pivotforge/tts.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "pivotforge/codec.hpp"
#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

namespace fs = std::filesystem;

void PutLe(std::string& out, uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t GetLe(std::string_view in, size_t pos, int bytes) {
  uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(in[pos + i]);
  return v;
}

uint32_t Fnv1a(std::string_view s) {
  uint32_t h = 2166136261u;
  for (char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 16777619u;
  }
  return h;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write-then-rename so concurrent readers never see a partial file.
void WriteFileAtomic(const fs::path& path, std::string_view data) {
  static std::atomic<uint64_t> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move cache file into place at '" + path.string() + "'");
  }
}

void EnsureWritableDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cache dir '" + dir.string() + "' cannot be created");
  }
  const fs::path probe = dir / (".probe." + std::to_string(::getpid()));
  {
    std::ofstream out(probe, std::ios::binary);
    if (!out || !(out << 'x') || !out.flush()) {
      throw IoError("cache dir '" + dir.string() + "' is not writable");
    }
  }
  fs::remove(probe, ec);
}

}  // namespace

std::string EncodeWav(std::span<const int16_t> samples) {
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutLe(out, 36 + data_bytes, 4);
  out += "WAVEfmt ";
  PutLe(out, 16, 4);  // fmt chunk size
  PutLe(out, 1, 2);   // PCM
  PutLe(out, 1, 2);   // mono
  PutLe(out, kSampleRate, 4);
  PutLe(out, kSampleRate * 2, 4);  // byte rate
  PutLe(out, 2, 2);                // block align
  PutLe(out, 16, 2);               // bits per sample
  out += "data";
  PutLe(out, data_bytes, 4);
  for (int16_t s : samples) PutLe(out, static_cast<uint16_t>(s), 2);
  return out;
}

double WavDuration(std::string_view wav) {
  if (wav.size() < 44 || wav.substr(0, 4) != "RIFF" || wav.substr(8, 4) != "WAVE") {
    throw ParseError("audio is not a RIFF/WAVE file");
  }
  size_t pos = 12;
  bool have_fmt = false;
  while (pos + 8 <= wav.size()) {
    const auto id = wav.substr(pos, 4);
    const uint32_t size = GetLe(wav, pos + 4, 4);
    const size_t body = pos + 8;
    if (body + size > wav.size() && id != "data") throw ParseError("truncated WAV chunk");
    if (id == "fmt ") {
      if (size < 16 || GetLe(wav, body, 2) != 1 || GetLe(wav, body + 2, 2) != 1 ||
          GetLe(wav, body + 4, 4) != kSampleRate || GetLe(wav, body + 14, 2) != 16) {
        throw ParseError("audio is not 16 kHz 16-bit mono PCM");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("WAV data chunk precedes fmt chunk");
      if (body + size > wav.size()) throw ParseError("truncated WAV data chunk");
      return static_cast<double>(size / 2) / kSampleRate;
    }
    pos = body + size + (size & 1);
  }
  throw ParseError("WAV has no data chunk");
}

std::string_view ToString(ProviderKind p) {
  switch (p) {
    case ProviderKind::kCloudA:
      return "cloud_a";
    case ProviderKind::kCloudB:
      return "cloud_b";
    case ProviderKind::kMock:
      break;
  }
  return "mock";
}

ProviderKind ParseProviderKind(std::string_view s) {
  if (s == "mock") return ProviderKind::kMock;
  if (s == "cloud" || s == "cloud_a") return ProviderKind::kCloudA;
  if (s == "cloud_b") return ProviderKind::kCloudB;
  throw ParseError("unknown TTS provider '" + std::string(s) + "'");
}

std::vector<Voice> ParseVoices(std::string_view spec, ProviderKind provider,
                               const std::string& language) {
  std::vector<Voice> voices;
  size_t start = 0;
  while (start <= spec.size()) {
    const size_t comma = std::min(spec.find(',', start), spec.size());
    const auto item = text::Trim(spec.substr(start, comma - start));
    start = comma + 1;
    if (item.empty()) continue;
    Voice v;
    v.provider = provider;
    v.language = language;
    const auto colon = item.rfind(':');
    if (colon != std::string_view::npos) {
      v.voice_id = std::string(item.substr(0, colon));
      v.gender = ParseGender(item.substr(colon + 1));
    } else {
      v.voice_id = std::string(item);
    }
    if (v.voice_id.empty()) throw InvalidArgument("empty voice id in '" + std::string(spec) + "'");
    voices.push_back(std::move(v));
  }
  if (voices.empty()) throw InvalidArgument("at least one voice is required");
  return voices;
}

Audio MockProvider::Synthesize(const std::string& text, const Voice& voice) {
  ++calls_;
  const std::u32string chars = text::Decode(text);
  const uint32_t voice_offset = (Fnv1a(voice.voice_id) % 50) * 3;
  std::vector<int16_t> samples;
  samples.reserve(chars.size() * kSamplesPerChar);
  for (char32_t c : chars) {
    if (text::IsSpace(c)) {
      samples.insert(samples.end(), kSamplesPerChar, 0);
      continue;
    }
    const uint32_t freq = 180 + (static_cast<uint32_t>(c) % 97) * 17 + voice_offset;
    const uint32_t step = static_cast<uint32_t>((uint64_t{freq} << 32) / kSampleRate);
    uint32_t phase = 0;
    for (int i = 0; i < kSamplesPerChar; ++i) {
      const int32_t ramp = static_cast<int32_t>(phase >> 16);  // 0..65535
      const int32_t tri = 2 * std::abs(ramp - 32768) - 32768;  // -32768..32766
      samples.push_back(static_cast<int16_t>(tri / 4));
      phase += step;
    }
  }
  Audio audio;
  audio.wav = EncodeWav(samples);
  audio.duration_s = static_cast<double>(samples.size()) / kSampleRate;
  return audio;
}

Audio Synthesize(TtsProvider& provider, const std::string& text, const Voice& voice,
                 const RetryPolicy& retry) {
  if (text.empty()) throw InvalidArgument("cannot synthesize empty text");
  const size_t length = text::Decode(text).size();
  if (length > provider.max_chars()) {
    throw InvalidArgument("text of " + std::to_string(length) + " characters exceeds the " +
                          std::to_string(provider.max_chars()) + "-character provider limit");
  }
  if (voice.voice_id.empty()) throw InvalidArgument("voice id must be nonempty");
  auto backoff = retry.initial_backoff;
  const int attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      return provider.Synthesize(text, voice);
    } catch (const ProviderError& e) {
      if (!e.retryable()) throw;
      if (attempt >= attempts) {
        throw ProviderError("retries exhausted after " + std::to_string(attempt) +
                                " attempts: " + e.what(),
                            false);
      }
    }
    if (retry.sleep) {
      retry.sleep(backoff);
    } else {
      std::this_thread::sleep_for(backoff);
    }
    backoff = std::chrono::milliseconds(
        static_cast<int64_t>(static_cast<double>(backoff.count()) * retry.multiplier));
  }
}

std::string SyntheticId(const std::string& pivot, const std::string& id) {
  return "tts-" + pivot + "-" + id;
}

std::string CacheKey(std::string_view provider, std::string_view voice_id, std::string_view text) {
  std::string material;
  material.reserve(provider.size() + voice_id.size() + text.size() + kAudioFormat.size() + 3);
  material.append(provider).push_back('\0');
  material.append(voice_id).push_back('\0');
  material.append(text).push_back('\0');
  material.append(kAudioFormat);
  return codec::Sha256Hex(material);
}

SynthesisResult SynthesizeCorpus(const SynthesisJob& job, TtsProvider& provider,
                                 size_t parallelism, const fs::path& cache_dir,
                                 const RetryPolicy& retry) {
  if (job.texts.empty()) throw InvalidArgument("synthesis job has no texts");
  if (job.voices.empty()) throw InvalidArgument("synthesis job has no voices");
  if (parallelism < 1) throw InvalidArgument("parallelism must be at least 1");
  for (const auto& v : job.voices) {
    if (v.voice_id.empty()) throw InvalidArgument("voice id must be nonempty");
    if (v.language != job.pivot_language) {
      throw InvalidArgument("voice '" + v.voice_id + "' speaks '" + v.language +
                            "', not the pivot language '" + job.pivot_language + "'");
    }
  }
  EnsureWritableDir(cache_dir);

  struct Slot {
    std::optional<Utterance> utterance;
    std::string error;
    bool cache_hit = false;
  };
  std::vector<Slot> slots(job.texts.size());
  const std::string provider_name = provider.name();

  auto process = [&](size_t i) {
    const JobText& item = job.texts[i];
    const Voice& voice = job.voices[i % job.voices.size()];
    const std::string& input = item.tts_input.empty() ? item.text : item.tts_input;
    const std::string key = CacheKey(provider_name, voice.voice_id, input);
    const fs::path wav_path = cache_dir / (key + ".wav");
    const fs::path meta_path = cache_dir / (key + ".json");

    double duration = 0.0;
    bool hit = false;
    if (fs::exists(wav_path) && fs::exists(meta_path)) {
      try {
        duration = WavDuration(ReadFile(wav_path));
        hit = true;
      } catch (const Error&) {
        hit = false;  // corrupt entry; resynthesize
      }
    }
    if (!hit) {
      Audio audio = Synthesize(provider, input, voice, retry);
      duration = WavDuration(audio.wav);
      nlohmann::ordered_json meta;
      meta["provider"] = provider_name;
      meta["voice_id"] = voice.voice_id;
      meta["text"] = input;
      meta["format"] = kAudioFormat;
      meta["settings"] = "provider defaults";
      meta["duration_s"] = duration;
      WriteFileAtomic(wav_path, audio.wav);
      WriteFileAtomic(meta_path, meta.dump(2) + "\n");
    }

    Utterance u;
    u.id = SyntheticId(job.pivot_language, item.id);
    u.text = item.text;
    u.audio_ref = wav_path.string();
    u.duration_s = duration;
    u.speaker_id = voice.voice_id;
    u.gender = voice.gender;
    u.language = job.target_language;
    u.source = Source::kSynthetic;
    u.provenance = Provenance{provider_name, voice.voice_id, job.pivot_language,
                              item.transliterated};
    slots[i].utterance = std::move(u);
    slots[i].cache_hit = hit;
  };

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < slots.size(); i = next++) {
      try {
        process(i);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const size_t threads = std::min(parallelism, slots.size());
    for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  SynthesisResult result;
  result.manifest.split = Split::kPool;
  result.manifest.language = job.target_language;
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].utterance) {
      result.manifest.entries.push_back(std::move(*slots[i].utterance));
      if (slots[i].cache_hit) ++result.cache_hits;
    } else {
      result.failures.emplace_back(job.texts[i].id, slots[i].error);
    }
  }
  return result;
}

}  // namespace pivotforge

#include <httplib.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "pivotforge/codec.hpp"
#include "pivotforge/tts.hpp"

namespace pivotforge {

namespace {

bool Retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

CloudProvider::CloudProvider(std::string url, std::string api_key, ProviderKind kind)
    : api_key_(std::move(api_key)), kind_(kind) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("TTS endpoint '" + url + "' lacks a scheme (http:// or https://)");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::unique_ptr<CloudProvider> CloudProvider::FromEnvironment(ProviderKind kind) {
  const char* url = std::getenv("PIVOTFORGE_TTS_URL");
  const char* key = std::getenv("PIVOTFORGE_TTS_KEY");
  if (url == nullptr || *url == '\0') {
    throw InvalidArgument("PIVOTFORGE_TTS_URL is not set");
  }
  return std::make_unique<CloudProvider>(url, key ? key : "", kind);
}

Audio CloudProvider::Synthesize(const std::string& text, const Voice& voice) {
  httplib::Client client(origin_);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);

  nlohmann::json request;
  request["text"] = text;
  request["voice_id"] = voice.voice_id;
  request["audio_config"] = {{"encoding", "LINEAR16"},
                             {"sample_rate_hertz", kSampleRate},
                             {"channels", 1},
                             {"container", "wav"}};
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto response = client.Post(path_, headers, request.dump(), "application/json");
  if (!response) {
    throw ProviderError("request to " + origin_ + path_ + " failed: " +
                            httplib::to_string(response.error()),
                        true);
  }
  if (response->status != 200) {
    throw ProviderError("provider returned HTTP " + std::to_string(response->status) + ": " +
                            response->body.substr(0, 200),
                        Retryable(response->status));
  }
  try {
    const auto body = nlohmann::json::parse(response->body);
    const auto& audio_field = body.contains("audio") ? body.at("audio") : body.at("audioContent");
    Audio audio;
    audio.wav = codec::Base64Decode(audio_field.get<std::string>());
    audio.duration_s = WavDuration(audio.wav);
    return audio;
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed provider response: ") + e.what(), false);
  } catch (const Error& e) {
    throw ProviderError(std::string("unusable provider audio: ") + e.what(), false);
  }
}

}  // namespace pivotforge

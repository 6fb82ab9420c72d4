#include "pivotforge/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace pivotforge::log {

namespace {

std::atomic<Level> g_level{Level::kInfo};
std::mutex g_mutex;

std::string_view Name(Level level) {
  switch (level) {
    case Level::kDebug:
      return "debug";
    case Level::kInfo:
      return "info";
    case Level::kWarn:
      return "warn";
    case Level::kError:
      return "error";
    case Level::kOff:
      break;
  }
  return "off";
}

}  // namespace

void SetLevel(Level level) { g_level = level; }

void Write(Level level, std::string_view stage, std::string_view message,
           const nlohmann::json& fields) {
  if (level < g_level.load() || level == Level::kOff) return;
  nlohmann::ordered_json line;
  line["level"] = Name(level);
  line["stage"] = stage;
  line["msg"] = message;
  for (const auto& [key, value] : fields.items()) line[key] = value;
  const std::string out = line.dump() + "\n";
  std::lock_guard lock(g_mutex);
  std::cerr << out;
}

}  // namespace pivotforge::log

#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace pivotforge::log {

enum class Level { kDebug, kInfo, kWarn, kError, kOff };

void SetLevel(Level level);

// One JSON object per line on stderr: {"level", "stage", "msg", ...fields}.
void Write(Level level, std::string_view stage, std::string_view message,
           const nlohmann::json& fields = nlohmann::json::object());

inline void Info(std::string_view stage, std::string_view message,
                 const nlohmann::json& fields = nlohmann::json::object()) {
  Write(Level::kInfo, stage, message, fields);
}
inline void Warn(std::string_view stage, std::string_view message,
                 const nlohmann::json& fields = nlohmann::json::object()) {
  Write(Level::kWarn, stage, message, fields);
}

}  // namespace pivotforge::log

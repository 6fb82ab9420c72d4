#pragma once

#include <string>
#include <string_view>

namespace pivotforge::codec {

std::string Sha256Hex(std::string_view data);
std::string Base64Encode(std::string_view data);
// Throws ParseError on malformed input.
std::string Base64Decode(std::string_view data);

}  // namespace pivotforge::codec

#pragma once

#include <string>
#include <string_view>

namespace pivotforge::text {

// Strict UTF-8 decoding. Throws a parse error on malformed input.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view codepoints);
std::string Encode(char32_t codepoint);

// Simple (one-to-one) lowercase mapping covering ASCII, Latin-1, Latin
// Extended-A, Greek and Cyrillic. Other code points map to themselves.
char32_t ToLower(char32_t c);
std::u32string ToLower(std::u32string_view s);
std::string ToLower(std::string_view utf8);

bool IsSpace(char32_t c);
bool IsDigit(char32_t c);
// ASCII and common Unicode punctuation, excluding the apostrophe, which
// several Bantu orthographies use as part of a letter (ng').
bool IsPunctuation(char32_t c);

// Trims, and collapses every whitespace run into a single U+0020.
std::u32string CollapseSpaces(std::u32string_view s);

std::string_view Trim(std::string_view s);

}  // namespace pivotforge::text

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pivotforge/corpus.hpp"

namespace pivotforge {

struct RewriteRule {
  std::u32string source;  // lowercase, nonempty
  std::u32string replacement;
  std::string note;
};

enum class UnmappedPolicy { kError, kCopy, kDrop };

UnmappedPolicy ParseUnmappedPolicy(std::string_view s);

// Grapheme rewrite rules from a target orthography into a pivot orthography.
//
// Matching is leftmost, longest-source-first, over lowercased input;
// replacements are emitted verbatim and never re-scanned. Characters in the
// passthrough set are copied when no rule matches at their position.
class PhoneMap {
 public:
  PhoneMap() : PhoneMap("", "", {}) {}
  PhoneMap(std::string target_language, std::string pivot_language,
           std::vector<RewriteRule> rules);
  // Whitespace plus exactly `passthrough`, replacing the default classes.
  PhoneMap(std::string target_language, std::string pivot_language,
           std::vector<RewriteRule> rules, std::set<char32_t> passthrough);

  const std::string& target_language() const { return target_; }
  const std::string& pivot_language() const { return pivot_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }
  // Explicit passthrough set; empty when the default classes apply.
  const std::set<char32_t>& passthrough() const { return passthrough_; }
  bool uses_default_passthrough() const { return default_passthrough_; }

  bool IsPassthrough(char32_t c) const;

  // Index of the longest rule whose source matches `input` at `pos`, or -1.
  int LongestMatch(std::u32string_view input, size_t pos) const;

  // Whitespace, digits and punctuation (apostrophe excluded).
  static bool IsDefaultPassthrough(char32_t c);

 private:
  void Index();

  std::string target_;
  std::string pivot_;
  std::vector<RewriteRule> rules_;
  std::set<char32_t> passthrough_;
  bool default_passthrough_ = true;
  // First code point -> rule indices, longest source first.
  std::unordered_map<char32_t, std::vector<int>> by_first_;
};

// Line format:
//   @map <target> <pivot>
//   @passthrough <chars>        (optional; whitespace always passes through)
//   <source> => <replacement>   # optional note
PhoneMap ParsePhoneMap(std::string_view document);
PhoneMap LoadPhoneMap(const std::filesystem::path& path);

std::string Transliterate(std::string_view text, const PhoneMap& map,
                          UnmappedPolicy on_unmapped = UnmappedPolicy::kError);

struct CoverageReport {
  std::set<char32_t> mapped;
  std::map<char32_t, int64_t> unmapped;  // grapheme -> occurrences left unmatched
};

// Scans every entry text the way Transliterate does. A grapheme that is
// ever left unmatched lands in `unmapped`, even if rules consume it
// elsewhere; passthrough characters are not classified.
CoverageReport CheckCoverage(const PhoneMap& map, const Manifest& corpus);

}  // namespace pivotforge

#include "pivotforge/translit.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "pivotforge/error.hpp"
#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

std::string Describe(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(c));
  return "'" + text::Encode(c) + "' (" + buf + ")";
}

bool HasSpace(std::u32string_view s) {
  return std::any_of(s.begin(), s.end(), [](char32_t c) { return text::IsSpace(c); });
}

}  // namespace

UnmappedPolicy ParseUnmappedPolicy(std::string_view s) {
  if (s == "error") return UnmappedPolicy::kError;
  if (s == "copy") return UnmappedPolicy::kCopy;
  if (s == "drop") return UnmappedPolicy::kDrop;
  throw ParseError("unknown unmapped policy '" + std::string(s) + "'");
}

PhoneMap::PhoneMap(std::string target_language, std::string pivot_language,
                   std::vector<RewriteRule> rules)
    : target_(std::move(target_language)),
      pivot_(std::move(pivot_language)),
      rules_(std::move(rules)) {
  Index();
}

PhoneMap::PhoneMap(std::string target_language, std::string pivot_language,
                   std::vector<RewriteRule> rules, std::set<char32_t> passthrough)
    : target_(std::move(target_language)),
      pivot_(std::move(pivot_language)),
      rules_(std::move(rules)),
      passthrough_(std::move(passthrough)),
      default_passthrough_(false) {
  Index();
}

void PhoneMap::Index() {
  std::set<std::u32string> seen;
  for (size_t i = 0; i < rules_.size(); ++i) {
    auto& rule = rules_[i];
    if (rule.source.empty()) throw InvalidArgument("phone map rule with empty source");
    rule.source = text::ToLower(rule.source);
    if (!seen.insert(rule.source).second) {
      throw InvalidArgument("duplicate phone map source '" + text::Encode(rule.source) + "'");
    }
    by_first_[rule.source.front()].push_back(static_cast<int>(i));
  }
  for (auto& [first, indices] : by_first_) {
    std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
      return rules_[a].source.size() > rules_[b].source.size();
    });
  }
}

bool PhoneMap::IsDefaultPassthrough(char32_t c) {
  return text::IsSpace(c) || text::IsDigit(c) || text::IsPunctuation(c);
}

bool PhoneMap::IsPassthrough(char32_t c) const {
  if (text::IsSpace(c)) return true;
  return default_passthrough_ ? IsDefaultPassthrough(c) : passthrough_.contains(c);
}

int PhoneMap::LongestMatch(std::u32string_view input, size_t pos) const {
  if (pos >= input.size()) return -1;
  const auto it = by_first_.find(input[pos]);
  if (it == by_first_.end()) return -1;
  const auto rest = input.substr(pos);
  for (int idx : it->second) {
    if (rest.starts_with(rules_[idx].source)) return idx;
  }
  return -1;
}

PhoneMap ParsePhoneMap(std::string_view document) {
  std::string target;
  std::string pivot;
  bool have_header = false;
  std::optional<std::set<char32_t>> passthrough;
  std::vector<RewriteRule> rules;
  std::vector<size_t> rule_lines;

  std::istringstream in{std::string(document)};
  std::string raw;
  size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return ParseError("line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::Trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.starts_with("@map")) {
      if (have_header) throw fail("duplicate @map header");
      std::istringstream fields{std::string(line.substr(4))};
      std::string extra;
      if (!(fields >> target >> pivot) || (fields >> extra)) {
        throw fail("expected '@map <target-code> <pivot-code>'");
      }
      have_header = true;
      continue;
    }
    if (line.starts_with("@passthrough")) {
      if (passthrough) throw fail("duplicate @passthrough line");
      passthrough.emplace();
      for (char32_t c : text::Decode(line.substr(12))) {
        if (!text::IsSpace(c)) passthrough->insert(text::ToLower(c));
      }
      continue;
    }
    if (line.front() == '@') throw fail("unknown directive '" + std::string(line) + "'");

    const auto arrow = line.find("=>");
    if (arrow == std::string_view::npos) throw fail("expected '<source> => <replacement>'");
    if (!have_header) throw fail("rule before the '@map' header");

    RewriteRule rule;
    rule.source = text::ToLower(text::Decode(text::Trim(line.substr(0, arrow))));
    if (rule.source.empty()) throw fail("empty source cluster");
    if (HasSpace(rule.source)) throw fail("source cluster contains whitespace");

    auto rest = line.substr(arrow + 2);
    for (size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == '#' && (i == 0 || rest[i - 1] == ' ' || rest[i - 1] == '\t')) {
        rule.note = std::string(text::Trim(rest.substr(i + 1)));
        rest = rest.substr(0, i);
        break;
      }
    }
    rule.replacement = text::Decode(text::Trim(rest));

    for (size_t k = 0; k < rules.size(); ++k) {
      if (rules[k].source == rule.source) {
        throw fail("duplicate source '" + text::Encode(rule.source) + "' (first defined on line " +
                   std::to_string(rule_lines[k]) + ")");
      }
    }
    rules.push_back(std::move(rule));
    rule_lines.push_back(line_no);
  }
  if (passthrough) {
    return PhoneMap(std::move(target), std::move(pivot), std::move(rules), std::move(*passthrough));
  }
  return PhoneMap(std::move(target), std::move(pivot), std::move(rules));
}

PhoneMap LoadPhoneMap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open phone map '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParsePhoneMap(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string Transliterate(std::string_view text, const PhoneMap& map,
                          UnmappedPolicy on_unmapped) {
  const std::u32string input = text::ToLower(text::Decode(text));
  std::u32string out;
  out.reserve(input.size());
  size_t pos = 0;
  while (pos < input.size()) {
    const int rule = map.LongestMatch(input, pos);
    if (rule >= 0) {
      const auto& r = map.rules()[rule];
      out += r.replacement;
      pos += r.source.size();
      continue;
    }
    const char32_t c = input[pos];
    if (map.IsPassthrough(c)) {
      out.push_back(c);
    } else if (on_unmapped == UnmappedPolicy::kCopy) {
      out.push_back(c);
    } else if (on_unmapped == UnmappedPolicy::kError) {
      throw InvalidArgument("unmapped grapheme " + Describe(c) + " at offset " +
                            std::to_string(pos));
    }
    ++pos;
  }
  return text::Encode(out);
}

CoverageReport CheckCoverage(const PhoneMap& map, const Manifest& corpus) {
  CoverageReport report;
  std::set<char32_t> consumed;
  for (const auto& u : corpus.entries) {
    const std::u32string input = text::ToLower(text::Decode(u.text));
    size_t pos = 0;
    while (pos < input.size()) {
      const int rule = map.LongestMatch(input, pos);
      if (rule >= 0) {
        const size_t len = map.rules()[rule].source.size();
        for (size_t k = pos; k < pos + len; ++k) {
          if (!map.IsPassthrough(input[k])) consumed.insert(input[k]);
        }
        pos += len;
        continue;
      }
      if (!map.IsPassthrough(input[pos])) ++report.unmapped[input[pos]];
      ++pos;
    }
  }
  for (char32_t c : consumed) {
    if (!report.unmapped.contains(c)) report.mapped.insert(c);
  }
  return report;
}

}  // namespace pivotforge

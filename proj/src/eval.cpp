#include "pivotforge/eval.hpp"

#include <cmath>
#include <unordered_set>

#include "pivotforge/error.hpp"
#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

using TokenFn = std::vector<std::string> (*)(const std::string&, const Normalization&);

ErrorCounts Count(std::span<const TextPair> pairs, const Normalization& norm, TokenFn tokens) {
  ErrorCounts counts;
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto ref = tokens(pairs[p].first, norm);
    if (ref.empty()) {
      throw InvalidArgument("pair " + std::to_string(p) + " has an empty reference");
    }
    const auto hyp = tokens(pairs[p].second, norm);
    const Alignment a = Align(ref, hyp);
    for (const auto& op : a.ops) {
      switch (op.kind) {
        case EditKind::kSubstitute:
          ++counts.substitutions;
          break;
        case EditKind::kDelete:
          ++counts.deletions;
          break;
        case EditKind::kInsert:
          ++counts.insertions;
          break;
        case EditKind::kMatch:
          break;
      }
    }
    counts.reference_length += static_cast<int64_t>(ref.size());
  }
  return counts;
}

double Rate(std::span<const TextPair> pairs, const Normalization& norm, TokenFn tokens) {
  if (pairs.empty()) throw InvalidArgument("no reference/hypothesis pairs to score");
  return Count(pairs, norm, tokens).rate();
}

}  // namespace

std::string Normalize(const std::string& input, const Normalization& norm) {
  std::u32string s = text::Decode(input);
  if (norm.enabled) {
    if (norm.lowercase) s = text::ToLower(s);
    const std::u32string strip = text::Decode(norm.strip);
    std::erase_if(s, [&](char32_t c) { return strip.find(c) != std::u32string::npos; });
  }
  return text::Encode(text::CollapseSpaces(s));
}

std::vector<std::string> WordTokens(const std::string& input, const Normalization& norm) {
  const std::string s = Normalize(input, norm);
  std::vector<std::string> out;
  size_t start = 0;
  while (start < s.size()) {
    const size_t space = std::min(s.find(' ', start), s.size());
    out.push_back(s.substr(start, space - start));
    start = space + 1;
  }
  return out;
}

std::vector<std::string> CharTokens(const std::string& input, const Normalization& norm) {
  const std::u32string s = text::Decode(Normalize(input, norm));
  std::vector<std::string> out;
  out.reserve(s.size());
  for (char32_t c : s) out.push_back(text::Encode(c));
  return out;
}

double ErrorCounts::rate() const {
  if (reference_length == 0) return 0.0;
  return static_cast<double>(errors()) / static_cast<double>(reference_length);
}

ErrorCounts WordErrorCounts(std::span<const TextPair> pairs, const Normalization& norm) {
  return Count(pairs, norm, &WordTokens);
}

ErrorCounts CharErrorCounts(std::span<const TextPair> pairs, const Normalization& norm) {
  return Count(pairs, norm, &CharTokens);
}

double WordErrorRate(std::span<const TextPair> pairs, const Normalization& norm) {
  return Rate(pairs, norm, &WordTokens);
}

double CharErrorRate(std::span<const TextPair> pairs, const Normalization& norm) {
  return Rate(pairs, norm, &CharTokens);
}

double ReductionRate(double rate_old, double rate_new) {
  if (!(rate_old > 0.0)) {
    throw InvalidArgument("reduction rate needs a positive baseline rate, got " +
                          std::to_string(rate_old));
  }
  return (rate_old - rate_new) / rate_old;
}

CharReport PerCharReport(std::span<const TextPair> pairs, const Normalization& norm,
                         OutlierMode mode, double threshold) {
  CharReport report;
  report.mode = mode;
  report.threshold = threshold;
  std::map<std::string, int64_t> errors;
  for (const auto& [ref_text, hyp_text] : pairs) {
    const auto ref = CharTokens(ref_text, norm);
    const auto hyp = CharTokens(hyp_text, norm);
    for (const auto& op : Align(ref, hyp).ops) {
      if (op.kind == EditKind::kInsert || ref[op.ref] == " ") continue;
      ++report.occurrences[ref[op.ref]];
      if (op.kind != EditKind::kMatch) ++errors[ref[op.ref]];
    }
  }
  if (report.occurrences.empty()) return report;
  double sum = 0.0;
  for (const auto& [c, n] : report.occurrences) {
    const double p = static_cast<double>(errors[c]) / static_cast<double>(n);
    report.proportion[c] = p;
    sum += p;
  }
  report.mean = sum / static_cast<double>(report.proportion.size());
  const double bound = mode == OutlierMode::kAbsolute ? threshold : threshold * report.mean;
  // Tolerate rounding in the mean so a deviation of exactly the threshold counts.
  constexpr double kSlack = 1e-12;
  for (const auto& [c, p] : report.proportion) {
    if (std::abs(p - report.mean) >= bound - kSlack) report.outliers.insert(c);
  }
  return report;
}

EvalReport Evaluate(std::span<const TextPair> pairs, const Normalization& norm, OutlierMode mode) {
  if (pairs.empty()) throw InvalidArgument("no reference/hypothesis pairs to score");
  EvalReport report;
  report.normalization = norm;
  report.word = WordErrorCounts(pairs, norm);
  report.character = CharErrorCounts(pairs, norm);
  report.wer = report.word.rate();
  report.cer = report.character.rate();
  report.per_char = PerCharReport(pairs, norm, mode);
  return report;
}

double ABTally::proportion_a() const {
  return comparisons == 0 ? 0.0 : static_cast<double>(wins_a) / static_cast<double>(comparisons);
}

double ABTally::proportion_b() const {
  return comparisons == 0 ? 0.0 : static_cast<double>(wins_b) / static_cast<double>(comparisons);
}

ABTally TallyAB(std::span<const ABRecord> records) {
  ABTally tally;
  std::unordered_set<std::string_view> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.comparison_id).second) {
      throw InvalidArgument("duplicate comparison id '" + r.comparison_id + "'");
    }
    ++tally.comparisons;
    if (r.winner == Preference::kA) {
      ++tally.wins_a;
    } else {
      ++tally.wins_b;
    }
  }
  return tally;
}

}  // namespace pivotforge

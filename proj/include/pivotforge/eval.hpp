#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pivotforge {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

struct EditOp {
  EditKind kind = EditKind::kMatch;
  size_t ref = 0;  // index into the reference (unused for inserts)
  size_t hyp = 0;  // index into the hypothesis (unused for deletes)

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct Alignment {
  std::vector<EditOp> ops;
  int64_t cost = 0;
};

// Minimum unit-cost Levenshtein alignment. When several minimal alignments
// exist, the backtrace prefers match, then substitute, delete, insert.
template <typename T>
Alignment Align(std::span<const T> ref, std::span<const T> hyp) {
  const size_t rows = ref.size() + 1;
  const size_t cols = hyp.size() + 1;
  std::vector<int64_t> dp(rows * cols);
  auto at = [&](size_t i, size_t j) -> int64_t& { return dp[i * cols + j]; };
  for (size_t i = 0; i < rows; ++i) at(i, 0) = static_cast<int64_t>(i);
  for (size_t j = 0; j < cols; ++j) at(0, j) = static_cast<int64_t>(j);
  for (size_t i = 1; i < rows; ++i) {
    for (size_t j = 1; j < cols; ++j) {
      const int64_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  Alignment a;
  a.cost = at(rows - 1, cols - 1);
  size_t i = ref.size();
  size_t j = hyp.size();
  while (i > 0 || j > 0) {
    const int64_t here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i - 1, j - 1) == here) {
      a.ops.push_back({EditKind::kMatch, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here) {
      a.ops.push_back({EditKind::kSubstitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      a.ops.push_back({EditKind::kDelete, i - 1, j});
      --i;
    } else {
      a.ops.push_back({EditKind::kInsert, i, j - 1});
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

template <typename T>
Alignment Align(const std::vector<T>& ref, const std::vector<T>& hyp) {
  return Align(std::span<const T>(ref), std::span<const T>(hyp));
}

struct Normalization {
  bool enabled = true;
  bool lowercase = true;
  std::string strip = ".,!?;:\"'";
};

// Applies the normalization and collapses whitespace.
std::string Normalize(const std::string& text, const Normalization& norm);

std::vector<std::string> WordTokens(const std::string& text, const Normalization& norm);
// One token per code point; each inter-word gap is a single " " token.
std::vector<std::string> CharTokens(const std::string& text, const Normalization& norm);

struct ErrorCounts {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t reference_length = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }
  double rate() const;
};

using TextPair = std::pair<std::string, std::string>;  // (reference, hypothesis)

// Corpus-level pooled counts. Throws InvalidArgument naming the pair index
// when a reference is empty after normalization.
ErrorCounts WordErrorCounts(std::span<const TextPair> pairs, const Normalization& norm = {});
ErrorCounts CharErrorCounts(std::span<const TextPair> pairs, const Normalization& norm = {});
double WordErrorRate(std::span<const TextPair> pairs, const Normalization& norm = {});
double CharErrorRate(std::span<const TextPair> pairs, const Normalization& norm = {});

// (old - new) / old. Throws InvalidArgument when old <= 0.
double ReductionRate(double rate_old, double rate_new);

enum class OutlierMode { kAbsolute, kRelative };

inline constexpr double kOutlierThreshold = 0.25;

struct CharReport {
  // Reference character -> (substitutions + deletions) / occurrences.
  std::map<std::string, double> proportion;
  std::map<std::string, int64_t> occurrences;
  double mean = 0.0;
  std::set<std::string> outliers;
  OutlierMode mode = OutlierMode::kAbsolute;
  double threshold = kOutlierThreshold;
};

// Character-level diagnostics over all pairs. The inter-word space token is
// not reported. Absolute mode flags |p - mean| >= threshold; relative mode
// flags |p - mean| >= threshold * mean.
CharReport PerCharReport(std::span<const TextPair> pairs, const Normalization& norm = {},
                         OutlierMode mode = OutlierMode::kAbsolute,
                         double threshold = kOutlierThreshold);

struct EvalReport {
  double wer = 0.0;
  double cer = 0.0;
  ErrorCounts word;
  ErrorCounts character;
  CharReport per_char;
  Normalization normalization;
};

EvalReport Evaluate(std::span<const TextPair> pairs, const Normalization& norm = {},
                    OutlierMode mode = OutlierMode::kAbsolute);

enum class Preference { kA, kB };

struct ABRecord {
  std::string comparison_id;
  Preference winner = Preference::kA;
};

struct ABTally {
  int64_t comparisons = 0;
  int64_t wins_a = 0;
  int64_t wins_b = 0;

  double proportion_a() const;
  double proportion_b() const;
};

// Throws InvalidArgument on a repeated comparison id.
ABTally TallyAB(std::span<const ABRecord> records);

}  // namespace pivotforge

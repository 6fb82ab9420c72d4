#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pivotforge/corpus.hpp"

namespace pivotforge {

// Character n-gram counts used as a stand-in for phonetic units.
struct UnitInventory {
  int n = 1;
  std::map<std::string, int64_t> counts;  // UTF-8 n-gram -> occurrences
};

// Longer sentences are never selected as TTS prompts.
inline constexpr size_t kMaxPromptChars = 400;

// Lowercased n-grams of `text` with whitespace runs collapsed to one space.
// Returned in order of occurrence, repeats included.
std::vector<std::string> CharNgrams(const std::string& text, int n);

UnitInventory BuildUnitInventory(const Manifest& m, int n);

// Greedy coverage selection: each step takes the eligible entry adding the
// most unseen n-gram types, breaking ties by the pool frequency mass of
// those new types, then by the smaller id. Entries come back in selection
// order with split=pool.
Manifest SelectDiverse(const Manifest& m, size_t k, int n);

// Number of distinct n-gram types across the given entries.
size_t CoveredTypes(const Manifest& m, int n);

}  // namespace pivotforge

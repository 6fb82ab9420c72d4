#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pivotforge/corpus.hpp"

namespace pivotforge {

struct AugmentationPolicy {
  int64_t authentic_count = 0;     // N
  int64_t duplication_factor = 1;  // d
  int64_t synthetic_count = 0;     // S

  bool balanced() const { return duplication_factor * authentic_count == synthetic_count; }
  int64_t total() const { return duplication_factor * authentic_count + synthetic_count; }

  friend bool operator==(const AugmentationPolicy&, const AugmentationPolicy&) = default;
};

// Throws InvalidArgument unless N >= 0, d >= 1, S >= 0.
void Validate(const AugmentationPolicy& p);

struct PolicyLimits {
  int64_t synthetic_per_authentic = 8;
  int64_t synthetic_ceiling = 8000;
};

// S = min(8N, available, ceiling), d = max(1, round(S / N)); the balanced
// duplicated-authentic plus synthetic recipe.
AugmentationPolicy RecommendPolicy(int64_t authentic_count, int64_t synthetic_available,
                                   const PolicyLimits& limits = {});

// The first N authentic entries, each present d times (copies after the
// first get ids "<id>#2" .. "<id>#d"), plus the first S synthetic entries,
// shuffled by `seed`.
Manifest BuildTrainingSet(const Manifest& authentic, const Manifest& synthetic,
                          const AugmentationPolicy& policy, uint64_t seed);

// Strips a trailing "#<digits>" duplication suffix.
std::string_view BaseId(std::string_view id);

// Base ids of `train` that also occur in any held-out manifest, sorted.
std::vector<std::string> FindLeakage(const Manifest& train, const std::vector<Manifest>& held_out);

struct GridCell {
  std::string label;
  AugmentationPolicy policy;
};

struct ExperimentGrid {
  std::vector<GridCell> cells;
};

// Cartesian product, authentic-major. Repeated input values are collapsed
// so labels stay unique.
ExperimentGrid MakeGrid(const std::vector<int64_t>& authentic_sizes,
                        const std::vector<int64_t>& synthetic_sizes,
                        const std::vector<int64_t>& duplication_factors);

std::string GridLabel(const AugmentationPolicy& p);

}  // namespace pivotforge

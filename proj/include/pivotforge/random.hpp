#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace pivotforge {

// Seeded Fisher-Yates shuffle. std::shuffle and the standard distributions
// are implementation-defined, so manifests would differ between standard
// libraries; mt19937_64 plus rejection sampling is fully specified.
class SeededShuffler {
 public:
  explicit SeededShuffler(uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound).
  uint64_t Below(uint64_t bound) {
    const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
  }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = Below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pivotforge

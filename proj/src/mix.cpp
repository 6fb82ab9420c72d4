#include "pivotforge/mix.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "pivotforge/error.hpp"
#include "pivotforge/random.hpp"

namespace pivotforge {

namespace {

std::vector<int64_t> Distinct(const std::vector<int64_t>& values) {
  std::vector<int64_t> out;
  for (int64_t v : values) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

}  // namespace

void Validate(const AugmentationPolicy& p) {
  if (p.authentic_count < 0) throw InvalidArgument("authentic count must be nonnegative");
  if (p.duplication_factor < 1) throw InvalidArgument("duplication factor must be at least 1");
  if (p.synthetic_count < 0) throw InvalidArgument("synthetic count must be nonnegative");
}

AugmentationPolicy RecommendPolicy(int64_t authentic_count, int64_t synthetic_available,
                                   const PolicyLimits& limits) {
  if (authentic_count < 1) throw InvalidArgument("at least one authentic utterance is required");
  if (synthetic_available < 0) throw InvalidArgument("synthetic availability must be nonnegative");
  AugmentationPolicy p;
  p.authentic_count = authentic_count;
  p.synthetic_count = std::min({limits.synthetic_per_authentic * authentic_count,
                                synthetic_available, limits.synthetic_ceiling});
  p.synthetic_count = std::max<int64_t>(p.synthetic_count, 0);
  if (p.synthetic_count > 0) {
    // Integer round-half-up of S / N.
    p.duplication_factor =
        std::max<int64_t>(1, (2 * p.synthetic_count + authentic_count) / (2 * authentic_count));
  }
  return p;
}

Manifest BuildTrainingSet(const Manifest& authentic, const Manifest& synthetic,
                          const AugmentationPolicy& policy, uint64_t seed) {
  Validate(policy);
  const auto n = static_cast<size_t>(policy.authentic_count);
  const auto s = static_cast<size_t>(policy.synthetic_count);
  if (authentic.entries.size() < n) {
    throw InvalidArgument("insufficient authentic data: policy needs " + std::to_string(n) +
                          ", manifest has " + std::to_string(authentic.entries.size()));
  }
  if (synthetic.entries.size() < s) {
    throw InvalidArgument("insufficient synthetic data: policy needs " + std::to_string(s) +
                          ", manifest has " + std::to_string(synthetic.entries.size()));
  }

  Manifest out;
  out.split = Split::kTrain;
  out.language = authentic.language;
  out.entries.reserve(static_cast<size_t>(policy.total()));
  for (size_t i = 0; i < n; ++i) {
    const Utterance& u = authentic.entries[i];
    out.entries.push_back(u);
    for (int64_t k = 2; k <= policy.duplication_factor; ++k) {
      Utterance copy = u;
      copy.id = u.id + "#" + std::to_string(k);
      out.entries.push_back(std::move(copy));
    }
  }
  for (size_t i = 0; i < s; ++i) out.entries.push_back(synthetic.entries[i]);
  SeededShuffler(seed).Shuffle(std::span(out.entries));
  Validate(out);
  return out;
}

std::string_view BaseId(std::string_view id) {
  const auto hash = id.rfind('#');
  if (hash == std::string_view::npos || hash + 1 == id.size()) return id;
  const auto suffix = id.substr(hash + 1);
  if (!std::all_of(suffix.begin(), suffix.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return id;
  }
  return id.substr(0, hash);
}

std::vector<std::string> FindLeakage(const Manifest& train, const std::vector<Manifest>& held_out) {
  std::unordered_set<std::string_view> held;
  for (const auto& m : held_out) {
    for (const auto& u : m.entries) held.insert(BaseId(u.id));
  }
  std::set<std::string> leaked;
  for (const auto& u : train.entries) {
    const auto base = BaseId(u.id);
    if (held.contains(base)) leaked.emplace(base);
  }
  return {leaked.begin(), leaked.end()};
}

std::string GridLabel(const AugmentationPolicy& p) {
  return "n" + std::to_string(p.authentic_count) + "-d" + std::to_string(p.duplication_factor) +
         "-s" + std::to_string(p.synthetic_count);
}

ExperimentGrid MakeGrid(const std::vector<int64_t>& authentic_sizes,
                        const std::vector<int64_t>& synthetic_sizes,
                        const std::vector<int64_t>& duplication_factors) {
  if (authentic_sizes.empty() || synthetic_sizes.empty() || duplication_factors.empty()) {
    throw InvalidArgument("grid axes must be nonempty");
  }
  for (int64_t n : authentic_sizes) {
    if (n < 1) throw InvalidArgument("authentic sizes must be positive");
  }
  for (int64_t s : synthetic_sizes) {
    if (s < 0) throw InvalidArgument("synthetic sizes must be nonnegative");
  }
  for (int64_t d : duplication_factors) {
    if (d < 1) throw InvalidArgument("duplication factors must be at least 1");
  }
  ExperimentGrid grid;
  for (int64_t n : Distinct(authentic_sizes)) {
    for (int64_t s : Distinct(synthetic_sizes)) {
      for (int64_t d : Distinct(duplication_factors)) {
        AugmentationPolicy p{n, d, s};
        grid.cells.push_back({GridLabel(p), p});
      }
    }
  }
  return grid;
}

}  // namespace pivotforge

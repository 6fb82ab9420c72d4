#include "pivotforge/select.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "pivotforge/error.hpp"
#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

void CheckOrder(int n) {
  if (n != 1 && n != 2) throw InvalidArgument("n-gram order must be 1 or 2, got " + std::to_string(n));
}

struct Candidate {
  size_t entry = 0;
  std::vector<int> types;  // sorted, unique
};

struct Key {
  int64_t gain = 0;
  int64_t mass = 0;
  size_t candidate = 0;
  size_t round = 0;
};

}  // namespace

std::vector<std::string> CharNgrams(const std::string& text, int n) {
  CheckOrder(n);
  const std::u32string s = text::CollapseSpaces(text::ToLower(text::Decode(text)));
  std::vector<std::string> grams;
  if (s.size() < static_cast<size_t>(n)) return grams;
  grams.reserve(s.size() - n + 1);
  for (size_t i = 0; i + n <= s.size(); ++i) {
    grams.push_back(text::Encode(std::u32string_view(s).substr(i, n)));
  }
  return grams;
}

UnitInventory BuildUnitInventory(const Manifest& m, int n) {
  CheckOrder(n);
  UnitInventory inv;
  inv.n = n;
  std::unordered_map<std::string, int64_t> counts;
  for (const auto& u : m.entries) {
    for (auto& g : CharNgrams(u.text, n)) ++counts[std::move(g)];
  }
  inv.counts.insert(counts.begin(), counts.end());
  return inv;
}

size_t CoveredTypes(const Manifest& m, int n) { return BuildUnitInventory(m, n).counts.size(); }

Manifest SelectDiverse(const Manifest& m, size_t k, int n) {
  CheckOrder(n);
  if (k < 1 || k > m.entries.size()) {
    throw InvalidArgument("k=" + std::to_string(k) + " out of range [1, " +
                          std::to_string(m.entries.size()) + "]");
  }

  std::unordered_map<std::string, int> type_ids;
  std::vector<int64_t> frequency;
  std::vector<Candidate> candidates;
  for (size_t i = 0; i < m.entries.size(); ++i) {
    if (text::Decode(m.entries[i].text).size() > kMaxPromptChars) continue;
    Candidate c;
    c.entry = i;
    for (auto& g : CharNgrams(m.entries[i].text, n)) {
      auto [it, inserted] = type_ids.try_emplace(std::move(g), static_cast<int>(frequency.size()));
      if (inserted) frequency.push_back(0);
      ++frequency[it->second];
      c.types.push_back(it->second);
    }
    std::sort(c.types.begin(), c.types.end());
    c.types.erase(std::unique(c.types.begin(), c.types.end()), c.types.end());
    candidates.push_back(std::move(c));
  }
  if (k > candidates.size()) {
    throw InvalidArgument("k=" + std::to_string(k) + " exceeds the " +
                          std::to_string(candidates.size()) + " entries of at most " +
                          std::to_string(kMaxPromptChars) + " characters");
  }

  std::vector<bool> covered(frequency.size(), false);
  auto evaluate = [&](size_t ci, size_t round) {
    Key key{0, 0, ci, round};
    for (int t : candidates[ci].types) {
      if (!covered[t]) {
        ++key.gain;
        key.mass += frequency[t];
      }
    }
    return key;
  };
  // Max-heap on (gain, mass), then smaller id.
  auto worse = [&](const Key& a, const Key& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    if (a.mass != b.mass) return a.mass < b.mass;
    return m.entries[candidates[a.candidate].entry].id > m.entries[candidates[b.candidate].entry].id;
  };
  std::priority_queue<Key, std::vector<Key>, decltype(worse)> heap(worse);
  for (size_t ci = 0; ci < candidates.size(); ++ci) heap.push(evaluate(ci, 0));

  // Gains only shrink as coverage grows, and the mass changes only when the
  // gain does, so a stale key is an upper bound on the fresh one (lazy
  // greedy). A key refreshed in the current round that still tops the heap
  // is the true maximum.
  Manifest out;
  out.split = Split::kPool;
  out.language = m.language;
  out.entries.reserve(k);
  size_t round = 0;
  while (out.entries.size() < k) {
    Key top = heap.top();
    heap.pop();
    if (top.round != round) {
      heap.push(evaluate(top.candidate, round));
      continue;
    }
    out.entries.push_back(m.entries[candidates[top.candidate].entry]);
    for (int t : candidates[top.candidate].types) covered[t] = true;
    ++round;
  }
  return out;
}

}  // namespace pivotforge

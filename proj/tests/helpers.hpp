#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "pivotforge/corpus.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("pivotforge-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::permissions(path_, std::filesystem::perms::owner_all,
                                 std::filesystem::perm_options::add, ec);
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline pivotforge::Utterance Utt(std::string id, std::string text, std::string language = "swh") {
  pivotforge::Utterance u;
  u.id = std::move(id);
  u.text = std::move(text);
  u.language = std::move(language);
  return u;
}

inline pivotforge::Manifest MakeManifest(size_t n, const std::string& prefix = "u",
                                         const std::string& language = "swh") {
  pivotforge::Manifest m;
  m.language = language;
  for (size_t i = 0; i < n; ++i) {
    m.entries.push_back(Utt(prefix + std::to_string(i), "sentence " + std::to_string(i), language));
  }
  return m;
}

// Random lowercase string over the first `alphabet` letters.
inline std::string RandomWord(std::mt19937_64& rng, size_t min_len, size_t max_len, int alphabet) {
  std::uniform_int_distribution<size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> letter(0, alphabet - 1);
  std::string s(len(rng), 'a');
  for (auto& c : s) c = static_cast<char>('a' + letter(rng));
  return s;
}

}  // namespace testing

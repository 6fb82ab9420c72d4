#include "pivotforge/corpus.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "pivotforge/error.hpp"
#include "pivotforge/random.hpp"
#include "pivotforge/text.hpp"

namespace pivotforge {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kCsvColumns[] = {"id",         "text",    "audio",    "duration_s",
                                            "speaker",    "gender",  "language", "source"};

std::string AtLine(size_t line) { return "line " + std::to_string(line) + ": "; }

double ParseDuration(std::string_view s, size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(AtLine(line) + "invalid duration_s '" + std::string(s) + "'");
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Applies manifest-level language inheritance and validation to freshly
// parsed entries; parse-time errors keep their line numbers.
Manifest Finish(std::vector<Utterance> entries, const std::vector<size_t>& lines,
                const LoadOptions& options) {
  Manifest m;
  m.split = options.split;
  m.language = options.language;
  if (m.language.empty()) {
    for (const auto& u : entries) {
      if (!u.language.empty()) {
        m.language = u.language;
        break;
      }
    }
  }
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < entries.size(); ++i) {
    auto& u = entries[i];
    if (u.language.empty()) u.language = m.language;
    if (!seen.insert(u.id).second) {
      throw InvalidArgument(AtLine(lines[i]) + "duplicate id '" + u.id + "'");
    }
    try {
      Validate(u);
    } catch (const Error& e) {
      throw Error(e.kind(), AtLine(lines[i]) + e.what());
    }
    if (u.language != m.language) {
      throw InvalidArgument(AtLine(lines[i]) + "entry language '" + u.language +
                            "' differs from manifest language '" + m.language + "'");
    }
  }
  m.entries = std::move(entries);
  return m;
}

std::string GetString(const nlohmann::json& obj, const char* key, size_t line) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ParseError(AtLine(line) + "'" + key + "' must be a string");
  return v.get<std::string>();
}

Utterance FromJson(const nlohmann::json& obj, size_t line) {
  if (!obj.is_object()) throw ParseError(AtLine(line) + "expected a JSON object");
  for (const char* key : {"id", "text"}) {
    if (!obj.contains(key)) {
      throw ParseError(AtLine(line) + "missing required key '" + key + "'");
    }
  }
  Utterance u;
  u.id = GetString(obj, "id", line);
  u.text = GetString(obj, "text", line);
  if (obj.contains("audio") && !obj["audio"].is_null()) u.audio_ref = GetString(obj, "audio", line);
  if (obj.contains("duration_s") && !obj["duration_s"].is_null()) {
    if (!obj["duration_s"].is_number()) {
      throw ParseError(AtLine(line) + "'duration_s' must be a number");
    }
    u.duration_s = obj["duration_s"].get<double>();
  }
  if (obj.contains("speaker")) u.speaker_id = GetString(obj, "speaker", line);
  try {
    if (obj.contains("gender")) u.gender = ParseGender(GetString(obj, "gender", line));
    if (obj.contains("source")) u.source = ParseSource(GetString(obj, "source", line));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kParse) throw;
    throw ParseError(AtLine(line) + e.what());
  }
  if (obj.contains("language")) u.language = GetString(obj, "language", line);
  if (obj.contains("provenance") && !obj["provenance"].is_null()) {
    const auto& p = obj["provenance"];
    if (!p.is_object()) throw ParseError(AtLine(line) + "'provenance' must be an object");
    Provenance prov;
    if (p.contains("provider")) prov.provider = GetString(p, "provider", line);
    if (p.contains("voice_id")) prov.voice_id = GetString(p, "voice_id", line);
    if (p.contains("pivot_language")) prov.pivot_language = GetString(p, "pivot_language", line);
    if (p.contains("transliterated")) {
      if (!p["transliterated"].is_boolean()) {
        throw ParseError(AtLine(line) + "'transliterated' must be a boolean");
      }
      prov.transliterated = p["transliterated"].get<bool>();
    }
    u.provenance = std::move(prov);
  }
  return u;
}

ordered_json ToJson(const Utterance& u) {
  ordered_json obj;
  obj["id"] = u.id;
  obj["text"] = u.text;
  if (u.audio_ref) obj["audio"] = *u.audio_ref;
  if (u.duration_s) obj["duration_s"] = *u.duration_s;
  if (!u.speaker_id.empty()) obj["speaker"] = u.speaker_id;
  if (u.gender != Gender::kUnknown) obj["gender"] = ToString(u.gender);
  if (!u.language.empty()) obj["language"] = u.language;
  obj["source"] = ToString(u.source);
  if (u.provenance) {
    ordered_json p;
    p["provider"] = u.provenance->provider;
    p["voice_id"] = u.provenance->voice_id;
    p["pivot_language"] = u.provenance->pivot_language;
    p["transliterated"] = u.provenance->transliterated;
    obj["provenance"] = std::move(p);
  }
  return obj;
}

Manifest ReadJsonl(std::istream& in, const LoadOptions& options) {
  std::vector<Utterance> entries;
  std::vector<size_t> lines;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(AtLine(line_no) + e.what());
    }
    entries.push_back(FromJson(obj, line_no));
    lines.push_back(line_no);
  }
  return Finish(std::move(entries), lines, options);
}

// RFC 4180 records. Quoted fields may span physical lines; `line` is
// advanced past every newline consumed.
bool ReadCsvRecord(std::istream& in, std::vector<std::string>& fields, size_t& line) {
  fields.clear();
  int ch = in.get();
  if (ch == EOF) return false;
  ++line;
  std::string field;
  bool quoted = false;
  bool field_started_quoted = false;
  for (;; ch = in.get()) {
    if (quoted) {
      if (ch == EOF) throw ParseError(AtLine(line) + "unterminated quoted field");
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(static_cast<char>(ch));
      }
      continue;
    }
    if (ch == EOF || ch == '\n') {
      if (!field.empty() && field.back() == '\r' && !field_started_quoted) field.pop_back();
      fields.push_back(std::move(field));
      return true;
    }
    if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
    } else if (ch == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else if (ch == '\r' && in.peek() == '\n') {
      // CRLF line ending.
    } else {
      if (field_started_quoted) {
        throw ParseError(AtLine(line) + "unexpected character after closing quote");
      }
      field.push_back(static_cast<char>(ch));
    }
  }
}

Manifest ReadCsv(std::istream& in, const LoadOptions& options) {
  std::vector<std::string> fields;
  size_t line = 0;
  if (!ReadCsvRecord(in, fields, line)) throw ParseError("empty CSV file: missing header");
  std::vector<int> column_of(std::size(kCsvColumns), -1);
  for (size_t c = 0; c < fields.size(); ++c) {
    const auto name = text::Trim(fields[c]);
    for (size_t k = 0; k < std::size(kCsvColumns); ++k) {
      if (name == kCsvColumns[k]) column_of[k] = static_cast<int>(c);
    }
  }
  for (size_t k : {0, 1}) {
    if (column_of[k] < 0) {
      throw ParseError("line 1: missing required column '" + std::string(kCsvColumns[k]) + "'");
    }
  }
  std::vector<Utterance> entries;
  std::vector<size_t> lines;
  while (true) {
    const size_t record_line = line + 1;
    if (!ReadCsvRecord(in, fields, line)) break;
    if (fields.size() == 1 && text::Trim(fields[0]).empty()) continue;
    auto cell = [&](size_t k) -> std::string {
      const int c = column_of[k];
      if (c < 0 || static_cast<size_t>(c) >= fields.size()) return {};
      return fields[c];
    };
    Utterance u;
    u.id = cell(0);
    u.text = cell(1);
    if (auto a = cell(2); !a.empty()) u.audio_ref = a;
    if (auto d = cell(3); !d.empty()) u.duration_s = ParseDuration(text::Trim(d), record_line);
    u.speaker_id = cell(4);
    try {
      if (auto g = cell(5); !g.empty()) u.gender = ParseGender(g);
      if (auto s = cell(7); !s.empty()) u.source = ParseSource(s);
    } catch (const Error& e) {
      throw ParseError(AtLine(record_line) + e.what());
    }
    u.language = cell(6);
    entries.push_back(std::move(u));
    lines.push_back(record_line);
  }
  return Finish(std::move(entries), lines, options);
}

std::string CsvQuote(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void WriteCsv(std::ostream& out, const Manifest& m) {
  for (size_t k = 0; k < std::size(kCsvColumns); ++k) {
    out << (k ? "," : "") << kCsvColumns[k];
  }
  out << '\n';
  for (const auto& u : m.entries) {
    if (u.provenance) {
      throw InvalidArgument("utterance '" + u.id +
                            "' carries provenance, which the CSV format cannot hold; use jsonl");
    }
    out << CsvQuote(u.id) << ',' << CsvQuote(u.text) << ',' << CsvQuote(u.audio_ref.value_or(""))
        << ',' << (u.duration_s ? FormatDouble(*u.duration_s) : "") << ','
        << CsvQuote(u.speaker_id) << ',' << (u.gender == Gender::kUnknown ? "" : ToString(u.gender))
        << ',' << CsvQuote(u.language) << ',' << ToString(u.source) << '\n';
  }
}

}  // namespace

std::string_view ToString(Gender g) {
  switch (g) {
    case Gender::kMale:
      return "M";
    case Gender::kFemale:
      return "F";
    case Gender::kUnknown:
      break;
  }
  return "unknown";
}

std::string_view ToString(Source s) {
  switch (s) {
    case Source::kAuthentic:
      return "authentic";
    case Source::kSynthetic:
      return "synthetic";
    case Source::kNoise:
      break;
  }
  return "noise";
}

std::string_view ToString(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
    case Split::kPool:
      break;
  }
  return "pool";
}

Gender ParseGender(std::string_view s) {
  if (s == "M" || s == "m") return Gender::kMale;
  if (s == "F" || s == "f") return Gender::kFemale;
  if (s == "unknown" || s.empty()) return Gender::kUnknown;
  throw ParseError("unknown gender '" + std::string(s) + "'");
}

Source ParseSource(std::string_view s) {
  if (s == "authentic") return Source::kAuthentic;
  if (s == "synthetic") return Source::kSynthetic;
  if (s == "noise") return Source::kNoise;
  throw ParseError("unknown source '" + std::string(s) + "'");
}

Split ParseSplit(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  if (s == "pool") return Split::kPool;
  throw ParseError("unknown split '" + std::string(s) + "'");
}

ManifestFormat ParseManifestFormat(std::string_view s) {
  if (s == "jsonl") return ManifestFormat::kJsonl;
  if (s == "csv") return ManifestFormat::kCsv;
  throw ParseError("unknown manifest format '" + std::string(s) + "'");
}

void Validate(const Utterance& u) {
  if (u.id.empty()) throw InvalidArgument("utterance id must be nonempty");
  if (u.duration_s && !(*u.duration_s >= 0.0)) {
    throw InvalidArgument("utterance '" + u.id + "' has negative duration");
  }
  if (u.source == Source::kSynthetic &&
      (!u.provenance || u.provenance->pivot_language.empty())) {
    throw InvalidArgument("synthetic utterance '" + u.id +
                          "' lacks provenance with a pivot language");
  }
}

void Validate(const Manifest& m) {
  std::unordered_set<std::string_view> seen;
  for (const auto& u : m.entries) {
    Validate(u);
    if (!seen.insert(u.id).second) throw InvalidArgument("duplicate id '" + u.id + "'");
    if (u.language != m.language) {
      throw InvalidArgument("entry '" + u.id + "' language '" + u.language +
                            "' differs from manifest language '" + m.language + "'");
    }
  }
}

Manifest ReadManifest(std::istream& in, ManifestFormat format, const LoadOptions& options) {
  return format == ManifestFormat::kJsonl ? ReadJsonl(in, options) : ReadCsv(in, options);
}

Manifest LoadManifest(const std::filesystem::path& path, ManifestFormat format,
                      const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  try {
    return ReadManifest(in, format, options);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void WriteManifest(std::ostream& out, const Manifest& m, ManifestFormat format) {
  if (format == ManifestFormat::kCsv) {
    WriteCsv(out, m);
    return;
  }
  for (const auto& u : m.entries) out << ToJson(u).dump() << '\n';
}

void SaveManifest(const std::filesystem::path& path, const Manifest& m, ManifestFormat format) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  WriteManifest(out, m, format);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SplitResult SplitManifest(const Manifest& m, SplitCounts counts, uint64_t seed) {
  const size_t wanted = counts.train + counts.val + counts.test;
  if (wanted > m.entries.size()) {
    throw InvalidArgument("insufficient entries: requested " + std::to_string(wanted) +
                          " but manifest has " + std::to_string(m.entries.size()));
  }
  std::vector<size_t> order(m.entries.size());
  std::iota(order.begin(), order.end(), 0);
  SeededShuffler(seed).Shuffle(std::span(order));

  auto slice = [&](size_t begin, size_t count, Split role) {
    Manifest out;
    out.split = role;
    out.language = m.language;
    out.entries.reserve(count);
    for (size_t i = begin; i < begin + count; ++i) out.entries.push_back(m.entries[order[i]]);
    return out;
  };
  SplitResult result;
  result.train = slice(0, counts.train, Split::kTrain);
  result.val = slice(counts.train, counts.val, Split::kVal);
  result.test = slice(counts.train + counts.val, counts.test, Split::kTest);
  return result;
}

CorpusStats ComputeStats(const Manifest& m) {
  CorpusStats stats;
  stats.utterance_count = static_cast<int64_t>(m.entries.size());
  std::unordered_set<std::string_view> speakers;
  double seconds = 0.0;
  for (const auto& u : m.entries) {
    if (u.duration_s) {
      seconds += *u.duration_s;
    } else {
      ++stats.missing_duration;
    }
    if (!u.speaker_id.empty()) speakers.insert(u.speaker_id);
    stats.gender_mix.insert(u.gender);
  }
  stats.total_hours = seconds / 3600.0;
  stats.speaker_count = static_cast<int64_t>(speakers.size());
  return stats;
}

}  // namespace pivotforge

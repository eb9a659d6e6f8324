#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bimath/answer.hpp"
#include "bimath/digest.hpp"
#include "bimath/errors.hpp"
#include "bimath/io.hpp"
#include "bimath/structure.hpp"
#include "bimath/types.hpp"
#include "bimath/unicode.hpp"

namespace bimath {

struct Problem {
  std::string id;
  std::string pair_id;  // shared by EN/HI twins, empty otherwise
  Language language = Language::English;
  Source source = Source::GSM8K;
  std::string question;
  std::optional<std::string> raw_solution;
  std::optional<StructuredSolution> structured_solution;
  Difficulty difficulty = Difficulty::Unclassified;
  std::optional<std::string> topic;
  Operation operation = Operation::None;
  std::optional<int> math_level;
  std::optional<ReviewStatus> review_status;
  nlohmann::json extras = nlohmann::json::object();  // unknown source fields, kept verbatim

  bool operator==(const Problem&) const = default;
};

enum class SourceFormat { Gsm8k, Math, Hawp, IndiMathQA, Derived };

inline std::string_view to_string(SourceFormat f) {
  switch (f) {
    case SourceFormat::Gsm8k: return "gsm8k";
    case SourceFormat::Math: return "math";
    case SourceFormat::Hawp: return "hawp";
    case SourceFormat::IndiMathQA: return "indimathqa";
    case SourceFormat::Derived: return "derived";
  }
  return "?";
}

inline SourceFormat parse_source_format(std::string_view s) {
  const auto v = detail::lower(s);
  for (auto f : {SourceFormat::Gsm8k, SourceFormat::Math, SourceFormat::Hawp,
                 SourceFormat::IndiMathQA, SourceFormat::Derived})
    if (to_string(f) == v) return f;
  throw FormatError("unknown source format '" + std::string(s) +
                    "' (valid: gsm8k, math, hawp, indimathqa, derived)");
}

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const StructuredSolution& s) {
  nlohmann::json j = {
      {"data_identification", s.data_identification},
      {"problem_analysis", s.problem_analysis},
      {"theoretical_framework", s.theoretical_framework},
      {"methodology_development", s.methodology_development},
      {"computation", s.computation},
      {"answer", s.answer},
  };
  if (s.final_answer) j["final_answer"] = to_json_value(*s.final_answer);
  return j;
}

inline StructuredSolution structured_from_json(const nlohmann::json& j) {
  StructuredSolution s;
  s.data_identification = j.at("data_identification").get<std::string>();
  s.problem_analysis = j.at("problem_analysis").get<std::string>();
  s.theoretical_framework = j.at("theoretical_framework").get<std::string>();
  s.methodology_development = j.at("methodology_development").get<std::string>();
  s.computation = j.at("computation").get<std::string>();
  s.answer = j.at("answer").get<std::string>();
  if (j.contains("final_answer")) s.final_answer = answer_from_json(j.at("final_answer"));
  return s;
}

inline nlohmann::json to_json(const Problem& p) {
  nlohmann::json j = {
      {"id", p.id},
      {"language", std::string(to_string(p.language))},
      {"source", std::string(to_string(p.source))},
      {"question", p.question},
      {"difficulty", std::string(to_string(p.difficulty))},
      {"operation", std::string(to_string(p.operation))},
  };
  if (!p.pair_id.empty()) j["pair_id"] = p.pair_id;
  if (p.raw_solution) j["raw_solution"] = *p.raw_solution;
  if (p.structured_solution) j["structured_solution"] = to_json(*p.structured_solution);
  if (p.topic) j["topic"] = *p.topic;
  if (p.math_level) j["math_level"] = *p.math_level;
  if (p.review_status) j["review_status"] = std::string(to_string(*p.review_status));
  if (!p.extras.empty()) j["extras"] = p.extras;
  return j;
}

inline Problem problem_from_json(const nlohmann::json& j) {
  Problem p;
  p.id = j.at("id").get<std::string>();
  p.pair_id = j.value("pair_id", "");
  p.language = parse_language(j.at("language").get<std::string>());
  p.source = parse_source(j.at("source").get<std::string>());
  p.question = j.at("question").get<std::string>();
  p.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
  p.operation = parse_operation(j.value("operation", "none"));
  if (j.contains("raw_solution")) p.raw_solution = j.at("raw_solution").get<std::string>();
  if (j.contains("structured_solution"))
    p.structured_solution = structured_from_json(j.at("structured_solution"));
  if (j.contains("topic")) p.topic = j.at("topic").get<std::string>();
  if (j.contains("math_level")) p.math_level = j.at("math_level").get<int>();
  if (j.contains("review_status"))
    p.review_status = parse_review_status(j.at("review_status").get<std::string>());
  if (j.contains("extras")) p.extras = j.at("extras");
  return p;
}

inline std::string serialize_record(const Problem& p) { return io::dump(to_json(p)); }

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline constexpr std::string_view kManifestFormat = "bimath-manifest";
inline constexpr int kManifestVersion = 1;
inline constexpr std::string_view kEpoch = "1970-01-01T00:00:00Z";

/// Throws ValidationError when ids are empty/duplicated, MATH level rules are
/// broken, or twins sharing a pair_id disagree.
inline void validate_records(const std::vector<Problem>& records) {
  std::vector<std::string> errors;
  auto note = [&](std::string msg) {
    if (errors.size() < 10) errors.push_back(std::move(msg));
  };
  std::set<std::string_view> seen;
  std::map<std::string_view, std::vector<const Problem*>> pairs;
  for (const auto& p : records) {
    if (p.id.empty()) note("empty id");
    else if (!seen.insert(p.id).second) note("duplicate id " + p.id);
    if (p.source == Source::MATH) {
      if (!p.math_level) note(p.id + ": MATH problem without math_level");
      else if (*p.math_level < 1 || *p.math_level > 5)
        note(p.id + ": math_level out of range 1-5");
    } else if (p.math_level) {
      note(p.id + ": math_level on non-MATH problem");
    }
    if (!p.pair_id.empty()) pairs[p.pair_id].push_back(&p);
  }
  for (const auto& [pair_id, members] : pairs) {
    std::set<Language> langs;
    for (const Problem* m : members) {
      if (!langs.insert(m->language).second)
        note("pair " + std::string(pair_id) + ": two members share language " +
             std::string(to_string(m->language)));
      if (m->source != members.front()->source)
        note("pair " + std::string(pair_id) + ": source differs (" + members.front()->id +
             ", " + m->id + ")");
      if (m->difficulty != members.front()->difficulty)
        note("pair " + std::string(pair_id) + ": difficulty differs (" +
             members.front()->id + ", " + m->id + ")");
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid corpus: ";
    for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "; " : "") + errors[i];
    throw ValidationError(msg);
  }
}

/// Immutable ordered collection of problems with a content checksum.
class CorpusManifest {
 public:
  CorpusManifest() : CorpusManifest({}, SourceFormat::Derived, std::string(kEpoch)) {}

  CorpusManifest(std::vector<Problem> records, SourceFormat format, std::string created_at)
      : records_(std::move(records)), format_(format), created_at_(std::move(created_at)) {
    validate_records(records_);
    std::string blob;
    for (const auto& p : records_) {
      blob += serialize_record(p);
      blob += '\n';
    }
    checksum_ = sha256_hex(blob);
    index_.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) index_.emplace(records_[i].id, i);
  }

  const std::vector<Problem>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  SourceFormat source_format() const { return format_; }
  const std::string& checksum() const { return checksum_; }
  const std::string& created_at() const { return created_at_; }

  const Problem* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  bool operator==(const CorpusManifest& o) const {
    return records_ == o.records_ && format_ == o.format_ && checksum_ == o.checksum_ &&
           created_at_ == o.created_at_;
  }

 private:
  std::vector<Problem> records_;
  SourceFormat format_;
  std::string created_at_;
  std::string checksum_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline std::map<Difficulty, std::size_t> difficulty_counts(const CorpusManifest& m) {
  std::map<Difficulty, std::size_t> counts;
  for (const auto& p : m.records()) ++counts[p.difficulty];
  return counts;
}

inline std::string render_manifest(const CorpusManifest& m) {
  nlohmann::json header = {
      {"format", std::string(kManifestFormat)},
      {"version", kManifestVersion},
      {"source_format", std::string(to_string(m.source_format()))},
      {"created_at", m.created_at()},
      {"count", m.size()},
      {"checksum", m.checksum()},
  };
  std::string out = io::dump(header) + "\n";
  for (const auto& p : m.records()) {
    out += serialize_record(p);
    out += '\n';
  }
  return out;
}

inline void save_manifest(const CorpusManifest& m, const std::filesystem::path& path) {
  io::write_file(path, render_manifest(m));
}

inline CorpusManifest parse_manifest(std::string_view data, const std::string& origin) {
  const auto lines = answer_detail::split_lines(data);
  if (lines.empty() || detail::trim(lines[0]).empty())
    throw FormatError("missing manifest header in " + origin);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(lines[0]);
  } catch (const nlohmann::json::parse_error&) {
    throw FormatError("invalid manifest header in " + origin);
  }
  if (!header.is_object() || header.value("format", "") != kManifestFormat)
    throw FormatError("not a manifest file: " + origin);
  if (header.value("version", 0) != kManifestVersion)
    throw FormatError("unsupported manifest version in " + origin);

  std::string blob;
  std::vector<std::string_view> record_lines;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    record_lines.push_back(lines[i]);
    blob.append(lines[i]);
    blob.push_back('\n');
  }
  const std::string expected = header.value("checksum", "");
  const std::string actual = sha256_hex(blob);
  if (expected != actual)
    throw IntegrityError("checksum mismatch in " + origin + ": header " + expected +
                         ", computed " + actual);
  if (header.value("count", std::size_t{0}) != record_lines.size())
    throw IntegrityError("record count mismatch in " + origin);

  std::vector<Problem> records;
  records.reserve(record_lines.size());
  for (std::size_t i = 0; i < record_lines.size(); ++i) {
    try {
      records.push_back(problem_from_json(nlohmann::json::parse(record_lines[i])));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("bad record at line " + std::to_string(i + 2) + " of " + origin + ": " +
                        e.what());
    }
  }
  return CorpusManifest(std::move(records),
                        parse_source_format(header.value("source_format", "derived")),
                        header.value("created_at", std::string(kEpoch)));
}

inline CorpusManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(io::read_file(path), path.string());
}

/// Derived manifests inherit the newest created_at of their inputs so reruns
/// stay byte-identical.
inline std::string latest_created_at(std::initializer_list<const CorpusManifest*> inputs) {
  std::string latest(kEpoch);
  for (const auto* m : inputs)
    if (m->created_at() > latest) latest = m->created_at();
  return latest;
}

inline CorpusManifest derive(const CorpusManifest& from, std::vector<Problem> records) {
  return CorpusManifest(std::move(records), SourceFormat::Derived, from.created_at());
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

namespace corpus_detail {

inline std::string required_string(const nlohmann::json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    throw FormatError("missing field '" + std::string(key) + "' at line " + std::to_string(line));
  if (!it->is_string())
    throw FormatError("field '" + std::string(key) + "' is not a string at line " +
                      std::to_string(line));
  return it->get<std::string>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& j, const char* key,
                                                  std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw FormatError("field '" + std::string(key) + "' is not a string at line " +
                      std::to_string(line));
  return it->get<std::string>();
}

inline std::string record_id(const nlohmann::json& j, std::string_view prefix, std::size_t index) {
  if (auto it = j.find("id"); it != j.end()) {
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::string(prefix) + "-" + it->dump();
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%06zu", index);
  return std::string(prefix) + buf;
}

inline nlohmann::json extras_without(const nlohmann::json& j,
                                     std::initializer_list<std::string_view> known) {
  nlohmann::json extras = nlohmann::json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) extras[it.key()] = it.value();
  }
  return extras;
}

inline bool has_final_marker(std::string_view answer) {
  for (auto line : answer_detail::split_lines(answer))
    if (line.starts_with("#### ")) return true;
  return false;
}

}  // namespace corpus_detail

/// GSM8K-style JSONL: {"question", "answer"}; the answer must contain a
/// "#### " final-answer line.
inline CorpusManifest ingest_gsm8k(const std::filesystem::path& path) {
  using namespace corpus_detail;
  std::vector<Problem> out;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    Problem p;
    p.question = unicode::nfc(required_string(j, "question", line));
    const std::string answer = unicode::nfc(required_string(j, "answer", line));
    if (!has_final_marker(answer))
      throw FormatError("no final-answer marker at line " + std::to_string(line));
    p.id = record_id(j, "gsm8k", out.size() + 1);
    p.source = Source::GSM8K;
    p.language = Language::English;
    p.raw_solution = answer;
    p.extras = extras_without(j, {"id", "question", "answer"});
    out.push_back(std::move(p));
  });
  return CorpusManifest(std::move(out), SourceFormat::Gsm8k, io::file_timestamp(path));
}

/// "Level 3" -> 3. Throws FormatError on other shapes or levels outside 1..5.
inline int parse_math_level(std::string_view text) {
  static const std::regex re(R"(^\s*(?:[Ll]evel\s+)?(\d+)\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, re))
    throw FormatError("unparseable level '" + std::string(text) + "'");
  const int level = std::stoi(m[1].str());
  if (level < 1 || level > 5)
    throw FormatError("level " + std::to_string(level) + " outside 1-5");
  return level;
}

/// MATH-style JSONL: {"problem", "level", "type", "solution"}.
inline CorpusManifest ingest_math(const std::filesystem::path& path) {
  using namespace corpus_detail;
  std::vector<Problem> out;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    Problem p;
    p.question = unicode::nfc(required_string(j, "problem", line));
    const std::string level = required_string(j, "level", line);
    try {
      p.math_level = parse_math_level(level);
    } catch (const FormatError& e) {
      throw FormatError(std::string(e.what()) + " at line " + std::to_string(line));
    }
    p.topic = unicode::nfc(required_string(j, "type", line));
    p.raw_solution = unicode::nfc(required_string(j, "solution", line));
    p.id = record_id(j, "math", out.size() + 1);
    p.source = Source::MATH;
    p.language = Language::English;
    p.extras = extras_without(j, {"id", "problem", "level", "type", "solution"});
    out.push_back(std::move(p));
  });
  return CorpusManifest(std::move(out), SourceFormat::Math, io::file_timestamp(path));
}

/// HAWP-style JSONL: {"question", "operation", optional "solution"}; Hindi.
inline CorpusManifest ingest_hawp(const std::filesystem::path& path) {
  using namespace corpus_detail;
  std::vector<Problem> out;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    Problem p;
    p.question = unicode::nfc(required_string(j, "question", line));
    const std::string tag = required_string(j, "operation", line);
    try {
      p.operation = parse_operation(tag);
    } catch (const FormatError& e) {
      throw FormatError(std::string(e.what()) + " at line " + std::to_string(line));
    }
    if (p.operation == Operation::None)
      throw FormatError("unknown operation tag '" + tag + "' (valid: add, sub, mul, div) at line " +
                        std::to_string(line));
    if (auto sol = optional_string(j, "solution", line)) p.raw_solution = unicode::nfc(*sol);
    p.id = record_id(j, "hawp", out.size() + 1);
    p.source = Source::HAWP;
    p.language = Language::Hindi;
    p.extras = extras_without(j, {"id", "question", "operation", "solution"});
    out.push_back(std::move(p));
  });
  return CorpusManifest(std::move(out), SourceFormat::Hawp, io::file_timestamp(path));
}

/// Curated JSONL: {"question", "language", optional "solution",
/// "structured_solution" (text), "difficulty", "topic", "pair_id"}.
inline CorpusManifest ingest_indimathqa(const std::filesystem::path& path) {
  using namespace corpus_detail;
  std::vector<Problem> out;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    Problem p;
    try {
      p.question = unicode::nfc(required_string(j, "question", line));
      p.language = parse_language(required_string(j, "language", line));
      if (auto sol = optional_string(j, "solution", line)) p.raw_solution = unicode::nfc(*sol);
      if (auto s = optional_string(j, "structured_solution", line))
        p.structured_solution = parse_structured(unicode::nfc(*s));
      if (auto d = optional_string(j, "difficulty", line)) p.difficulty = parse_difficulty(*d);
      if (auto t = optional_string(j, "topic", line)) p.topic = unicode::nfc(*t);
      if (auto pid = optional_string(j, "pair_id", line)) p.pair_id = *pid;
    } catch (const ValidationError& e) {
      throw FormatError(std::string(e.what()) + " at line " + std::to_string(line));
    } catch (const FormatError& e) {
      const std::string what = e.what();
      if (what.find(" at line ") != std::string::npos) throw;
      throw FormatError(what + " at line " + std::to_string(line));
    }
    p.id = record_id(j, "imqa", out.size() + 1);
    p.source = Source::IndiMathQA;
    p.extras = extras_without(j, {"id", "question", "language", "solution", "structured_solution",
                                  "difficulty", "topic", "pair_id"});
    out.push_back(std::move(p));
  });
  return CorpusManifest(std::move(out), SourceFormat::IndiMathQA, io::file_timestamp(path));
}

inline CorpusManifest ingest(SourceFormat format, const std::filesystem::path& path) {
  switch (format) {
    case SourceFormat::Gsm8k: return ingest_gsm8k(path);
    case SourceFormat::Math: return ingest_math(path);
    case SourceFormat::Hawp: return ingest_hawp(path);
    case SourceFormat::IndiMathQA: return ingest_indimathqa(path);
    case SourceFormat::Derived: return load_manifest(path);
  }
  throw DomainError("unknown source format");
}

/// Text used as the training response and as the grading reference source:
/// the structured rendering when present, else the raw solution.
inline std::optional<std::string> solution_text(const Problem& p) {
  if (p.structured_solution) return render_structured(*p.structured_solution, p.language);
  return p.raw_solution;
}

inline std::optional<AnswerValue> reference_answer(const Problem& p) {
  if (p.extras.contains("answer") && p.extras["answer"].is_string())
    return parse_answer_value(p.extras["answer"].get<std::string>());
  if (p.structured_solution && p.structured_solution->final_answer)
    return p.structured_solution->final_answer;
  if (p.raw_solution) return extract_answer(*p.raw_solution, p.language);
  return std::nullopt;
}

}  // namespace bimath

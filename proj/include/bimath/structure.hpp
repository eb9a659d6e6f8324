#pragma once

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bimath/answer.hpp"
#include "bimath/errors.hpp"
#include "bimath/types.hpp"

namespace bimath {

// ---------------------------------------------------------------------------
// Six-phase structured solutions
// ---------------------------------------------------------------------------

enum class Section {
  DataIdentification,
  ProblemAnalysis,
  TheoreticalFramework,
  MethodologyDevelopment,
  Computation,
  Answer,
};

inline constexpr std::size_t kSectionCount = 6;

inline constexpr std::array<std::string_view, kSectionCount> kEnglishHeadings = {
    "Data Identification",     "Problem Analysis", "Theoretical Framework",
    "Methodology Development", "Computation",      "Solution",
};

inline constexpr std::array<std::string_view, kSectionCount> kHindiHeadings = {
    "डेटा पहचान",
    "समस्या विश्लेषण",
    "सैद्धांतिक ढांचा",
    "कार्यप्रणाली विकास",
    "गणना",
    "हल",
};

inline constexpr std::string_view kEnglishAnswerAlias = "Answer";
inline constexpr std::string_view kHindiAnswerAlias = "उत्तर";

inline std::string_view section_name(Section s) {
  return kEnglishHeadings[static_cast<std::size_t>(s)];
}

struct StructuredSolution {
  std::string data_identification;
  std::string problem_analysis;
  std::string theoretical_framework;
  std::string methodology_development;
  std::string computation;
  std::string answer;
  std::optional<AnswerValue> final_answer;

  std::string& section(Section s) {
    return *std::array{&data_identification, &problem_analysis, &theoretical_framework,
                       &methodology_development, &computation, &answer}[static_cast<std::size_t>(s)];
  }
  const std::string& section(Section s) const {
    return const_cast<StructuredSolution*>(this)->section(s);
  }

  bool operator==(const StructuredSolution&) const = default;
};

namespace structure_detail {

struct HeadingMatch {
  Section section;
  Language language;
  std::string inline_body;
};

inline std::string_view strip_leading(std::string_view line) {
  for (;;) {
    line = detail::trim(line);
    if (line.starts_with("\\textbf{")) line.remove_prefix(8);
    else if (!line.empty() && (line[0] == '#' || line[0] == '*' || line[0] == '_'))
      line.remove_prefix(1);
    else
      return line;
  }
}

inline bool is_marker_char(char c) { return c == '*' || c == '}' || c == '_' || c == ' '; }

// Heading names must be followed by a colon (possibly wrapped in bold or
// \textbf markers) or end the line.
inline std::optional<std::string> after_heading(std::string_view rest) {
  std::size_t i = 0;
  while (i < rest.size() && is_marker_char(rest[i])) ++i;
  if (i == rest.size()) return std::string{};
  if (rest[i] == ':') {
    ++i;
  } else if (rest.substr(i).starts_with("\xEF\xBC\x9A")) {
    i += 3;
  } else {
    return std::nullopt;
  }
  while (i < rest.size() && is_marker_char(rest[i])) ++i;
  return std::string(detail::trim(rest.substr(i)));
}

inline std::optional<HeadingMatch> match_heading(std::string_view raw_line) {
  const std::string_view line = strip_leading(raw_line);
  if (line.empty()) return std::nullopt;
  const std::string lowered = detail::lower(line);
  auto try_name = [&](std::string_view name, Section s, Language lang,
                      bool ascii) -> std::optional<HeadingMatch> {
    const std::string_view probe = ascii ? std::string_view(lowered) : line;
    const std::string key = ascii ? detail::lower(name) : std::string(name);
    if (!probe.starts_with(key)) return std::nullopt;
    auto body = after_heading(line.substr(key.size()));
    if (!body) return std::nullopt;
    return HeadingMatch{s, lang, std::move(*body)};
  };
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    if (auto m = try_name(kEnglishHeadings[i], Section(i), Language::English, true)) return m;
    if (auto m = try_name(kHindiHeadings[i], Section(i), Language::Hindi, false)) return m;
  }
  if (auto m = try_name(kEnglishAnswerAlias, Section::Answer, Language::English, true)) return m;
  if (auto m = try_name(kHindiAnswerAlias, Section::Answer, Language::Hindi, false)) return m;
  return std::nullopt;
}

}  // namespace structure_detail

/// Checks the six-sections-nonempty invariant.
inline void validate(const StructuredSolution& s) {
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    if (detail::trim(s.section(Section(i))).empty())
      throw ValidationError("empty section: " + std::string(kEnglishHeadings[i]));
  }
}

/// Builds a solution from six bodies, trimming them and deriving final_answer.
inline StructuredSolution make_structured(std::array<std::string, kSectionCount> bodies,
                                          Language language = Language::English) {
  StructuredSolution s;
  for (std::size_t i = 0; i < kSectionCount; ++i)
    s.section(Section(i)) = std::string(detail::trim(bodies[i]));
  validate(s);
  s.final_answer = extract_answer(s.answer, language);
  return s;
}

/// Splits text at the six headings. Markdown bold, '#' and \textbf{} markers
/// around headings are tolerated; "Answer" is accepted for "Solution". Text
/// before the first heading is ignored.
inline StructuredSolution parse_structured(std::string_view text) {
  std::array<std::optional<std::string>, kSectionCount> bodies;
  std::optional<std::size_t> current;
  std::optional<Language> language;
  std::string buffer;

  auto flush = [&] {
    if (current) bodies[*current] = std::string(detail::trim(buffer));
    buffer.clear();
  };

  for (std::string_view line : answer_detail::split_lines(text)) {
    if (auto h = structure_detail::match_heading(line)) {
      const auto idx = static_cast<std::size_t>(h->section);
      if (bodies[idx] || current == idx)
        throw ValidationError("duplicate section: " + std::string(kEnglishHeadings[idx]));
      if (current && idx < *current)
        throw ValidationError("section out of order: " + std::string(kEnglishHeadings[idx]));
      flush();
      current = idx;
      if (!language) language = h->language;
      buffer = h->inline_body;
      if (!buffer.empty()) buffer.push_back('\n');
      continue;
    }
    if (current) {
      buffer.append(line);
      buffer.push_back('\n');
    }
  }
  flush();

  for (std::size_t i = 0; i < kSectionCount; ++i) {
    if (!bodies[i]) throw ValidationError("missing section: " + std::string(kEnglishHeadings[i]));
  }
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    if (bodies[i]->empty())
      throw ValidationError("empty section: " + std::string(kEnglishHeadings[i]));
  }
  std::array<std::string, kSectionCount> plain;
  for (std::size_t i = 0; i < kSectionCount; ++i) plain[i] = std::move(*bodies[i]);
  return make_structured(std::move(plain), language.value_or(Language::English));
}

/// Canonical form: a bold heading line per section, body, blank line.
inline std::string render_structured(const StructuredSolution& s, Language language) {
  validate(s);
  const auto& headings = language == Language::Hindi ? kHindiHeadings : kEnglishHeadings;
  std::string out;
  for (std::size_t i = 0; i < kSectionCount; ++i) {
    if (i > 0) out += "\n";
    out += "**";
    out += headings[i];
    out += ":**\n";
    out += s.section(Section(i));
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------

enum class PromptName { FineTune, Augment, DecomposeMul, DecomposeDiv };

inline std::string_view to_string(PromptName n) {
  switch (n) {
    case PromptName::FineTune: return "finetune";
    case PromptName::Augment: return "augment";
    case PromptName::DecomposeMul: return "decompose-mul";
    case PromptName::DecomposeDiv: return "decompose-div";
  }
  return "?";
}

inline PromptName parse_prompt_name(std::string_view s) {
  const auto v = detail::lower(s);
  if (v == "finetune" || v == "fine-tune") return PromptName::FineTune;
  if (v == "augment") return PromptName::Augment;
  if (v == "decompose-mul" || v == "decomposemul") return PromptName::DecomposeMul;
  if (v == "decompose-div" || v == "decomposediv") return PromptName::DecomposeDiv;
  throw FormatError("unknown template '" + std::string(s) +
                    "' (valid: finetune, augment, decompose-mul, decompose-div)");
}

struct PromptTemplate {
  PromptName name;
  std::string body;  // placeholders written as {Key}
  std::vector<std::string> placeholders;
};

/// The four shipped templates. Source layouts wrapped prose at a fixed column
/// with hyphenated breaks; the bodies below are re-flowed.
inline PromptTemplate prompt_template(PromptName name) {
  switch (name) {
    case PromptName::FineTune:
      // Instruction preamble, then the calculation caution on its own line.
      return {name,
              "Below is an instruction that describes a task. Write a response that "
              "appropriately completes the request.\n"
              "Be aware of wrong calculations and do not repeat them.\n"
              "\n"
              "### Instruction:\n"
              "{Question}\n"
              "\n"
              "### Response:\n"
              "{Response}",
              {"Question", "Response"}};
    case PromptName::Augment:
      // Original wrapping: "concept-/-ual", "simp-/-le".
      return {name,
              "Your task is to create a similar conceptual question and answer with diverse "
              "difficulty levels (either similarly simple, the same, or more complex) using "
              "the provided problem.\n"
              "\n"
              "Problem:\n"
              "Question: {Example}\n"
              "Answer: {refined_solution}\n"
              "\n"
              "New Problem: {Question}",
              {"Example", "refined_solution", "Question"}};
    case PromptName::DecomposeMul:
      // Original wrapping: "mathem-/-atical", "mu-/-ltiplicand".
      return {name,
              "Your task is modify the following mathematical solution by breaking down the "
              "multiplicand into place value components (hundreds, tens, ones, etc.) and then "
              "multiplying each component by the other multiplicand. Then, sum the products "
              "to get the final result.\n"
              "\n"
              "Answer: {solution}\n"
              "\n"
              "New Answer: {updated_solution}",
              {"solution", "updated_solution"}};
    case PromptName::DecomposeDiv:
      return {name,
              "Your task is modify the following mathematical solution by decomposing the "
              "dividend into segments, then divide each by the divisor, and sum the quotients "
              "to obtain the final answer.\n"
              "\n"
              "Answer: {solution}\n"
              "\n"
              "New Answer: {updated_solution}",
              {"solution", "updated_solution"}};
  }
  throw DomainError("unknown prompt template");
}

using Bindings = std::map<std::string, std::string>;

/// Substitutes every {Key} placeholder in one pass; binding values are not
/// re-scanned, so braces inside them are copied verbatim.
inline std::string render_prompt(const PromptTemplate& tpl, const Bindings& bindings) {
  for (const auto& key : tpl.placeholders) {
    if (!bindings.contains(key)) throw ValidationError("missing binding: " + key);
  }
  std::string out;
  out.reserve(tpl.body.size() + 256);
  const std::string_view body = tpl.body;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      const std::size_t close = body.find('}', i + 1);
      if (close != std::string_view::npos) {
        const std::string key(body.substr(i + 1, close - i - 1));
        if (std::find(tpl.placeholders.begin(), tpl.placeholders.end(), key) !=
            tpl.placeholders.end()) {
          out += bindings.at(key);
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(body[i++]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fine-tuning / sampling configuration
// ---------------------------------------------------------------------------

struct TrainingConfig {
  bool sampling = true;
  int top_k = 40;
  double temperature = 0.8;
  double top_p = 0.90;
  int max_length = 4096;
  int epochs = 3;

  bool operator==(const TrainingConfig&) const = default;
};

namespace structure_detail {

inline std::string format_real(double v, int min_decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of("eE") != std::string::npos) return s;
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    if (min_decimals == 0) return s;
    s += '.';
    dot = s.size() - 1;
  }
  const auto decimals = static_cast<int>(s.size() - dot - 1);
  if (decimals < min_decimals) s.append(static_cast<std::size_t>(min_decimals - decimals), '0');
  return s;
}

}  // namespace structure_detail

inline std::string render_training_config(const TrainingConfig& c) {
  std::string out;
  out += "sampling=" + std::string(c.sampling ? "true" : "false") + "\n";
  out += "top_k=" + std::to_string(c.top_k) + "\n";
  out += "temperature=" + structure_detail::format_real(c.temperature, 1) + "\n";
  out += "top_p=" + structure_detail::format_real(c.top_p, 2) + "\n";
  out += "max_length=" + std::to_string(c.max_length) + "\n";
  out += "epochs=" + std::to_string(c.epochs) + "\n";
  return out;
}

inline void emit_training_config(const std::filesystem::path& path, const TrainingConfig& c = {}) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_training_config(c);
  if (!out) throw IoError("write failed: " + path.string());
}

/// Reads `key=value` lines; blank lines and '#' comments are skipped.
inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t lineno = 0;
  for (std::string_view line : answer_detail::split_lines(text)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError("expected key=value at line " + std::to_string(lineno));
    kv[std::string(detail::trim(line.substr(0, eq)))] = std::string(detail::trim(line.substr(eq + 1)));
  }
  return kv;
}

inline TrainingConfig parse_training_config(std::string_view text) {
  const auto kv = parse_key_values(text);
  TrainingConfig c;
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(std::string("training config missing key ") + key);
    return it->second;
  };
  try {
    c.sampling = get("sampling") == "true";
    c.top_k = std::stoi(get("top_k"));
    c.temperature = std::stod(get("temperature"));
    c.top_p = std::stod(get("top_p"));
    c.max_length = std::stoi(get("max_length"));
    c.epochs = std::stoi(get("epochs"));
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("invalid training config value: ") + e.what());
  }
  return c;
}

}  // namespace bimath

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bimath/corpus.hpp"
#include "bimath/errors.hpp"
#include "bimath/types.hpp"
#include "bimath/unicode.hpp"

namespace bimath {

inline Difficulty map_math_level(int level) {
  switch (level) {
    case 1: return Difficulty::Easy;
    case 2:
    case 3: return Difficulty::Medium;
    case 4:
    case 5: return Difficulty::Hard;
    default: throw DomainError("MATH level " + std::to_string(level) + " outside 1-5");
  }
}

/// Sets the difficulty of every MATH problem from its level; others untouched.
inline CorpusManifest apply_math_levels(const CorpusManifest& manifest) {
  std::vector<Problem> out = manifest.records();
  for (auto& p : out) {
    if (p.source != Source::MATH) continue;
    if (!p.math_level) throw ValidationError(p.id + ": MATH problem without math_level");
    p.difficulty = map_math_level(*p.math_level);
  }
  return derive(manifest, std::move(out));
}

// ---------------------------------------------------------------------------
// Feature-based complexity scoring
// ---------------------------------------------------------------------------

struct ScoringConfig {
  // language understanding, mathematical, reasoning, variables, conceptual
  std::array<double, 5> weights{0.2, 0.2, 0.2, 0.2, 0.2};
  std::map<std::string, int> topic_tiers = default_topic_tiers();
  int default_tier = 1;

  static std::map<std::string, int> default_topic_tiers() {
    return {
        {"prealgebra", 1},
        {"arithmetic", 1},
        {"algebra", 2},
        {"sets", 2},
        {"relations and functions", 2},
        {"number theory", 3},
        {"counting & probability", 3},
        {"probability", 3},
        {"statistics", 3},
        {"permutations and combinations", 3},
        {"sequences and series", 3},
        {"linear inequalities", 3},
        {"geometry", 4},
        {"trigonometry", 4},
        {"binomial theorem", 4},
        {"conic sections", 4},
        {"straight lines", 4},
        {"complex numbers", 4},
        {"matrices", 4},
        {"determinants", 4},
        {"vectors", 4},
        {"intermediate algebra", 5},
        {"precalculus", 5},
        {"limits and derivatives", 5},
        {"continuity and differentiability", 5},
        {"integrals", 5},
        {"integration", 5},
        {"differential equations", 5},
        {"three dimensional geometry", 5},
    };
  }

  int tier_for(const std::optional<std::string>& topic) const {
    if (!topic) return default_tier;
    auto it = topic_tiers.find(detail::lower(detail::trim(*topic)));
    return it == topic_tiers.end() ? default_tier : std::clamp(it->second, 1, 5);
  }
};

struct ComplexityScore {
  double language_understanding = 1;
  double mathematical_complexity = 1;
  double reasoning_complexity = 1;
  double num_variables = 1;
  double conceptual_complexity = 1;
  double total = 1;
  std::map<std::string, double> features;

  std::array<double, 5> sub_scores() const {
    return {language_understanding, mathematical_complexity, reasoning_complexity, num_variables,
            conceptual_complexity};
  }

  bool operator==(const ComplexityScore&) const = default;
};

namespace classify_detail {

// 1 at `lo`, 5 at `hi`, linear and clamped in between.
inline double scale(double x, double lo, double hi) {
  return 1.0 + 4.0 * std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

inline std::size_t count_substr(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

inline constexpr std::array<std::string_view, 15> kOperatorSymbols = {
    "+", "-", "*", "/", "=", "^", "<", ">", "%", "×", "÷", "≤", "≥", "√", "−"};

inline constexpr std::array<std::string_view, 24> kOperatorWords = {
    "plus",    "minus",   "times",   "divided",  "product", "sum",     "difference", "quotient",
    "percent", "square",  "root",    "ratio",    "average", "twice",   "half",       "double",
    "जोड़",      "घटा",      "गुणा",      "भाग",       "योग",      "अंतर",      "प्रतिशत",       "औसत"};

inline constexpr std::array<std::string_view, 14> kFunctionKeywords = {
    "\\frac", "\\sqrt", "\\int", "\\sum", "\\lim", "\\log", "\\ln",
    "\\sin",  "\\cos",  "\\tan", "\\binom", "\\pi", "\\infty", "\\prod"};

inline constexpr std::array<std::string_view, 26> kStepCues = {
    "then",  "after", "before",    "each",  "every",   "remaining", "left",  "total",  "if",
    "more",  "less",  "how many",  "per",   "first",   "next",      "finally", "given", "find",
    "फिर",    "बाद",     "प्रत्येक",     "हर",     "शेष",      "कुल",        "यदि",     "कितने"};

}  // namespace classify_detail

/// Raw text features used by the scorer.
inline std::map<std::string, double> complexity_features(const Problem& p,
                                                         const ScoringConfig& cfg = {}) {
  using namespace classify_detail;
  const std::string text = unicode::ascii_digits(p.question);
  const std::string low = detail::lower(text);

  double tokens = 0, sentences = 0, clauses = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!ws && !in_token) ++tokens;
    in_token = !ws;
    if ((c == '.' || c == '?' || c == '!') &&
        (i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\n') &&
        !(c == '.' && i > 0 && answer_detail::is_digit(text[i - 1]) && i + 1 < text.size() &&
          answer_detail::is_digit(text[i + 1])))
      ++sentences;
    if (c == ',' || c == ';') ++clauses;
  }
  sentences += static_cast<double>(count_substr(text, "।"));  // danda
  if (sentences == 0 && tokens > 0) sentences = 1;

  double operators = 0;
  for (auto sym : kOperatorSymbols) operators += static_cast<double>(count_substr(text, sym));
  // Hyphenated words are not subtraction.
  for (std::size_t i = 1; i + 1 < text.size(); ++i)
    if (text[i] == '-' && answer_detail::is_ascii_alpha(text[i - 1]) &&
        answer_detail::is_ascii_alpha(text[i + 1]))
      operators -= 1;
  double functions = 0;
  for (auto kw : kFunctionKeywords) functions += static_cast<double>(count_substr(text, kw));

  // Word-level cues on the lowercased text.
  std::vector<std::string> words;
  {
    std::string cur;
    for (char c : low) {
      const bool word_char = answer_detail::is_ascii_alpha(c) || (static_cast<unsigned char>(c) >= 0x80);
      if (word_char) cur.push_back(c);
      else if (!cur.empty()) words.push_back(std::exchange(cur, {}));
    }
    if (!cur.empty()) words.push_back(cur);
  }
  double op_words = 0, cues = 0;
  std::set<std::string> identifiers;
  for (const auto& w : words) {
    for (auto kw : kOperatorWords)
      if (w == kw) ++op_words;
    for (auto cue : kStepCues)
      if (cue.find(' ') == std::string_view::npos && w == cue) ++cues;
    if (w.size() == 1 && w != "a" && w != "i") identifiers.insert(w);
  }
  for (auto cue : kStepCues)
    if (cue.find(' ') != std::string_view::npos) cues += static_cast<double>(count_substr(low, cue));

  const double literals = static_cast<double>(answer_detail::numeric_tokens(text).size());

  return {
      {"tokens", tokens},
      {"sentences", sentences},
      {"clauses", clauses},
      {"operators", std::max(0.0, operators) + op_words},
      {"function_keywords", functions},
      {"step_cues", cues},
      {"numeric_literals", literals},
      {"identifiers", static_cast<double>(identifiers.size())},
      {"topic_tier", static_cast<double>(cfg.tier_for(p.topic))},
  };
}

/// Scores the five criteria on a 1-5 scale from text features and combines
/// them with the configured weights. Each sub-score is nondecreasing in the
/// features it reads.
inline ComplexityScore score_complexity(const Problem& p, const ScoringConfig& cfg = {}) {
  using classify_detail::scale;
  ComplexityScore s;
  s.features = complexity_features(p, cfg);
  const auto& f = s.features;
  s.language_understanding =
      0.5 * scale(f.at("tokens"), 8, 80) + 0.5 * scale(f.at("sentences"), 1, 8);
  s.mathematical_complexity =
      scale(f.at("operators") + 2.0 * f.at("function_keywords"), 1, 12);
  s.reasoning_complexity = scale(f.at("clauses") + f.at("step_cues"), 0, 10);
  s.num_variables = scale(f.at("identifiers") + f.at("numeric_literals"), 2, 12);
  s.conceptual_complexity = std::clamp(f.at("topic_tier"), 1.0, 5.0);
  const auto subs = s.sub_scores();
  s.total = 0;
  for (std::size_t i = 0; i < subs.size(); ++i) s.total += cfg.weights[i] * subs[i];
  return s;
}

/// Marks the k lowest-scoring problems Easy (ties broken by id); the rest
/// keep their current difficulty.
inline CorpusManifest rank_bottom_k(const CorpusManifest& manifest, std::size_t k,
                                    const ScoringConfig& cfg = {}) {
  if (k > manifest.size())
    throw DomainError("bottom-k " + std::to_string(k) + " exceeds corpus size " +
                      std::to_string(manifest.size()));
  const auto& recs = manifest.records();
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i)
    ranked.emplace_back(score_complexity(recs[i], cfg).total, i);
  std::sort(ranked.begin(), ranked.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return recs[x.second].id < recs[y.second].id;
  });
  std::vector<Problem> out = recs;
  for (std::size_t r = 0; r < k; ++r) out[ranked[r].second].difficulty = Difficulty::Easy;
  return derive(manifest, std::move(out));
}

struct AnnotationResult {
  CorpusManifest manifest;
  std::map<Difficulty, std::size_t> counts;  // over the annotation map
};

/// Overwrites difficulties from a human annotation map.
inline AnnotationResult apply_annotations(const CorpusManifest& manifest,
                                          const std::map<std::string, Difficulty>& annotations) {
  std::vector<std::string> unknown;
  for (const auto& [id, d] : annotations)
    if (!manifest.find(id)) unknown.push_back(id);
  if (!unknown.empty()) {
    std::string msg = "annotation ids not in manifest:";
    for (const auto& id : unknown) msg += " " + id;
    throw ValidationError(msg);
  }
  AnnotationResult result;
  std::vector<Problem> out = manifest.records();
  for (auto& p : out) {
    if (auto it = annotations.find(p.id); it != annotations.end()) p.difficulty = it->second;
  }
  for (const auto& [id, d] : annotations) ++result.counts[d];
  result.manifest = derive(manifest, std::move(out));
  return result;
}

/// `id<TAB>difficulty` lines; blank lines and '#' comments skipped.
inline std::map<std::string, Difficulty> parse_annotations(std::string_view text) {
  std::map<std::string, Difficulty> out;
  std::size_t lineno = 0;
  for (std::string_view line : answer_detail::split_lines(text)) {
    ++lineno;
    if (detail::trim(line).empty() || detail::trim(line)[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw FormatError("expected id<TAB>difficulty at line " + std::to_string(lineno));
    std::string id(detail::trim(line.substr(0, tab)));
    try {
      const Difficulty d = parse_difficulty(line.substr(tab + 1));
      if (!out.emplace(id, d).second)
        throw FormatError("duplicate annotation for " + id);
    } catch (const FormatError& e) {
      throw FormatError(std::string(e.what()) + " at line " + std::to_string(lineno));
    }
  }
  return out;
}

}  // namespace bimath

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>

#include "bimath/errors.hpp"

namespace bimath {

enum class Language { English, Hindi };
enum class Source { GSM8K, MATH, HAWP, IndiMathQA, Synthetic };
enum class Difficulty { Easy, Medium, Hard, Unclassified };
enum class Operation { Add, Sub, Mul, Div, None };
enum class ReviewStatus { Pending, Approved, Corrected };

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::string_view to_string(Language l) { return l == Language::English ? "en" : "hi"; }

inline Language parse_language(std::string_view s) {
  const auto v = detail::lower(s);
  if (v == "en" || v == "english") return Language::English;
  if (v == "hi" || v == "hindi") return Language::Hindi;
  throw FormatError("unknown language '" + std::string(s) + "' (valid: en, hi)");
}

inline constexpr std::array kAllSources = {Source::GSM8K, Source::MATH, Source::HAWP,
                                           Source::IndiMathQA, Source::Synthetic};

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::GSM8K: return "GSM8K";
    case Source::MATH: return "MATH";
    case Source::HAWP: return "HAWP";
    case Source::IndiMathQA: return "IndiMathQA";
    case Source::Synthetic: return "Synthetic";
  }
  return "?";
}

inline Source parse_source(std::string_view s) {
  const auto v = detail::lower(s);
  for (Source src : kAllSources)
    if (detail::lower(to_string(src)) == v) return src;
  throw FormatError("unknown source '" + std::string(s) +
                    "' (valid: GSM8K, MATH, HAWP, IndiMathQA, Synthetic)");
}

inline constexpr std::array kAllDifficulties = {Difficulty::Easy, Difficulty::Medium,
                                                Difficulty::Hard, Difficulty::Unclassified};

inline std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Medium: return "Medium";
    case Difficulty::Hard: return "Hard";
    case Difficulty::Unclassified: return "Unclassified";
  }
  return "?";
}

inline Difficulty parse_difficulty(std::string_view s) {
  const auto v = detail::lower(detail::trim(s));
  for (Difficulty d : kAllDifficulties)
    if (detail::lower(to_string(d)) == v) return d;
  throw FormatError("unknown difficulty '" + std::string(s) +
                    "' (valid: Easy, Medium, Hard, Unclassified)");
}

inline std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::Add: return "add";
    case Operation::Sub: return "sub";
    case Operation::Mul: return "mul";
    case Operation::Div: return "div";
    case Operation::None: return "none";
  }
  return "?";
}

/// Accepts the short tags plus common spellings and symbols, case-insensitively.
inline Operation parse_operation(std::string_view s) {
  const auto v = detail::lower(detail::trim(s));
  if (v == "add" || v == "addition" || v == "+") return Operation::Add;
  if (v == "sub" || v == "subtraction" || v == "-") return Operation::Sub;
  if (v == "mul" || v == "multiplication" || v == "*" || v == "\xC3\x97") return Operation::Mul;
  if (v == "div" || v == "division" || v == "/" || v == "\xC3\xB7") return Operation::Div;
  if (v == "none") return Operation::None;
  throw FormatError("unknown operation tag '" + std::string(s) +
                    "' (valid: add, sub, mul, div)");
}

inline std::string_view to_string(ReviewStatus r) {
  switch (r) {
    case ReviewStatus::Pending: return "pending";
    case ReviewStatus::Approved: return "approved";
    case ReviewStatus::Corrected: return "corrected";
  }
  return "?";
}

inline ReviewStatus parse_review_status(std::string_view s) {
  const auto v = detail::lower(detail::trim(s));
  if (v == "pending") return ReviewStatus::Pending;
  if (v == "approved") return ReviewStatus::Approved;
  if (v == "corrected") return ReviewStatus::Corrected;
  throw FormatError("unknown review status '" + std::string(s) +
                    "' (valid: pending, approved, corrected)");
}

}  // namespace bimath

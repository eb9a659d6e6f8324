#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bimath/errors.hpp"
#include "bimath/rational.hpp"
#include "bimath/types.hpp"
#include "bimath/unicode.hpp"

namespace bimath {

/// A final answer: an exact rational, a truncated repeating decimal
/// ("0.333..."), or a normalized non-numeric expression.
class AnswerValue {
 public:
  enum class Kind { Rational, Decimal, Expression };

  AnswerValue() = default;

  static AnswerValue rational(Rational value) {
    AnswerValue v;
    v.kind_ = Kind::Rational;
    v.rational_ = std::move(value);
    return v;
  }

  /// `digits` is a plain decimal literal without the trailing ellipsis.
  static AnswerValue decimal(std::string_view digits) {
    auto parsed = parse_decimal(digits);
    if (!parsed) throw DomainError("not a decimal literal: '" + std::string(digits) + "'");
    AnswerValue v;
    v.kind_ = Kind::Decimal;
    v.text_ = normalize_decimal_text(digits);
    v.rational_ = *parsed;
    return v;
  }

  static AnswerValue expression(std::string_view text) {
    AnswerValue v;
    v.kind_ = Kind::Expression;
    v.text_ = normalize_expression(text);
    return v;
  }

  Kind kind() const { return kind_; }
  bool is_numeric() const { return kind_ != Kind::Expression; }

  /// Exact value for Rational, the truncated value for Decimal.
  const Rational& value() const { return rational_; }
  const std::string& decimal_text() const { return text_; }
  const std::string& expression_text() const { return text_; }

  std::string render() const {
    switch (kind_) {
      case Kind::Rational: return format_fraction(rational_);
      case Kind::Decimal: return text_ + "...";
      case Kind::Expression: return text_;
    }
    return {};
  }

  bool operator==(const AnswerValue&) const = default;

  static std::string normalize_expression(std::string_view text);
  static std::string normalize_decimal_text(std::string_view digits);

 private:
  Kind kind_ = Kind::Rational;
  Rational rational_;
  std::string text_;
};

inline std::string_view to_string(AnswerValue::Kind k) {
  switch (k) {
    case AnswerValue::Kind::Rational: return "rational";
    case AnswerValue::Kind::Decimal: return "decimal";
    case AnswerValue::Kind::Expression: return "expression";
  }
  return "?";
}

namespace answer_detail {

inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

inline bool starts_with(std::string_view s, std::string_view p) {
  return s.substr(0, p.size()) == p;
}
inline bool ends_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

// Index one past the brace matching the '{' at `open`, or npos.
inline std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

inline bool ends_with_ellipsis(std::string_view s) {
  return ends_with(s, "...") || ends_with(s, "\xE2\x80\xA6");
}

/// Removes \boxed{}, \( \), \[ \], $ $ wrappers and a trailing sentence period.
inline std::string strip_wrappers(std::string_view text) {
  std::string s(detail::trim(text));
  for (;;) {
    std::string_view v = s;
    if (starts_with(v, "\\boxed{") && match_brace(v, 6) == v.size()) {
      s = std::string(detail::trim(v.substr(7, v.size() - 8)));
    } else if (starts_with(v, "\\(") && ends_with(v, "\\)") && v.size() >= 4) {
      s = std::string(detail::trim(v.substr(2, v.size() - 4)));
    } else if (starts_with(v, "\\[") && ends_with(v, "\\]") && v.size() >= 4) {
      s = std::string(detail::trim(v.substr(2, v.size() - 4)));
    } else if (starts_with(v, "$$") && ends_with(v, "$$") && v.size() >= 4) {
      s = std::string(detail::trim(v.substr(2, v.size() - 4)));
    } else if (starts_with(v, "$") && ends_with(v, "$") && v.size() >= 2) {
      s = std::string(detail::trim(v.substr(1, v.size() - 2)));
    } else if (!v.empty() && v.back() == '.' && !ends_with_ellipsis(v)) {
      s = std::string(detail::trim(v.substr(0, v.size() - 1)));
    } else {
      break;
    }
  }
  return s;
}

struct NumberToken {
  AnswerValue value;
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::optional<AnswerValue> parse_numeric(std::string_view text);

inline std::size_t skip_spaces(std::string_view t, std::size_t i) {
  while (i < t.size() && (t[i] == ' ' || t[i] == '\t')) ++i;
  return i;
}

inline std::size_t read_digits(std::string_view t, std::size_t i) {
  while (i < t.size() && is_digit(t[i])) ++i;
  return i;
}

/// Scans one number starting exactly at `pos`: integers with optional
/// thousands commas, decimals (optionally followed by an ellipsis), "a/b",
/// "k + p/q" mixed forms and \frac{a}{b}. Text must already use ASCII digits.
inline std::optional<NumberToken> scan_number(std::string_view t, std::size_t pos) {
  std::size_t i = pos;
  bool negative = false;
  if (i < t.size() && t[i] == '-') {
    negative = true;
    ++i;
  }
  for (std::string_view cmd : {"\\frac{", "\\dfrac{", "\\tfrac{"}) {
    if (!starts_with(t.substr(i), cmd)) continue;
    const std::size_t open_a = i + cmd.size() - 1;
    const std::size_t end_a = match_brace(t, open_a);
    if (end_a == std::string_view::npos || end_a >= t.size() || t[end_a] != '{') return std::nullopt;
    const std::size_t end_b = match_brace(t, end_a);
    if (end_b == std::string_view::npos) return std::nullopt;
    auto a = parse_numeric(t.substr(open_a + 1, end_a - open_a - 2));
    auto b = parse_numeric(t.substr(end_a + 1, end_b - end_a - 2));
    if (!a || !b || b->value() == 0) return std::nullopt;
    Rational r = a->value() / b->value();
    return NumberToken{AnswerValue::rational(negative ? Rational(-r) : r), pos, end_b};
  }
  if (i >= t.size() || !is_digit(t[i])) return std::nullopt;

  const std::size_t int_begin = i;
  i = read_digits(t, i);
  std::string int_digits(t.substr(int_begin, i - int_begin));
  if (int_digits.size() <= 3) {
    while (i + 4 <= t.size() && t[i] == ',' && is_digit(t[i + 1]) && is_digit(t[i + 2]) &&
           is_digit(t[i + 3]) && (i + 4 == t.size() || !is_digit(t[i + 4]))) {
      int_digits.append(t.substr(i + 1, 3));
      i += 4;
    }
  }
  std::string literal = int_digits;
  bool has_point = false;
  if (i + 1 < t.size() && t[i] == '.' && is_digit(t[i + 1])) {
    const std::size_t frac_begin = i + 1;
    i = read_digits(t, frac_begin);
    literal += "." + std::string(t.substr(frac_begin, i - frac_begin));
    has_point = true;
  }
  const std::string signed_literal = negative ? "-" + literal : literal;
  if (has_point) {
    if (starts_with(t.substr(i), "...")) {
      return NumberToken{AnswerValue::decimal(signed_literal), pos, i + 3};
    }
    if (starts_with(t.substr(i), "\xE2\x80\xA6")) {
      return NumberToken{AnswerValue::decimal(signed_literal), pos, i + 3};
    }
    return NumberToken{AnswerValue::rational(*parse_decimal(signed_literal)), pos, i};
  }
  const Rational whole = *parse_decimal(signed_literal);

  // a/b
  std::size_t j = skip_spaces(t, i);
  if (j < t.size() && t[j] == '/') {
    const std::size_t k = skip_spaces(t, j + 1);
    const std::size_t kend = read_digits(t, k);
    if (kend > k) {
      const Rational den = *parse_decimal(t.substr(k, kend - k));
      if (den != 0 && (kend == t.size() || t[kend] != '.' || kend + 1 == t.size() ||
                       !is_digit(t[kend + 1]))) {
        return NumberToken{AnswerValue::rational(whole / den), pos, kend};
      }
    }
  }
  // k + p/q with p < q
  if (!negative && j < t.size() && t[j] == '+') {
    std::size_t k = skip_spaces(t, j + 1);
    const std::size_t pend = read_digits(t, k);
    if (pend > k) {
      std::size_t m = skip_spaces(t, pend);
      if (m < t.size() && t[m] == '/') {
        const std::size_t q = skip_spaces(t, m + 1);
        const std::size_t qend = read_digits(t, q);
        if (qend > q) {
          const Rational p = *parse_decimal(t.substr(k, pend - k));
          const Rational d = *parse_decimal(t.substr(q, qend - q));
          if (d != 0 && p < d && p > 0 && (qend == t.size() || t[qend] != '.')) {
            return NumberToken{AnswerValue::rational(whole + p / d), pos, qend};
          }
        }
      }
    }
  }
  return NumberToken{AnswerValue::rational(whole), pos, i};
}

/// Whole-string numeric parse after wrapper stripping; "%" suffix tolerated.
inline std::optional<AnswerValue> parse_numeric(std::string_view text) {
  std::string s = strip_wrappers(text);
  if (ends_with(s, "\\%")) s.resize(s.size() - 2);
  else if (ends_with(s, "%")) s.resize(s.size() - 1);
  s = std::string(detail::trim(s));
  if (s.empty()) return std::nullopt;
  if (s[0] == '+') s.erase(0, 1);
  auto tok = scan_number(s, 0);
  if (!tok || tok->end != s.size()) return std::nullopt;
  return tok->value;
}

inline bool blocks_standalone_before(std::string_view t, std::size_t pos) {
  if (pos == 0) return false;
  const char p = t[pos - 1];
  if (is_ascii_alpha(p) || is_digit(p) || p == '_' || p == '^' || p == '.') return true;
  if (p == '{' && pos >= 2 && (t[pos - 2] == '^' || t[pos - 2] == '_')) return true;
  return false;
}

inline bool blocks_standalone_after(std::string_view t, std::size_t end) {
  if (end >= t.size()) return false;
  const char n = t[end];
  return is_ascii_alpha(n) || is_digit(n) || n == '_' || n == '^';
}

/// All standalone numbers in `t`, left to right.
inline std::vector<NumberToken> numeric_tokens(std::string_view t) {
  std::vector<NumberToken> out;
  std::size_t pos = 0;
  while (pos < t.size()) {
    const char c = t[pos];
    const bool candidate = is_digit(c) || c == '\\' ||
                           (c == '-' && pos + 1 < t.size() &&
                            (is_digit(t[pos + 1]) || t[pos + 1] == '\\'));
    if (!candidate || blocks_standalone_before(t, pos)) {
      ++pos;
      continue;
    }
    if (c == '-' && pos > 0) {
      // Binary minus ("5-3") is not a sign.
      std::size_t k = pos;
      while (k > 0 && is_space(t[k - 1])) --k;
      // A spaced dash after a word ("is -7") is still a sign; after a
      // single-letter variable ("x - 3") it is an operator.
      std::size_t w = k;
      while (w > 0 && is_ascii_alpha(t[w - 1])) --w;
      const bool after_word = k < pos && k - w >= 2;
      if (k > 0 && !after_word &&
          (is_ascii_alpha(t[k - 1]) || is_digit(t[k - 1]) || t[k - 1] == ')' || t[k - 1] == '}' ||
           t[k - 1] == ']')) {
        ++pos;
        continue;
      }
    }
    auto tok = scan_number(t, pos);
    if (tok && !blocks_standalone_after(t, tok->end)) {
      out.push_back(*tok);
      pos = tok->end;
    } else if (tok) {
      pos = tok->end;
    } else {
      ++pos;
    }
  }
  return out;
}

/// Prose: contains a word of 3+ ASCII letters (LaTeX commands excluded) or
/// 2+ Devanagari letters.
inline bool looks_like_prose(std::string_view t) {
  bool prose = false;
  std::size_t ascii_run = 0, deva_run = 0;
  bool command = false;
  char32_t prev = 0;
  unicode::for_each_codepoint(t, [&](char32_t cp, std::size_t, std::size_t) {
    if (prose) return;
    if (cp < 128 && is_ascii_alpha(static_cast<char>(cp))) {
      if (ascii_run == 0) command = prev == U'\\';
      ++ascii_run;
      if (ascii_run >= 3 && !command) prose = true;
    } else {
      ascii_run = 0;
    }
    if (unicode::is_devanagari_letter(cp)) {
      if (++deva_run >= 2) prose = true;
    } else {
      deva_run = 0;
    }
    prev = cp;
  });
  return prose;
}

/// Interprets the text following a final-answer marker.
inline std::optional<AnswerValue> interpret_final(std::string_view content) {
  const std::string stripped = strip_wrappers(content);
  if (stripped.empty()) return std::nullopt;
  if (auto v = parse_numeric(stripped)) return v;
  if (looks_like_prose(stripped)) {
    auto toks = numeric_tokens(stripped);
    if (!toks.empty()) return toks.back().value;
  }
  return AnswerValue::expression(stripped);
}

inline std::vector<std::string_view> split_lines(std::string_view t) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= t.size()) {
    std::size_t nl = t.find('\n', start);
    if (nl == std::string_view::npos) nl = t.size();
    std::string_view line = t.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

inline std::string_view strip_line_decoration(std::string_view line) {
  for (;;) {
    line = detail::trim(line);
    if (starts_with(line, "\\textbf{")) line.remove_prefix(8);
    else if (starts_with(line, "\\item")) line.remove_prefix(5);
    else if (!line.empty() && (line[0] == '*' || line[0] == '#' || line[0] == '>' ||
                               line[0] == '-' || line[0] == '_'))
      line.remove_prefix(1);
    else
      return line;
  }
}

// Length of the final-answer marker at the start of `line`, or 0.
inline std::size_t final_marker_length(std::string_view line, Language lang) {
  if (detail::lower(line.substr(0, 12)) == "final answer") return 12;
  constexpr std::string_view kHindiFinal = "\xE0\xA4\x85\xE0\xA4\x82\xE0\xA4\xA4\xE0\xA4\xBF"
                                           "\xE0\xA4\xAE \xE0\xA4\x89\xE0\xA4\xA4\xE0\xA5\x8D"
                                           "\xE0\xA4\xA4\xE0\xA4\xB0";  // अंतिम उत्तर
  constexpr std::string_view kHindiAnswer = "\xE0\xA4\x89\xE0\xA4\xA4\xE0\xA5\x8D\xE0\xA4\xA4"
                                            "\xE0\xA4\xB0";  // उत्तर
  if (starts_with(line, kHindiFinal)) return kHindiFinal.size();
  if (lang == Language::Hindi && starts_with(line, kHindiAnswer)) {
    const auto rest = detail::trim(line.substr(kHindiAnswer.size()));
    if (starts_with(rest, ":") || starts_with(rest, "\xEF\xBC\x9A") || starts_with(rest, "*"))
      return kHindiAnswer.size();
  }
  return 0;
}

inline std::string_view strip_marker_tail(std::string_view rest) {
  for (;;) {
    rest = detail::trim(rest);
    // A '-' directly before a number is its sign, not a separator.
    const bool dash_separator =
        starts_with(rest, "-") && !(rest.size() > 1 && (is_digit(rest[1]) || rest[1] == '\\' || rest[1] == '.'));
    if (starts_with(rest, "}") || starts_with(rest, "*") || starts_with(rest, ":") || dash_separator)
      rest.remove_prefix(1);
    else if (starts_with(rest, "\xEF\xBC\x9A"))  // fullwidth colon
      rest.remove_prefix(3);
    else
      return rest;
  }
}

}  // namespace answer_detail

inline std::string AnswerValue::normalize_expression(std::string_view text) {
  std::string s = unicode::ascii_digits(text);
  s = answer_detail::replace_all(std::move(s), "\xE2\x88\x92", "-");  // U+2212 minus
  std::string collapsed;
  bool pending_space = false;
  for (char c : s) {
    if (answer_detail::is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(c);
  }
  std::string stripped = answer_detail::strip_wrappers(collapsed);
  if (stripped == collapsed) return collapsed;
  return normalize_expression(stripped);
}

inline std::string AnswerValue::normalize_decimal_text(std::string_view digits) {
  std::string s(detail::trim(digits));
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  std::size_t nz = 0;
  while (nz + 1 < s.size() && s[nz] == '0' && s[nz + 1] != '.') ++nz;
  s.erase(0, nz);
  if (!s.empty() && s[0] == '.') s.insert(0, "0");
  return negative ? "-" + s : s;
}

/// Finds the final answer in model output. Priority: last \boxed{...}, last
/// "Final Answer" line (or its Hindi equivalent), last "#### " line, last
/// standalone number. Devanagari digits are read as ASCII digits.
inline std::optional<AnswerValue> extract_answer(std::string_view output_text,
                                                 Language language = Language::English) {
  using namespace answer_detail;
  const std::string text = unicode::ascii_digits(unicode::nfc(output_text));
  const std::string_view t = text;

  for (std::string_view cmd : {"\\boxed{", "\\fbox{"}) {
    const std::size_t at = t.rfind(cmd);
    if (at == std::string_view::npos) continue;
    const std::size_t open = at + cmd.size() - 1;
    const std::size_t close = match_brace(t, open);
    if (close == std::string_view::npos) continue;
    if (auto v = interpret_final(t.substr(open + 1, close - open - 2))) return v;
  }

  const auto lines = split_lines(t);
  for (std::size_t li = lines.size(); li-- > 0;) {
    const std::string_view line = strip_line_decoration(lines[li]);
    const std::size_t marker = final_marker_length(line, language);
    if (marker == 0) continue;
    std::string content(strip_marker_tail(line.substr(marker)));
    if (content.empty()) {
      for (std::size_t k = li + 1; k < lines.size(); ++k) {
        if (detail::trim(lines[k]).empty()) {
          if (!content.empty()) break;
          continue;
        }
        content.append(lines[k]);
        content.push_back('\n');
      }
    }
    if (auto v = interpret_final(content)) return v;
  }

  for (std::size_t li = lines.size(); li-- > 0;) {
    const std::string_view line = detail::trim(lines[li]);
    if (!starts_with(line, "####")) continue;
    if (auto v = interpret_final(line.substr(4))) return v;
  }

  auto toks = numeric_tokens(t);
  if (!toks.empty()) return toks.back().value;
  return std::nullopt;
}

/// Parses a reference answer given as plain text ("2/3", "0.5", "x+1", "0.333...").
inline AnswerValue parse_answer_value(std::string_view text) {
  const std::string t = unicode::ascii_digits(text);
  if (auto v = answer_detail::parse_numeric(t)) return *v;
  return AnswerValue::expression(t);
}

inline nlohmann::json to_json_value(const AnswerValue& v) {
  std::string value;
  switch (v.kind()) {
    case AnswerValue::Kind::Rational: value = format_fraction(v.value()); break;
    case AnswerValue::Kind::Decimal: value = v.decimal_text(); break;
    case AnswerValue::Kind::Expression: value = v.expression_text(); break;
  }
  return {{"kind", std::string(to_string(v.kind()))}, {"value", value}};
}

inline AnswerValue answer_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::string value = j.at("value").get<std::string>();
  if (kind == "rational") {
    auto v = answer_detail::parse_numeric(value);
    if (!v || v->kind() != AnswerValue::Kind::Rational)
      throw FormatError("invalid rational answer '" + value + "'");
    return *v;
  }
  if (kind == "decimal") return AnswerValue::decimal(value);
  if (kind == "expression") return AnswerValue::expression(value);
  throw FormatError("unknown answer kind '" + kind + "'");
}

}  // namespace bimath

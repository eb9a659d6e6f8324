#pragma once

#include <cstdint>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bimath/corpus.hpp"
#include "bimath/errors.hpp"
#include "bimath/rational.hpp"
#include "bimath/types.hpp"
#include "bimath/unicode.hpp"

namespace bimath {

// Operands must stay below 10^18.
inline constexpr std::int64_t kOperandLimit = 1'000'000'000'000'000'000LL;

/// Place-value rewrite of a single multiplication or division.
///
/// Multiplication decomposes the first operand into its nonzero digits times
/// powers of ten; each component is multiplied by the second operand.
/// Division follows long division: each nonzero quotient digit q at 10^i
/// contributes the dividend segment q*10^i*divisor, and a nonzero remainder r
/// becomes a final segment with the fractional partial r/divisor.
struct DecompositionTrace {
  enum class Kind { Multiplication, Division };

  struct Component {
    std::uint64_t segment = 0;
    Rational partial;
    bool operator==(const Component&) const = default;
  };

  Kind kind = Kind::Multiplication;
  std::uint64_t operand_a = 0;  // multiplicand / dividend
  std::uint64_t operand_b = 0;  // multiplier / divisor
  std::vector<Component> components;
  Rational total;

  bool operator==(const DecompositionTrace&) const = default;
};

namespace decompose_detail {

inline void check_operand(std::int64_t v, const char* role) {
  if (v < 0) throw DomainError(std::string(role) + " must be non-negative");
  if (v >= kOperandLimit) throw DomainError(std::string(role) + " must be below 10^18");
}

// Nonzero digits of v as d*10^i in descending place order.
inline std::vector<std::uint64_t> place_values(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  std::uint64_t place = 1;
  while (v > 0) {
    const std::uint64_t d = v % 10;
    if (d != 0) out.push_back(d * place);
    v /= 10;
    if (v > 0) place *= 10;
  }
  return {out.rbegin(), out.rend()};
}

}  // namespace decompose_detail

inline DecompositionTrace decompose_mul(std::int64_t a, std::int64_t b) {
  decompose_detail::check_operand(a, "multiplicand");
  decompose_detail::check_operand(b, "multiplier");
  DecompositionTrace t;
  t.kind = DecompositionTrace::Kind::Multiplication;
  t.operand_a = static_cast<std::uint64_t>(a);
  t.operand_b = static_cast<std::uint64_t>(b);
  auto segments = decompose_detail::place_values(t.operand_a);
  if (segments.empty()) segments.push_back(0);
  for (std::uint64_t seg : segments) {
    Rational partial = Rational(BigInt(seg) * BigInt(t.operand_b));
    t.total += partial;
    t.components.push_back({seg, std::move(partial)});
  }
  return t;
}

inline DecompositionTrace decompose_div(std::int64_t a, std::int64_t b) {
  decompose_detail::check_operand(a, "dividend");
  if (b == 0) throw DivisionByZeroError("division by zero");
  decompose_detail::check_operand(b, "divisor");
  DecompositionTrace t;
  t.kind = DecompositionTrace::Kind::Division;
  t.operand_a = static_cast<std::uint64_t>(a);
  t.operand_b = static_cast<std::uint64_t>(b);
  const std::uint64_t quotient = t.operand_a / t.operand_b;
  const std::uint64_t remainder = t.operand_a % t.operand_b;
  for (std::uint64_t q : decompose_detail::place_values(quotient)) {
    // q * b <= a < 10^18, no overflow.
    t.components.push_back({q * t.operand_b, Rational(q)});
  }
  if (remainder > 0) t.components.push_back({remainder, Rational(remainder, t.operand_b)});
  if (t.components.empty()) t.components.push_back({0, Rational(0)});
  for (const auto& c : t.components) t.total += c.partial;
  return t;
}

/// Checks the sum and shape invariants of a trace; throws DomainError.
inline void check_trace(const DecompositionTrace& t) {
  BigInt seg_sum = 0;
  Rational partial_sum = 0;
  for (const auto& c : t.components) {
    seg_sum += c.segment;
    partial_sum += c.partial;
  }
  if (t.components.empty()) throw DomainError("trace has no components");
  if (seg_sum != t.operand_a) throw DomainError("segments do not sum to the decomposed operand");
  if (partial_sum != t.total) throw DomainError("partials do not sum to the total");
  if (t.kind == DecompositionTrace::Kind::Multiplication) {
    if (t.total != Rational(BigInt(t.operand_a) * BigInt(t.operand_b)))
      throw DomainError("product mismatch");
    for (const auto& c : t.components)
      if (c.partial != Rational(BigInt(c.segment) * BigInt(t.operand_b)))
        throw DomainError("component partial mismatch");
  } else {
    if (t.operand_b == 0) throw DivisionByZeroError("division by zero");
    if (t.total != Rational(t.operand_a, t.operand_b)) throw DomainError("quotient mismatch");
    for (std::size_t i = 0; i < t.components.size(); ++i) {
      const auto& c = t.components[i];
      if (c.partial != Rational(c.segment, t.operand_b))
        throw DomainError("component partial mismatch");
      if (!is_integer(c.partial) && i + 1 != t.components.size())
        throw DomainError("fractional partial before the last component");
    }
  }
}

namespace decompose_detail {

inline std::string join_numbers(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += " + ";
    out += items[i];
  }
  return out;
}

}  // namespace decompose_detail

/// Solution text for a trace: decomposition line, one line per component,
/// sum line and a closing "Final Answer" sentence. Hindi uses a fixed
/// sentence template with ASCII digits.
inline std::string render_trace(const DecompositionTrace& t, Language language) {
  check_trace(t);
  const bool mul = t.kind == DecompositionTrace::Kind::Multiplication;
  const std::string a = std::to_string(t.operand_a);
  const std::string b = std::to_string(t.operand_b);
  const std::string op = mul ? "\xC3\x97" : "\xC3\xB7";  // × ÷
  const std::string total = format_rational(t.total);

  std::vector<std::string> segments, partials;
  for (const auto& c : t.components) {
    segments.push_back(std::to_string(c.segment));
    partials.push_back(format_rational(c.partial));
  }

  std::string out;
  if (language == Language::English) {
    out += "Break down " + a + " into place value components:\n\n";
  } else {
    out += a + " को स्थानीय मान घटकों में विभाजित करें:\n\n";
  }
  out += a + " = " + decompose_detail::join_numbers(segments) + "\n\n";
  if (language == Language::English) {
    out += std::string(mul ? "Multiply each component by " : "Divide each component by ") + b +
           ":\n\n";
  } else {
    out += "प्रत्येक घटक को " + b + (mul ? " से गुणा करें:\n\n" : " से भाग दें:\n\n");
  }
  for (std::size_t i = 0; i < t.components.size(); ++i) {
    out += segments[i] + " " + op + " " + b + " = " + partials[i] + "\n\n";
  }
  if (language == Language::English) {
    out += mul ? "Add the products:\n" : "Add the quotients:\n";
  } else {
    out += mul ? "गुणनफलों को जोड़ें:\n" : "भागफलों को जोड़ें:\n";
  }
  out += decompose_detail::join_numbers(partials) + " = " + total + "\n\n";
  if (language == Language::English) {
    out += "Final Answer: " + a + (mul ? " multiplied by " : " divided by ") + b + " equals " +
           total + ".";
  } else {
    out += "अंतिम उत्तर: " + a + " को " + b +
           (mul ? " से गुणा करने पर " : " से भाग देने पर ") + total + " प्राप्त होता है।";
  }
  return out;
}

struct Operands {
  std::int64_t a = 0;
  std::int64_t b = 0;
};

/// Finds the operands of the last "<int> (×|÷|*|/) <int> = <number>" line of
/// `solution`, accepting Devanagari digits and thousands commas. Returns
/// nullopt when no line matches the operation or an operand is not a
/// non-negative integer below 10^18.
inline std::optional<Operands> extract_operands(std::string_view solution, Operation op) {
  static const std::regex line_re(
      R"((\d[\d,]*(?:\.\d+)?)\s*(×|÷|\*|/|x)\s*(\d[\d,]*(?:\.\d+)?)\s*=\s*-?\d[\d,]*(?:\.\d+)?)");
  const std::string text = unicode::ascii_digits(solution);
  std::optional<Operands> found;
  bool last_was_decimal = false;
  for (std::string_view line : answer_detail::split_lines(text)) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(line.begin(), line.end(), m, line_re)) continue;
    const std::string sym = m[2].str();
    const bool is_mul = sym == "\xC3\x97" || sym == "*" || sym == "x";
    const bool is_div = sym == "\xC3\xB7" || sym == "/";
    if ((op == Operation::Mul && !is_mul) || (op == Operation::Div && !is_div)) continue;
    auto to_int = [](std::string s) -> std::optional<std::int64_t> {
      std::erase(s, ',');
      if (s.find('.') != std::string::npos || s.empty() || s.size() > 18) return std::nullopt;
      return std::stoll(s);
    };
    auto a = to_int(m[1].str());
    auto b = to_int(m[3].str());
    if (a && b) {
      found = Operands{*a, *b};
      last_was_decimal = false;
    } else {
      last_was_decimal = true;
    }
  }
  if (last_was_decimal) return std::nullopt;
  return found;
}

struct DecomposeOptions {
  bool multiplication = true;
  bool division = true;
  std::optional<Language> language;  // nullopt: each problem's own language
};

struct DecomposeResult {
  CorpusManifest manifest;
  std::size_t rewritten = 0;
  std::vector<std::string> skipped_ids;  // operand extraction or domain failures
};

/// Replaces the raw solution of Mul/Div problems with rendered trace text.
/// Operands come from extras "operand_a"/"operand_b" when present, else from
/// the raw solution's final computation line. Other problems pass through.
inline DecomposeResult apply_decomposition(const CorpusManifest& manifest,
                                           const DecomposeOptions& opts = {}) {
  DecomposeResult result;
  std::vector<Problem> out;
  out.reserve(manifest.size());
  for (const auto& p : manifest.records()) {
    const bool selected = (p.operation == Operation::Mul && opts.multiplication) ||
                          (p.operation == Operation::Div && opts.division);
    if (!selected) {
      out.push_back(p);
      continue;
    }
    std::optional<Operands> ops;
    if (p.extras.contains("operand_a") && p.extras.contains("operand_b") &&
        p.extras["operand_a"].is_number_integer() && p.extras["operand_b"].is_number_integer()) {
      ops = Operands{p.extras["operand_a"].get<std::int64_t>(),
                     p.extras["operand_b"].get<std::int64_t>()};
    } else if (p.raw_solution) {
      ops = extract_operands(*p.raw_solution, p.operation);
    }
    if (!ops) {
      result.skipped_ids.push_back(p.id);
      out.push_back(p);
      continue;
    }
    try {
      const auto trace =
          p.operation == Operation::Mul ? decompose_mul(ops->a, ops->b) : decompose_div(ops->a, ops->b);
      Problem q = p;
      q.raw_solution = render_trace(trace, opts.language.value_or(p.language));
      out.push_back(std::move(q));
      ++result.rewritten;
    } catch (const DomainError&) {
      result.skipped_ids.push_back(p.id);
      out.push_back(p);
    }
  }
  result.manifest = derive(manifest, std::move(out));
  return result;
}

}  // namespace bimath

#include <gtest/gtest.h>

#include <random>

#include "bimath/decompose.hpp"
#include "test_util.hpp"

using namespace bimath;

namespace {

std::vector<std::uint64_t> segments(const DecompositionTrace& t) {
  std::vector<std::uint64_t> out;
  for (const auto& c : t.components) out.push_back(c.segment);
  return out;
}

std::vector<Rational> partials(const DecompositionTrace& t) {
  std::vector<Rational> out;
  for (const auto& c : t.components) out.push_back(c.partial);
  return out;
}

}  // namespace

TEST(DecomposeMul, WorkedExample) {
  const auto t = decompose_mul(543, 27);
  EXPECT_EQ(segments(t), (std::vector<std::uint64_t>{500, 40, 3}));
  EXPECT_EQ(partials(t), (std::vector<Rational>{13500, 1080, 81}));
  EXPECT_EQ(t.total, Rational(14661));
  check_trace(t);
}

TEST(DecomposeMul, ZeroAndGaps) {
  auto t = decompose_mul(0, 7);
  EXPECT_EQ(segments(t), (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(t.total, Rational(0));
  t = decompose_mul(507, 12);
  EXPECT_EQ(segments(t), (std::vector<std::uint64_t>{500, 7}));
  EXPECT_EQ(partials(t), (std::vector<Rational>{6000, 84}));
  EXPECT_EQ(t.total, Rational(6084));
}

TEST(DecomposeMul, Domain) {
  EXPECT_THROW(decompose_mul(-1, 3), DomainError);
  EXPECT_THROW(decompose_mul(3, -1), DomainError);
  EXPECT_THROW(decompose_mul(kOperandLimit, 1), DomainError);
}

TEST(DecomposeDiv, WorkedExample) {
  const auto t = decompose_div(968, 16);
  EXPECT_EQ(t.total, Rational(121, 2));
  std::uint64_t sum = 0;
  for (auto s : segments(t)) sum += s;
  EXPECT_EQ(sum, 968u);
  check_trace(t);
}

TEST(DecomposeDiv, Canonical) {
  auto t = decompose_div(42, 1);
  EXPECT_EQ(segments(t), (std::vector<std::uint64_t>{40, 2}));
  t = decompose_div(1234, 5);
  EXPECT_EQ(segments(t), (std::vector<std::uint64_t>{1000, 200, 30, 4}));
  EXPECT_EQ(partials(t), (std::vector<Rational>{200, 40, 6, Rational(4, 5)}));
  EXPECT_EQ(t.total, Rational(1234, 5));
  t = decompose_div(3, 7);
  EXPECT_EQ(segments(t), (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(t.total, Rational(3, 7));
}

TEST(DecomposeDiv, Errors) {
  EXPECT_THROW(decompose_div(5, 0), DivisionByZeroError);
  EXPECT_THROW(decompose_div(-5, 2), DomainError);
}

TEST(Decompose, RandomInvariants) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 2000; ++i) {
    const auto a = static_cast<std::int64_t>(rng() % 1'000'000'000);
    const auto b = static_cast<std::int64_t>(1 + rng() % 9999);
    const auto m = decompose_mul(a, b);
    check_trace(m);
    // Segment count equals the number of nonzero digits.
    std::size_t nonzero = 0;
    for (auto x = a; x; x /= 10) nonzero += x % 10 != 0;
    EXPECT_EQ(m.components.size(), a == 0 ? 1 : nonzero);
    for (std::size_t k = 1; k < m.components.size(); ++k)
      EXPECT_GT(m.components[k - 1].segment, m.components[k].segment);
    check_trace(decompose_div(a, b));
  }
}

TEST(Render, EnglishMultiplication) {
  const auto text = render_trace(decompose_mul(543, 27), Language::English);
  EXPECT_NE(text.find("543 = 500 + 40 + 3"), std::string::npos);
  EXPECT_NE(text.find("500 × 27 = 13500"), std::string::npos);
  EXPECT_NE(text.find("13500 + 1080 + 81 = 14661"), std::string::npos);
  EXPECT_TRUE(text.ends_with("Final Answer: 543 multiplied by 27 equals 14661."));
  EXPECT_EQ(text, render_trace(decompose_mul(543, 27), Language::English));
}

TEST(Render, ZeroAndDivision) {
  auto text = render_trace(decompose_mul(0, 7), Language::English);
  EXPECT_NE(text.find("0 × 7 = 0"), std::string::npos);
  EXPECT_EQ(extract_answer(text)->value(), Rational(0));
  text = render_trace(decompose_div(1234, 5), Language::English);
  EXPECT_NE(text.find("1000 ÷ 5 = 200"), std::string::npos);
  EXPECT_NE(text.find("4 ÷ 5 = 0.8"), std::string::npos);
  EXPECT_NE(text.find("= 246.8"), std::string::npos);
  EXPECT_EQ(extract_answer(text)->value(), Rational(1234, 5));
}

TEST(Render, HindiTemplate) {
  const auto text = render_trace(decompose_div(968, 16), Language::Hindi);
  EXPECT_NE(text.find("भागफलों को जोड़ें"), std::string::npos);
  EXPECT_NE(text.find("अंतिम उत्तर: 968 को 16 से भाग देने पर 60.5 प्राप्त होता है।"), std::string::npos);
  EXPECT_EQ(extract_answer(text, Language::Hindi)->value(), Rational(121, 2));
}

TEST(Render, RepeatingQuotient) {
  const auto text = render_trace(decompose_div(10, 3), Language::English);
  EXPECT_NE(text.find("3 + 1/3"), std::string::npos);
  EXPECT_EQ(extract_answer(text)->value(), Rational(10, 3));
}

TEST(Operands, Extraction) {
  auto o = extract_operands("first 2 × 3 = 6\n543 × 27 = 14661", Operation::Mul);
  ASSERT_TRUE(o);
  EXPECT_EQ(o->a, 543);
  EXPECT_EQ(o->b, 27);
  o = extract_operands("९६८ ÷ १६ = ६०.५", Operation::Div);
  ASSERT_TRUE(o);
  EXPECT_EQ(o->a, 968);
  EXPECT_FALSE(extract_operands("no computation", Operation::Div));
  EXPECT_FALSE(extract_operands("2.5 × 4 = 10", Operation::Mul));
}

TEST(Apply, OperationFilterAndFlags) {
  std::vector<Problem> ps;
  const std::array<std::pair<Operation, std::string>, 5> rows = {{
      {Operation::Add, "2 + 3 = 5"},
      {Operation::Sub, "5 - 3 = 2"},
      {Operation::Mul, "543 × 27 = 14661"},
      {Operation::Div, "968 ÷ 16 = 60.5"},
      {Operation::Div, "no line here"},
  }};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Problem p;
    p.id = "h" + std::to_string(i);
    p.source = Source::HAWP;
    p.language = Language::Hindi;
    p.question = "q";
    p.operation = rows[i].first;
    p.raw_solution = rows[i].second;
    ps.push_back(p);
  }
  const CorpusManifest m(ps, SourceFormat::Hawp, "2024-01-01T00:00:00Z");
  const auto r = apply_decomposition(m);
  EXPECT_EQ(r.rewritten, 2u);
  EXPECT_EQ(r.skipped_ids, std::vector<std::string>{"h4"});
  ASSERT_EQ(r.manifest.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(r.manifest.records()[i].id, m.records()[i].id);
  EXPECT_EQ(r.manifest.records()[0], m.records()[0]);
  EXPECT_EQ(r.manifest.records()[2].raw_solution, render_trace(decompose_mul(543, 27), Language::Hindi));
  EXPECT_EQ(r.manifest.records()[4].raw_solution, m.records()[4].raw_solution);

  const auto en = apply_decomposition(m, {true, false, Language::English});
  EXPECT_EQ(en.rewritten, 1u);
  EXPECT_TRUE(en.manifest.records()[2].raw_solution->ends_with("equals 14661."));
}

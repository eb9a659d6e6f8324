#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bimath/corpus.hpp"
#include "bimath/io.hpp"
#include "bimath/rational.hpp"
#include "bimath/structure.hpp"
#include "bimath/types.hpp"

// Small generated corpora, one per ingest format, used by the `demo` command.
namespace bimath::demo {

// Fixed modification time stamped on written fixtures so that manifests
// derived from them carry a stable created_at.
inline constexpr std::int64_t kFixtureEpochSeconds = 1704067200;  // 2024-01-01T00:00:00Z

inline constexpr std::string_view kHyperbolaQuestion =
    R"EX(Find the equation of the hyperbola with foci $(0, \pm 3)$ and vertices $\left(0, \pm \frac{\sqrt{11}}{2}\right)$.)EX";

inline constexpr std::string_view kHyperbolaRefined = R"EX(\textbf{Data Identification:}
- Foci: \((0, \pm 3)\)
- Vertices: \(\left(0, \pm \frac{\sqrt{11}}{2}\right)\)

\textbf{Problem Analysis:}
We need to determine the standard form of the equation of the hyperbola given its foci and vertices. For a hyperbola centered at the origin and oriented along the y-axis, its general equation is
\[
\frac{y^2}{a^2} - \frac{x^2}{b^2} = 1,
\]
where:
- The distance from the center to a vertex is \(a\).
- The distance from the center to a focus is \(c\).
- The relationship \(c^2 = a^2 + b^2\) holds true.

\textbf{Theoretical Framework:}
Key concepts and formulae for hyperbolas include:
- Standard form of hyperbola equation: \(\frac{y^2}{a^2} - \frac{x^2}{b^2} = 1\)
- Distance to the vertices: \(\pm a\)
- Distance to the foci: \(\pm c\)
- Relationship: \(c^2 = a^2 + b^2\)

\textbf{Methodology Development:}
From the given foci and vertices, we can identify \(a\) and \(c\). Using the relationship \(c^2 = a^2 + b^2\), we can find \(b\) and formulate the hyperbola's equation.

\textbf{Computation:}
1. Identify \(c\): \(c = 3\)
2. Identify \(a\): \(a = \frac{\sqrt{11}}{2}\)
3. Compute \(a^2 = \frac{11}{4}\)
4. Solve for \(b^2\): \(9 - \frac{11}{4} = \frac{25}{4} = b^2\)

\textbf{Solution:}
Using the values of \(a^2\) and \(b^2\), the equation of the hyperbola is:
\[
\frac{4y^2}{11} - \frac{4x^2}{25} = 1
\]
Simplifying by multiplying through by 100 to clear the denominators:
\[
\boxed{100y^2 - 44x^2 = 275}
\]
)EX";

inline constexpr std::string_view kProbabilityQuestion =
    "A committee of two persons is selected from two men and two women. What is the probability "
    "that the committee will have (a) no man? (b) one man? (c) two men?";

inline constexpr std::string_view kProbabilityRefined = R"EX(\textbf{Data Identification:}
- Total people: 2 men and 2 women.
- Committee size: 2 persons.

\textbf{Problem Analysis:}
Calculate the total number of ways to form a committee of 2 persons from 4 people, count the favorable outcomes for no man, one man and two men, and divide.

\textbf{Theoretical Framework:}
- Combinations: \(C(n, r) = \frac{n!}{r!(n-r)!}\)
- Probability: \(P(E) = \frac{\text{Number of favorable outcomes}}{\text{Total number of outcomes}}\)

\textbf{Methodology Development:}
Total ways: \(C(4, 2)\). No man: \(C(2, 2)\). One man: \(C(2, 1) \times C(2, 1)\). Two men: \(C(2, 2)\).

\textbf{Computation:}
\(C(4, 2) = 6\), \(C(2, 2) = 1\), \(C(2, 1) \times C(2, 1) = 4\).
\(P(\text{No man}) = \frac{1}{6}\), \(P(\text{One man}) = \frac{4}{6} = \frac{2}{3}\), \(P(\text{Two men}) = \frac{1}{6}\).

\textbf{Solution:}
- The probability that the committee will have no man is \(\frac{1}{6}\).
- The probability that the committee will have one man is \(\frac{2}{3}\).
- The probability that the committee will have two men is \(\frac{1}{6}\).
)EX";

namespace fixture_detail {

inline const std::array<const char*, 10> kNames = {"Ava",  "Ben",  "Chloe", "Dev",  "Ella",
                                                   "Farid", "Gita", "Hugo",  "Isha", "Jon"};
inline const std::array<const char*, 10> kHindiNames = {"राम",  "सीता", "मोहन", "गीता", "अमित",
                                                        "रीना", "करण", "प्रिया", "अर्जुन", "नेहा"};

inline std::string n(long long v) { return std::to_string(v); }

inline std::string frac_latex(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  return "\\frac{" + numerator(r).str() + "}{" + denominator(r).str() + "}";
}

}  // namespace fixture_detail

/// GSM8K-style records: question plus a worked answer ending in "#### n".
/// Step count grows with the index so complexity scores spread out.
inline std::vector<nlohmann::json> gsm8k_records() {
  using namespace fixture_detail;
  std::vector<nlohmann::json> out;
  for (int i = 0; i < 30; ++i) {
    const std::string who = kNames[i % kNames.size()];
    const long long a = 3 + (i * 7) % 20, b = 2 + (i * 5) % 9, c = 1 + (i * 3) % 6;
    std::string q, ans;
    switch (i % 3) {
      case 0:
        q = who + " has " + n(a) + " marbles and buys " + n(b) + " more. How many marbles does " +
            who + " have?";
        ans = who + " has " + n(a) + " + " + n(b) + " = " + n(a + b) + " marbles.\n#### " + n(a + b);
        break;
      case 1:
        q = "A shop packs " + n(b) + " boxes with " + n(a) + " pencils in each box. After selling " +
            n(c) + " pencils, how many pencils are left?";
        ans = "The shop has " + n(b) + " × " + n(a) + " = " + n(a * b) + " pencils.\n" +
              "After selling, " + n(a * b) + " - " + n(c) + " = " + n(a * b - c) +
              " pencils are left.\n#### " + n(a * b - c);
        break;
      default: {
        const long long wage = 10 + i, hours = b, days = c + 1, rent = a * 4;
        const long long earned = wage * hours * days;
        q = who + " earns $" + n(wage) + " per hour and works " + n(hours) +
            " hours each day. If " + who + " works for " + n(days) +
            " days and then pays $" + n(rent) + " for rent, and also shares half of the remaining " +
            "money with a sibling, how much money does " + who + " keep?";
        const Rational keep = Rational(earned - rent, 2);
        ans = "Daily pay is " + n(wage) + " × " + n(hours) + " = " + n(wage * hours) + ".\n" +
              "Total pay is " + n(wage * hours) + " × " + n(days) + " = " + n(earned) + ".\n" +
              "After rent, " + n(earned) + " - " + n(rent) + " = " + n(earned - rent) + ".\n" +
              "Half of that is " + format_rational(keep) + ".\n#### " + format_rational(keep);
        break;
      }
    }
    out.push_back({{"question", q}, {"answer", ans}});
  }
  return out;
}

/// MATH-style records, six per level.
inline std::vector<nlohmann::json> math_records() {
  using namespace fixture_detail;
  std::vector<nlohmann::json> out;
  for (int i = 0; i < 30; ++i) {
    const int level = 1 + i / 6;
    const long long a = 2 + i % 7, b = 3 + (i * 5) % 11, c = 20 + (i * 13) % 37;
    std::string problem, type, solution;
    switch (level) {
      case 1:
        type = "Prealgebra";
        problem = "What is $" + n(a) + " + " + n(b) + " \\cdot " + n(c) + "$?";
        solution = "Multiplication first: $" + n(b) + " \\cdot " + n(c) + " = " + n(b * c) +
                   "$, so the value is $\\boxed{" + n(a + b * c) + "}$.";
        break;
      case 2: {
        type = "Algebra";
        problem = "Solve for $x$: $" + n(a) + "x + " + n(b) + " = " + n(c) + "$.";
        const Rational x(c - b, a);
        solution = "Subtract " + n(b) + " and divide by " + n(a) + ": $x = \\boxed{" + frac_latex(x) + "}$.";
        break;
      }
      case 3:
        type = "Number Theory";
        problem = "What is the remainder when $" + n(c * 37 + a) + "$ is divided by $" + n(b + 2) + "$?";
        solution = "Long division gives remainder $\\boxed{" + n((c * 37 + a) % (b + 2)) + "}$.";
        break;
      case 4: {
        type = "Counting & Probability";
        const long long m = 5 + i % 5, k = 2;
        problem = "In how many ways can a team of " + n(k) + " be chosen from " + n(m) +
                  " players, and what fraction of those teams include the captain?";
        solution = "There are $\\binom{" + n(m) + "}{2} = " + n(m * (m - 1) / 2) +
                   "$ teams, of which $" + n(m - 1) + "$ include the captain, a fraction of $\\boxed{" +
                   frac_latex(Rational(m - 1, m * (m - 1) / 2)) + "}$.";
        break;
      }
      default:
        type = i % 2 ? "Intermediate Algebra" : "Precalculus";
        problem = "Let $r$ and $s$ be the roots of $x^2 - " + n(a + b) + "x + " + n(a * b) +
                  " = 0$. Compute $r^2 + s^2$.";
        solution = "By Vieta, $r + s = " + n(a + b) + "$ and $rs = " + n(a * b) +
                   "$, so $r^2 + s^2 = (r+s)^2 - 2rs = \\boxed{" + n(a * a + b * b) + "}$.";
        break;
    }
    out.push_back({{"problem", problem},
                   {"level", "Level " + std::to_string(level)},
                   {"type", type},
                   {"solution", solution}});
  }
  return out;
}

/// HAWP-style Hindi records with single-operation solutions. Includes the
/// 543 × 27 and 968 ÷ 16 worked examples and one division whose solution
/// has no computation line.
inline std::vector<nlohmann::json> hawp_records() {
  using namespace fixture_detail;
  std::vector<nlohmann::json> out;
  auto add = [&](const std::string& q, const char* op, const std::string& sol) {
    out.push_back({{"question", q}, {"operation", op}, {"solution", sol}});
  };
  add("एक डिब्बे में 27 पेंसिलें हैं। 543 डिब्बों में कुल कितनी पेंसिलें होंगी?", "mul",
      "543 × 27 = 14661\nउत्तर: 14661");
  add("968 रुपये 16 बच्चों में बराबर बाँटे गए। प्रत्येक बच्चे को कितने रुपये मिले?", "div",
      "968 ÷ 16 = 60.5\nउत्तर: 60.5");
  add("45 लड्डू 9 थालियों में बराबर रखे गए। हर थाली में कितने लड्डू हैं?", "div",
      "हर थाली में पाँच लड्डू हैं।\nउत्तर: 5");
  for (int i = 3; i < 30; ++i) {
    const std::string who = kHindiNames[i % kHindiNames.size()];
    const long long a = 12 + (i * 37) % 480, b = 2 + (i * 7) % 23;
    switch (i % 4) {
      case 0:
        add(who + " के पास " + n(a) + " आम हैं। उसे " + n(b) + " आम और मिले। अब उसके पास कितने आम हैं?",
            "add", n(a) + " + " + n(b) + " = " + n(a + b) + "\nउत्तर: " + n(a + b));
        break;
      case 1:
        add("एक टोकरी में " + n(a + b) + " संतरे थे। उनमें से " + n(b) +
                " बेच दिए गए। अब कितने संतरे बचे?",
            "sub", n(a + b) + " - " + n(b) + " = " + n(a) + "\nउत्तर: " + n(a));
        break;
      case 2:
        add("एक कक्षा में " + n(b) + " पंक्तियाँ हैं और हर पंक्ति में " + n(a) +
                " कुर्सियाँ हैं। कुल कितनी कुर्सियाँ हैं?",
            "mul", n(a) + " × " + n(b) + " = " + n(a * b) + "\nउत्तर: " + n(a * b));
        break;
      default: {
        const Rational q(a * 2, b);
        add(who + " ने " + n(a * 2) + " रुपये " + n(b) + " दोस्तों में बराबर बाँटे। हर दोस्त को कितने रुपये मिले?",
            "div", n(a * 2) + " ÷ " + n(b) + " = " + format_rational(q) + "\nउत्तर: " + format_rational(q));
        break;
      }
    }
  }
  return out;
}

namespace fixture_detail {

struct PairSpec {
  std::string topic;
  Difficulty difficulty;
  std::string question_en, question_hi;
  std::array<std::string, 6> en, hi;
};

inline std::string structured_text(const std::array<std::string, 6>& bodies, Language lang) {
  return render_structured(make_structured(bodies, lang), lang);
}

inline std::vector<PairSpec> templated_pairs() {
  std::vector<PairSpec> out;
  for (int i = 0; i < 13; ++i) {
    PairSpec p;
    const long long k = 2 + i;
    switch (i % 5) {
      case 0: {
        p.topic = "Sets";
        p.difficulty = Difficulty::Easy;
        const long long v = 1LL << k;
        p.question_en = "How many subsets does a set with " + n(k) + " elements have?";
        p.question_hi = n(k) + " अवयवों वाले समुच्चय के कितने उपसमुच्चय होते हैं?";
        p.en = {"- Number of elements: " + n(k), "Count all subsets of the set.",
                "A set with n elements has 2^n subsets.", "Substitute n = " + n(k) + ".",
                "2^" + n(k) + " = " + n(v), "Final Answer: " + n(v)};
        p.hi = {"- अवयवों की संख्या: " + n(k), "समुच्चय के सभी उपसमुच्चय गिनें।",
                "n अवयवों वाले समुच्चय के 2^n उपसमुच्चय होते हैं।", "n = " + n(k) + " रखें।",
                "2^" + n(k) + " = " + n(v), "अंतिम उत्तर: " + n(v)};
        break;
      }
      case 1: {
        p.topic = "Linear Equations";
        p.difficulty = Difficulty::Easy;
        const long long a = k, b = 3 * k + 1, c = 10 * k;
        const Rational x(c - b, a);
        p.question_en = "Solve " + n(a) + "x + " + n(b) + " = " + n(c) + ".";
        p.question_hi = n(a) + "x + " + n(b) + " = " + n(c) + " को हल कीजिए।";
        p.en = {"- Equation: " + n(a) + "x + " + n(b) + " = " + n(c), "Isolate x.",
                "Inverse operations keep an equation balanced.",
                "Subtract " + n(b) + " from both sides, then divide by " + n(a) + ".",
                "x = (" + n(c) + " - " + n(b) + ")/" + n(a) + " = " + format_fraction(x),
                "Final Answer: " + format_fraction(x)};
        p.hi = {"- समीकरण: " + n(a) + "x + " + n(b) + " = " + n(c), "x को अलग करें।",
                "विपरीत संक्रियाएँ समीकरण को संतुलित रखती हैं।",
                "दोनों पक्षों से " + n(b) + " घटाएँ, फिर " + n(a) + " से भाग दें।",
                "x = (" + n(c) + " - " + n(b) + ")/" + n(a) + " = " + format_fraction(x),
                "अंतिम उत्तर: " + format_fraction(x)};
        break;
      }
      case 2: {
        p.topic = "Sequences and Series";
        p.difficulty = Difficulty::Medium;
        const long long a = k, d = 3, terms = 5 + i;
        const long long sum = terms * (2 * a + (terms - 1) * d) / 2;
        p.question_en = "Find the sum of the first " + n(terms) + " terms of the AP " + n(a) + ", " +
                        n(a + d) + ", " + n(a + 2 * d) + ", ...";
        p.question_hi = "समांतर श्रेढ़ी " + n(a) + ", " + n(a + d) + ", " + n(a + 2 * d) + ", ... के प्रथम " +
                        n(terms) + " पदों का योग ज्ञात कीजिए।";
        const std::string comp = "S = " + n(terms) + "/2 × (2 × " + n(a) + " + " + n(terms - 1) +
                                 " × " + n(d) + ") = " + n(sum);
        p.en = {"- First term a = " + n(a) + ", common difference d = " + n(d) + ", n = " + n(terms),
                "We need the sum of an arithmetic progression.", "S = n/2 (2a + (n - 1)d)",
                "Substitute the values into the sum formula.", comp, "Final Answer: " + n(sum)};
        p.hi = {"- प्रथम पद a = " + n(a) + ", सार्व अंतर d = " + n(d) + ", n = " + n(terms),
                "हमें समांतर श्रेढ़ी का योग चाहिए।", "S = n/2 (2a + (n - 1)d)",
                "मानों को योग सूत्र में रखें।", comp, "अंतिम उत्तर: " + n(sum)};
        break;
      }
      case 3: {
        p.topic = "Probability";
        p.difficulty = Difficulty::Medium;
        const long long t = 1 + i % 5;
        const Rational pr(6 - t, 6);
        p.question_en = "A fair die is rolled once. What is the probability of getting a number greater than " + n(t) + "?";
        p.question_hi = "एक निष्पक्ष पासा एक बार फेंका जाता है। " + n(t) + " से बड़ी संख्या आने की प्रायिकता क्या है?";
        p.en = {"- Outcomes: 1 to 6", "Count outcomes greater than " + n(t) + ".",
                "P(E) = favorable outcomes / total outcomes", "There are " + n(6 - t) + " favorable outcomes.",
                "P = " + n(6 - t) + "/6 = " + format_fraction(pr), "Final Answer: " + format_fraction(pr)};
        p.hi = {"- परिणाम: 1 से 6", n(t) + " से बड़े परिणाम गिनें।",
                "P(E) = अनुकूल परिणाम / कुल परिणाम", "अनुकूल परिणाम " + n(6 - t) + " हैं।",
                "P = " + n(6 - t) + "/6 = " + format_fraction(pr), "अंतिम उत्तर: " + format_fraction(pr)};
        break;
      }
      default: {
        p.topic = "Integrals";
        p.difficulty = Difficulty::Hard;
        const Rational v(k * k, 2);
        p.question_en = "Evaluate the integral of x from 0 to " + n(k) + ".";
        p.question_hi = "0 से " + n(k) + " तक x का समाकलन ज्ञात कीजिए।";
        p.en = {"- Integrand: x, limits 0 and " + n(k), "A definite integral of a polynomial.",
                "The antiderivative of x is x^2/2.", "Apply the fundamental theorem of calculus.",
                n(k) + "^2/2 - 0 = " + format_fraction(v), "Final Answer: " + format_fraction(v)};
        p.hi = {"- समाकल्य: x, सीमाएँ 0 और " + n(k), "बहुपद का निश्चित समाकलन।",
                "x का प्रतिअवकलज x^2/2 है।", "कलन का मूलभूत प्रमेय लागू करें।",
                n(k) + "^2/2 - 0 = " + format_fraction(v), "अंतिम उत्तर: " + format_fraction(v)};
        break;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace fixture_detail

/// Curated bilingual records: 15 English/Hindi twins sharing a pair_id,
/// with annotated difficulty and structured solutions. The first two pairs
/// are the hyperbola and committee-probability exemplars.
inline std::vector<nlohmann::json> indimathqa_records() {
  using namespace fixture_detail;
  std::vector<nlohmann::json> out;
  auto emit = [&](const std::string& pair, const std::string& topic, Difficulty d,
                  const std::string& qe, const std::string& se, const std::string& qh,
                  const std::string& sh) {
    const std::string diff(to_string(d));
    out.push_back({{"question", qe}, {"language", "en"}, {"structured_solution", se},
                   {"difficulty", diff}, {"topic", topic}, {"pair_id", pair}});
    out.push_back({{"question", qh}, {"language", "hi"}, {"structured_solution", sh},
                   {"difficulty", diff}, {"topic", topic}, {"pair_id", pair}});
  };

  emit("imqa-pair-01", "Conic Sections", Difficulty::Hard, std::string(kHyperbolaQuestion),
       std::string(kHyperbolaRefined),
       "उस अतिपरवलय का समीकरण ज्ञात कीजिए जिसकी नाभियाँ $(0, \\pm 3)$ और शीर्ष "
       "$\\left(0, \\pm \\frac{\\sqrt{11}}{2}\\right)$ हैं।",
       structured_text({"- नाभियाँ: \\((0, \\pm 3)\\)\n- शीर्ष: \\(\\left(0, \\pm \\frac{\\sqrt{11}}{2}\\right)\\)",
                        "हमें दी गई नाभियों और शीर्षों से अतिपरवलय का मानक समीकरण ज्ञात करना है।",
                        "- मानक रूप: \\(\\frac{y^2}{a^2} - \\frac{x^2}{b^2} = 1\\)\n- संबंध: \\(c^2 = a^2 + b^2\\)",
                        "नाभियों और शीर्षों से \\(a\\) और \\(c\\) पहचानें, फिर \\(b\\) ज्ञात करें।",
                        "\\(c = 3\\), \\(a^2 = \\frac{11}{4}\\)\n\\(b^2 = 9 - \\frac{11}{4} = \\frac{25}{4}\\)",
                        "अतः अतिपरवलय का समीकरण है:\n\\[\n\\boxed{100y^2 - 44x^2 = 275}\n\\]"},
                       Language::Hindi));
  emit("imqa-pair-02", "Probability", Difficulty::Medium, std::string(kProbabilityQuestion),
       std::string(kProbabilityRefined),
       "दो पुरुषों और दो महिलाओं में से दो व्यक्तियों की एक समिति चुनी जाती है। समिति में (a) कोई पुरुष "
       "न होने (b) एक पुरुष होने (c) दो पुरुष होने की प्रायिकता क्या है?",
       structured_text({"- कुल व्यक्ति: 2 पुरुष और 2 महिलाएँ\n- समिति का आकार: 2",
                        "कुल तरीके और प्रत्येक स्थिति के अनुकूल तरीके गिनें।",
                        "- संचय: \\(C(n, r) = \\frac{n!}{r!(n-r)!}\\)",
                        "कुल तरीके \\(C(4, 2)\\); अनुकूल तरीके \\(C(2, 2)\\), \\(C(2, 1) \\times C(2, 1)\\), \\(C(2, 2)\\)।",
                        "\\(C(4, 2) = 6\\), \\(C(2, 2) = 1\\), \\(C(2, 1) \\times C(2, 1) = 4\\)",
                        "- कोई पुरुष नहीं: \\(\\frac{1}{6}\\)\n- एक पुरुष: \\(\\frac{2}{3}\\)\n- दो पुरुष: \\(\\frac{1}{6}\\)"},
                       Language::Hindi));

  int index = 3;
  for (const auto& p : templated_pairs()) {
    char pair[32];
    std::snprintf(pair, sizeof pair, "imqa-pair-%02d", index++);
    emit(pair, p.topic, p.difficulty, p.question_en, structured_text(p.en, Language::English),
         p.question_hi, structured_text(p.hi, Language::Hindi));
  }
  return out;
}

inline void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  std::string body;
  for (const auto& r : rows) body += io::dump(r) + "\n";
  io::write_file(path, body);
  const auto sys = std::chrono::system_clock::time_point(std::chrono::seconds(kFixtureEpochSeconds));
  std::filesystem::last_write_time(path, std::chrono::file_clock::from_sys(sys));
}

struct FixturePaths {
  std::filesystem::path gsm8k, math, hawp, indimathqa;
};

inline FixturePaths write_fixtures(const std::filesystem::path& dir) {
  FixturePaths p{dir / "gsm8k.jsonl", dir / "math.jsonl", dir / "hawp.jsonl", dir / "indimathqa.jsonl"};
  write_jsonl(p.gsm8k, gsm8k_records());
  write_jsonl(p.math, math_records());
  write_jsonl(p.hawp, hawp_records());
  write_jsonl(p.indimathqa, indimathqa_records());
  return p;
}


/// Deterministic scale corpus of `count` problems: English multi-step word
/// problems and Hindi single-operation problems with worked solutions.
inline CorpusManifest scale_corpus(std::size_t count, std::uint64_t seed) {
  using namespace fixture_detail;
  std::mt19937_64 rng(seed);
  auto draw = [&](long long lo, long long hi) {
    return lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  std::vector<Problem> out;
  out.reserve(count);
  char id[32];
  for (std::size_t i = 0; i < count; ++i) {
    Problem p;
    std::snprintf(id, sizeof id, "scale-%07zu", i + 1);
    p.id = id;
    const long long a = draw(10, 99999), b = draw(2, 999);
    if (i % 2 == 0) {
      p.language = Language::English;
      p.source = Source::GSM8K;
      const long long steps = draw(1, 4);
      p.question = std::string(kNames[i % kNames.size()]) + " buys " + n(b) + " crates of " + n(a) +
                   " nails each";
      long long total = a * b;
      std::string sol = n(b) + " × " + n(a) + " = " + n(total) + "\n";
      for (long long s = 1; s < steps; ++s) {
        const long long extra = draw(1, 500);
        p.question += ", then gets " + n(extra) + " more";
        sol += n(total) + " + " + n(extra) + " = " + n(total + extra) + "\n";
        total += extra;
      }
      p.question += ". How many nails are there in total?";
      p.raw_solution = sol + "#### " + n(total);
    } else {
      p.language = Language::Hindi;
      p.source = Source::HAWP;
      const bool mul = (i / 2) % 2 == 0;
      p.operation = mul ? Operation::Mul : Operation::Div;
      if (mul) {
        p.question = "एक डिब्बे में " + n(b) + " पेंसिलें हैं। " + n(a) + " डिब्बों में कितनी पेंसिलें हैं?";
        p.raw_solution = n(a) + " × " + n(b) + " = " + n(a * b) + "\nउत्तर: " + n(a * b);
      } else {
        const std::string q = format_rational(Rational(a, b));
        p.question = n(a) + " रुपये " + n(b) + " बच्चों में बराबर बाँटे गए। हर बच्चे को कितने मिले?";
        p.raw_solution = n(a) + " ÷ " + n(b) + " = " + q + "\nउत्तर: " + q;
      }
    }
    out.push_back(std::move(p));
  }
  return CorpusManifest(std::move(out), SourceFormat::Derived, std::string(kEpoch));
}

}  // namespace bimath::demo

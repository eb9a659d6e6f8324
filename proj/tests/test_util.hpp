#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bimath/corpus.hpp"

namespace testutil {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(BIMATH_FIXTURE_DIR) / name;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bimath-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write(const std::filesystem::path& p, const std::string& text) {
  bimath::io::write_file(p, text);
}

inline std::string random_text(std::mt19937_64& rng, bool hindi) {
  static const std::vector<std::string> en = {"apples", "train", "x^2", "\\frac{1}{2}", "42", "sum",
                                              "ratio", "left", "3.5", "café"};
  static const std::vector<std::string> hi = {"सेब", "रेलगाड़ी", "योग", "१२", "अनुपात", "बचे", "५०"};
  const auto& pool = hindi ? hi : en;
  std::string s;
  const int n = 1 + static_cast<int>(rng() % 8);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += pool[rng() % pool.size()];
  }
  return s;
}

/// Random valid problems; twins share a pair_id when `paired`.
inline std::vector<bimath::Problem> random_problems(std::mt19937_64& rng, std::size_t n, bool paired) {
  using namespace bimath;
  std::vector<Problem> out;
  const std::array<Source, 4> sources = {Source::GSM8K, Source::HAWP, Source::IndiMathQA, Source::MATH};
  const std::array<Difficulty, 3> diffs = {Difficulty::Easy, Difficulty::Medium, Difficulty::Hard};
  for (std::size_t i = 0; out.size() < n; ++i) {
    Problem p;
    p.id = "p" + std::to_string(i);
    p.source = sources[rng() % sources.size()];
    p.difficulty = diffs[rng() % diffs.size()];
    p.language = rng() % 2 ? Language::English : Language::Hindi;
    p.question = random_text(rng, p.language == Language::Hindi);
    if (rng() % 2) p.raw_solution = random_text(rng, p.language == Language::Hindi);
    if (p.source == Source::MATH) p.math_level = 1 + static_cast<int>(rng() % 5);
    if (rng() % 3 == 0) p.topic = "algebra";
    if (p.source == Source::HAWP) p.operation = Operation::Mul;
    if (rng() % 4 == 0) p.extras = {{"note", random_text(rng, false)}};
    if (paired && out.size() + 1 < n && rng() % 2) {
      p.pair_id = "pair-" + p.id;
      Problem twin = p;
      twin.id = p.id + "-twin";
      twin.language = p.language == Language::English ? Language::Hindi : Language::English;
      twin.question = random_text(rng, twin.language == Language::Hindi);
      out.push_back(std::move(p));
      out.push_back(std::move(twin));
    } else {
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Corpus with the given per-difficulty counts; MATH problems carry a level.
inline bimath::CorpusManifest count_corpus(bimath::Source source, const std::string& prefix,
                                           std::size_t easy, std::size_t medium, std::size_t hard,
                                           bimath::Language lang = bimath::Language::English) {
  using namespace bimath;
  std::vector<Problem> ps;
  auto add = [&](Difficulty d, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      Problem p;
      p.id = prefix + "-" + std::string(to_string(d)) + "-" + std::to_string(i);
      p.source = source;
      p.language = lang;
      p.question = "q " + p.id;
      p.difficulty = d;
      if (source == Source::MATH) p.math_level = d == Difficulty::Easy ? 1 : d == Difficulty::Medium ? 2 : 4;
      ps.push_back(std::move(p));
    }
  };
  add(Difficulty::Easy, easy);
  add(Difficulty::Medium, medium);
  add(Difficulty::Hard, hard);
  return CorpusManifest(std::move(ps), SourceFormat::Derived, "2024-01-01T00:00:00Z");
}

}  // namespace testutil

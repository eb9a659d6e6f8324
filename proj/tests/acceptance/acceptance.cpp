// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "bimath/bimath.hpp"
#include "bimath/cli.hpp"
#include "bimath/demo_fixtures.hpp"

using namespace bimath;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Checker {
  Outcome o;
  void expect(bool cond, const std::string& what) {
    if (!cond && o.pass) {
      o.pass = false;
      o.detail = what;
    }
  }
};

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("bimath-acceptance-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fixture(const std::string& name) { return io::read_file(fs::path(BIMATH_FIXTURE_DIR) / name); }

CorpusManifest counted(Source source, const std::string& prefix, std::size_t e, std::size_t m, std::size_t h) {
  std::vector<Problem> ps;
  auto add = [&](Difficulty d, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      Problem p;
      p.id = prefix + "-" + std::string(to_string(d)) + "-" + std::to_string(i);
      p.source = source;
      p.question = "q";
      p.difficulty = d;
      if (source == Source::MATH) p.math_level = d == Difficulty::Easy ? 1 : d == Difficulty::Medium ? 3 : 5;
      ps.push_back(std::move(p));
    }
  };
  add(Difficulty::Easy, e);
  add(Difficulty::Medium, m);
  add(Difficulty::Hard, h);
  return CorpusManifest(std::move(ps), SourceFormat::Derived, "2024-01-01T00:00:00Z");
}

// 1 -------------------------------------------------------------------------
Outcome decomposition_examples() {
  Checker c;
  const auto mul = decompose_mul(543, 27);
  std::vector<Rational> partials;
  for (const auto& comp : mul.components) partials.push_back(comp.partial);
  c.expect(partials == std::vector<Rational>{13500, 1080, 81}, "543x27 partials");
  c.expect(mul.total == Rational(14661), "543x27 total");
  const auto div = decompose_div(968, 16);
  c.expect(div.total == Rational(968, 16) && div.total == Rational(121, 2), "968/16 total");
  std::uint64_t seg = 0;
  for (const auto& comp : div.components) seg += comp.segment;
  c.expect(seg == 968, "968/16 segments");

  constexpr int reps = 1000;
  auto t = Clock::now();
  for (int i = 0; i < reps; ++i) (void)decompose_mul(543, 27);
  const double mul_ms = elapsed_ms(t) / reps;
  t = Clock::now();
  for (int i = 0; i < reps; ++i) (void)decompose_div(968, 16);
  const double div_ms = elapsed_ms(t) / reps;
  c.expect(mul_ms < 1.0 && div_ms < 1.0, "runtime");
  if (c.o.pass) {
    std::ostringstream d;
    d << "14661 = 13500+1080+81, 968/16 = 121/2 = 60.5; mul " << mul_ms * 1000 << " us, div " << div_ms * 1000 << " us";
    c.o.detail = d.str();
  }
  return c.o;
}

// 2 -------------------------------------------------------------------------
std::string int128_text(__int128 v) {
  if (v == 0) return "0";
  std::string s;
  for (; v > 0; v /= 10) s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
  return s;
}

Outcome decomposition_sweep() {
  Checker c;
  std::mt19937_64 rng(20240101);
  const auto start = Clock::now();
  std::size_t ok = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = static_cast<std::int64_t>(rng() % 1'000'000'000);
    const auto b = static_cast<std::int64_t>(rng() % 10'000);
    const auto t = decompose_mul(a, b);
    __int128 seg = 0;
    Rational sum = 0;
    for (const auto& comp : t.components) {
      seg += comp.segment;
      sum += comp.partial;
    }
    const __int128 product = static_cast<__int128>(a) * b;
    ok += seg == a && sum == t.total && t.total == Rational(BigInt(int128_text(product)));
  }
  c.expect(ok == 10000, "multiplication mismatches: " + std::to_string(10000 - ok));
  ok = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = static_cast<std::int64_t>(rng() % 1'000'000'000);
    const auto b = static_cast<std::int64_t>(1 + rng() % 9'999);
    const auto t = decompose_div(a, b);
    std::uint64_t seg = 0;
    Rational sum = 0;
    for (const auto& comp : t.components) {
      seg += comp.segment;
      sum += comp.partial;
    }
    ok += seg == static_cast<std::uint64_t>(a) && sum == t.total && t.total == Rational(a, b);
  }
  c.expect(ok == 10000, "division mismatches: " + std::to_string(10000 - ok));
  const double ms = elapsed_ms(start);
  c.expect(ms < 5000, "runtime " + std::to_string(ms) + " ms");
  if (c.o.pass) c.o.detail = "20000/20000 exact in " + std::to_string(static_cast<int>(ms)) + " ms";
  return c.o;
}

// 3 -------------------------------------------------------------------------
Outcome math_levels() {
  Checker c;
  const std::array<std::size_t, 5> per_level = {664, 1570, 1570, 1997, 1997};
  std::vector<Problem> ps;
  for (int lvl = 1; lvl <= 5; ++lvl)
    for (std::size_t i = 0; i < per_level[lvl - 1]; ++i) {
      Problem p;
      p.id = "math-l" + std::to_string(lvl) + "-" + std::to_string(i);
      p.source = Source::MATH;
      p.math_level = lvl;
      p.question = "q";
      ps.push_back(std::move(p));
    }
  const auto counts = difficulty_counts(apply_math_levels(CorpusManifest(ps, SourceFormat::Math, "t")));
  const std::size_t easy = per_level[0], medium = per_level[1] + per_level[2], hard = per_level[3] + per_level[4];
  c.expect(counts.at(Difficulty::Easy) == easy && easy == 664, "Easy");
  c.expect(counts.at(Difficulty::Medium) == medium && medium == 3140, "Medium");
  c.expect(counts.at(Difficulty::Hard) == hard && hard == 3994, "Hard");
  if (c.o.pass) c.o.detail = "664 / 3140 / 3994";
  return c.o;
}

// 4 -------------------------------------------------------------------------
Outcome merge_arithmetic() {
  Checker c;
  const auto r = merge_sources({counted(Source::GSM8K, "gsm", 700, 0, 0), counted(Source::MATH, "math", 664, 3140, 3994),
                                counted(Source::IndiMathQA, "imqa", 820, 2470, 4533)});
  c.expect(r.totals.at(Difficulty::Easy) == 2184, "Easy != 2184");
  c.expect(r.totals.at(Difficulty::Hard) == 8527, "Hard != 8527");
  c.expect(r.totals.at(Difficulty::Medium) == 3140 + 2470, "Medium != 5610");
  const auto d = compare_totals(r.totals, {{Difficulty::Easy, 2184}, {Difficulty::Medium, 5470}, {Difficulty::Hard, 8527}});
  c.expect(d.size() == 1 && d[0].difficulty == Difficulty::Medium && d[0].computed == 5610 && d[0].expected == 5470,
           "discrepancy report");
  if (c.o.pass) c.o.detail = "2184 Easy, 8527 Hard; Medium 5610 flagged against stated 5470";
  return c.o;
}

// 5 -------------------------------------------------------------------------
std::vector<Problem> random_corpus(std::mt19937_64& rng, std::size_t n) {
  const std::array<Source, 4> sources = {Source::GSM8K, Source::HAWP, Source::IndiMathQA, Source::MATH};
  std::vector<Problem> out;
  for (std::size_t i = 0; out.size() < n; ++i) {
    Problem p;
    p.id = "r" + std::to_string(i);
    p.source = sources[rng() % 4];
    p.difficulty = kAllDifficulties[rng() % 3];
    p.language = rng() % 2 ? Language::English : Language::Hindi;
    p.question = "q" + std::to_string(i);
    if (p.source == Source::MATH) p.math_level = 1;
    if (out.size() + 1 < n && rng() % 2) {
      p.pair_id = "pair-" + p.id;
      Problem twin = p;
      twin.id += "-b";
      twin.language = p.language == Language::English ? Language::Hindi : Language::English;
      out.push_back(p);
      out.push_back(twin);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

Outcome split_properties() {
  Checker c;
  std::mt19937_64 rng(7);
  const auto start = Clock::now();
  std::size_t strata = 0, leaks = 0, bound_violations = 0, rerun_diffs = 0;
  for (int round = 0; round < 50; ++round) {
    const CorpusManifest m(random_corpus(rng, 100 + rng() % 900), SourceFormat::Derived, "t");
    const std::uint64_t seed = rng();
    const auto s = split(m, seed, 0.70);
    std::map<std::tuple<Source, Difficulty, Language>, std::pair<std::size_t, std::size_t>> counts;
    std::map<std::string, std::set<Part>> pairs;
    for (const auto& p : m.records()) {
      const Part part = s.assignments.at(p.id);
      auto& [train, size] = counts[{p.source, p.difficulty, p.language}];
      train += part == Part::Train;
      ++size;
      if (!p.pair_id.empty()) pairs[p.pair_id].insert(part);
    }
    for (const auto& [_, ts] : counts) {
      ++strata;
      if (std::abs(static_cast<double>(ts.first) - 0.70 * static_cast<double>(ts.second)) > 1.0) ++bound_violations;
    }
    for (const auto& [_, parts] : pairs) leaks += parts.size() != 1;
    rerun_diffs += io::dump(to_json(s)) != io::dump(to_json(split(m, seed, 0.70)));
  }
  const double ms = elapsed_ms(start);
  c.expect(bound_violations == 0, std::to_string(bound_violations) + " strata outside +-1");
  c.expect(leaks == 0, std::to_string(leaks) + " leaking pairs");
  c.expect(rerun_diffs == 0, "reruns differ");
  c.expect(ms < 5000, "runtime " + std::to_string(ms) + " ms");
  if (c.o.pass)
    c.o.detail = "50 corpora, " + std::to_string(strata) + " strata within +-1, 0 leaks, reruns identical, " +
                 std::to_string(static_cast<int>(ms)) + " ms";
  return c.o;
}

// 6 -------------------------------------------------------------------------
Outcome curriculum_invariants() {
  Checker c;
  const auto dir = scratch("curriculum");
  cli::PipelineConfig cfg;
  cfg.out_dir = (dir / "demo").string();
  cli::run_demo(cfg, [](const std::string&) {});
  const auto merged = load_manifest(dir / "demo" / "manifests" / "merged.jsonl");
  const auto sp = split_from_json(cli::read_json(dir / "demo" / "split.json"));
  std::size_t configs = 0, exported = 0;
  for (auto mode : {CurriculumMode::MonolingualEN, CurriculumMode::MonolingualHI, CurriculumMode::BilingualCombined}) {
    for (bool cumulative : {false, true}) {
      const auto cur = build_curriculum(merged, sp, {mode, cumulative, true});
      ++configs;
      c.expect(cur.stages.size() == 2, "stage count");
      if (cur.stages.size() != 2) continue;
      const auto& s1 = cur.stages[0];
      const auto& s2 = cur.stages[1];
      c.expect(s1.checkpoint_name == "SFT_easy" && s1.parent_checkpoint.empty(), "stage 1 checkpoint");
      c.expect(s2.checkpoint_name == "SFT_easy+medium" && s2.parent_checkpoint == "SFT_easy", "stage 2 checkpoint");
      const std::set<std::string> a(s1.train_ids.begin(), s1.train_ids.end());
      const std::set<std::string> b(s2.train_ids.begin(), s2.train_ids.end());
      const std::set<std::string> test(cur.test_ids.begin(), cur.test_ids.end());
      if (cumulative) {
        c.expect(std::includes(b.begin(), b.end(), a.begin(), a.end()), "cumulative chain");
      } else {
        for (const auto& id : a) c.expect(!b.contains(id), "stages overlap on " + id);
      }
      for (const auto& st : cur.stages) {
        const auto path = dir / "export.jsonl";
        export_stage(cur, st.name, merged, 42, path);
        io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
          if (line == 1) return;
          ++exported;
          const auto id = j.at("id").get<std::string>();
          c.expect(!test.contains(id), "test id exported: " + id);
          c.expect(sp.assignments.at(id) == Part::Train, "non-train id exported: " + id);
        });
      }
    }
  }
  if (c.o.pass)
    c.o.detail = std::to_string(configs) + " mode/cumulative combinations, " + std::to_string(exported) +
                 " exported records, no test ids";
  return c.o;
}

// 7 -------------------------------------------------------------------------
Outcome prompt_fidelity() {
  Checker c;
  const auto text = render_prompt(prompt_template(PromptName::FineTune),
                                  {{"Question", "What is 543 multiplied by 27?"}, {"Response", "543 × 27 = 14661"}});
  c.expect(text == fixture("finetune_prompt.txt"), "FineTune render differs from fixture");
  c.expect(text.find("Be aware of wrong calculations and do not repeat them.") != std::string::npos, "caution line");
  const auto dir = scratch("prompt");
  emit_training_config(dir / "train.cfg");
  const auto kv = parse_key_values(io::read_file(dir / "train.cfg"));
  c.expect(kv.at("top_k") == "40" && kv.at("temperature") == "0.8" && kv.at("top_p") == "0.90" &&
               kv.at("max_length") == "4096" && kv.at("epochs") == "3",
           "training config values");
  if (c.o.pass) c.o.detail = "fixture byte-exact; top_k=40 temperature=0.8 top_p=0.90 max_length=4096 epochs=3";
  return c.o;
}

// 8 -------------------------------------------------------------------------
Outcome structured_round_trip() {
  Checker c;
  static const std::vector<std::string> pieces = {"Let x = 5.", "\\frac{a}{b}", "- item", "1. step", "कुल 12 है।",
                                                  "\\[ y = 2x \\]", "3 × 4 = 12", "where:", "\\boxed{7}", "End."};
  std::mt19937_64 rng(11);
  std::size_t ok = 0;
  for (int i = 0; i < 1000; ++i) {
    std::array<std::string, kSectionCount> bodies;
    for (auto& b : bodies) {
      const int lines = 1 + static_cast<int>(rng() % 4);
      for (int l = 0; l < lines; ++l) b += (l ? (rng() % 3 ? "\n" : "\n\n") : "") + pieces[rng() % pieces.size()];
    }
    const auto lang = i % 2 ? Language::Hindi : Language::English;
    const auto s = make_structured(bodies, lang);
    ok += parse_structured(render_structured(s, lang)) == s;
  }
  c.expect(ok == 1000, std::to_string(1000 - ok) + " random round-trips failed");
  for (const char* name : {"probability_refined.txt", "hyperbola_refined.txt"}) {
    const auto s = parse_structured(fixture(name));
    c.expect(parse_structured(render_structured(s, Language::English)) == s, std::string(name) + " round-trip");
  }
  if (c.o.pass) c.o.detail = "1000/1000 random + both exemplars";
  return c.o;
}

// 9 -------------------------------------------------------------------------
Outcome extraction_suite() {
  Checker c;
  std::size_t n = 0, agree = 0;
  const auto dir = scratch("extract");
  io::write_file(dir / "cases.jsonl", fixture("extraction_cases.jsonl"));
  io::for_each_jsonl(dir / "cases.jsonl", [&](const nlohmann::json& j, std::size_t) {
    ++n;
    const auto got = extract_answer(j.at("text").get<std::string>(), parse_language(j.at("language").get<std::string>()));
    std::optional<AnswerValue> want;
    if (!j.at("expected").is_null()) want = answer_from_json(j.at("expected"));
    agree += got == want;
  });
  c.expect(n >= 40, "fewer than 40 cases");
  c.expect(agree == n, std::to_string(n - agree) + " disagreements");
  auto value = [](std::string_view t) { return extract_answer(t); };
  c.expect(value("Final Answer: 543 multiplied by 27 equals 14661.") == AnswerValue::rational(14661), "14661");
  c.expect(value("Final Answer: 968 divided by 16 equals 60.5.") == AnswerValue::rational(Rational(121, 2)), "60.5");
  const auto prob = parse_structured(fixture("probability_refined.txt"));
  c.expect(prob.final_answer == AnswerValue::rational(Rational(1, 6)), "1/6");
  c.expect(prob.answer.find("\\frac{2}{3}") != std::string::npos &&
               value("\\boxed{\\frac{2}{3}}") == AnswerValue::rational(Rational(2, 3)),
           "2/3");
  const auto hyp = parse_structured(fixture("hyperbola_refined.txt"));
  c.expect(hyp.final_answer == AnswerValue::expression("100y^2 - 44x^2 = 275"), "hyperbola");
  if (c.o.pass) c.o.detail = std::to_string(agree) + "/" + std::to_string(n) + " cases; 14661, 60.5, 2/3, 1/6, hyperbola";
  return c.o;
}

// 10 ------------------------------------------------------------------------
double kappa_oracle(const std::vector<std::vector<std::uint64_t>>& counts) {
  // Explicit rater labels; agreement over ordered rater pairs.
  long double p_bar = 0;
  std::vector<long double> pooled(counts.front().size(), 0);
  std::size_t total = 0;
  for (const auto& row : counts) {
    std::vector<std::size_t> labels;
    for (std::size_t j = 0; j < row.size(); ++j) labels.insert(labels.end(), row[j], j);
    std::size_t agree = 0, pairs = 0;
    for (std::size_t a = 0; a < labels.size(); ++a)
      for (std::size_t b = 0; b < labels.size(); ++b)
        if (a != b) {
          ++pairs;
          agree += labels[a] == labels[b];
        }
    p_bar += static_cast<long double>(agree) / pairs;
    for (auto l : labels) pooled[l] += 1;
    total += labels.size();
  }
  p_bar /= counts.size();
  long double p_e = 0;
  for (auto v : pooled) p_e += (v / total) * (v / total);
  return static_cast<double>((p_bar - p_e) / (1 - p_e));
}

Outcome kappa() {
  Checker c;
  const auto start = Clock::now();
  c.expect(fleiss_kappa({{{4, 0, 0}, {0, 4, 0}, {0, 0, 4}}}) == 1.0, "unanimous != 1");
  const KappaInput derived{{{3, 0}, {2, 1}}};
  const double k = fleiss_kappa(derived);
  c.expect(std::abs(k - kappa_oracle(derived.counts)) <= 1e-12 && std::abs(k + 0.2) <= 1e-12, "[[3,0],[2,1]] != -0.2");
  std::mt19937_64 rng(5);
  KappaInput in;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::uint64_t> row(3, 0);
    for (int r = 0; r < 5; ++r) ++row[rng() % 3];
    in.counts.push_back(row);
  }
  const Rational base = fleiss_kappa_exact(in);
  std::size_t same = 0;
  for (int i = 0; i < 100; ++i) {
    auto s = in;
    std::shuffle(s.counts.begin(), s.counts.end(), rng);
    same += fleiss_kappa_exact(s) == base;
  }
  c.expect(same == 100, "permutation changed kappa");
  const double ms = elapsed_ms(start);
  c.expect(ms < 1000, "runtime");
  if (c.o.pass) {
    std::ostringstream d;
    d.precision(17);
    d << "unanimous 1; derived " << k << "; 100/100 shuffles invariant; " << ms << " ms";
    c.o.detail = d.str();
  }
  return c.o;
}

// 11 ------------------------------------------------------------------------
Outcome report_layout() {
  Checker c;
  std::vector<Problem> ps;
  std::vector<GradeRecord> grades;
  auto add = [&](const std::string& id, Language lang, Source src, Difficulty d, bool correct) {
    Problem p;
    p.id = id;
    p.language = lang;
    p.source = src;
    p.difficulty = d;
    p.question = "q";
    ps.push_back(p);
    const auto ref = AnswerValue::rational(1);
    grades.push_back({id, "WizardMath-7B", AnswerValue::rational(correct ? 1 : 2), ref,
                      correct ? Verdict::Correct : Verdict::Incorrect});
  };
  for (int i = 0; i < 100; ++i) add("g" + std::to_string(i), Language::English, Source::GSM8K, Difficulty::Easy, i < 71);
  for (int i = 0; i < 3; ++i) add("h" + std::to_string(i), Language::Hindi, Source::HAWP, Difficulty::Hard, i < 2);
  const auto dir = scratch("report");
  io::write_file(dir / "grades.jsonl", render_grades(grades));
  const auto report = accuracy_report(load_grades(dir / "grades.jsonl"), CorpusManifest(ps, SourceFormat::Derived, "t"));
  const auto table = render_report_table(report);
  std::vector<std::string> lines;
  std::istringstream is(table);
  for (std::string l; std::getline(is, l);) lines.push_back(l);
  c.expect(lines.size() == 5, "expected 3 header rows, rule and one model row");
  if (lines.size() == 5) {
    c.expect(lines[0].find("English benchmarks") < lines[0].find("Hindi benchmarks") &&
                 lines[0].find("Hindi benchmarks") != std::string::npos,
             "language header");
    c.expect(lines[1].find("GSM8K") < lines[1].find("HAWP") && lines[1].find("HAWP") != std::string::npos,
             "benchmark header");
    std::size_t subcols = 0;
    for (std::size_t at = 0; (at = lines[2].find("Easy", at)) != std::string::npos; ++at) ++subcols;
    c.expect(subcols == 2 && lines[2].find("Medium") != std::string::npos && lines[2].find("Hard") != std::string::npos,
             "difficulty sub-columns");
    c.expect(lines[4].find("| 71%") != std::string::npos, "71/100 != 71%");
    c.expect(lines[4].find("67%") != std::string::npos, "2/3 != 67%");
    c.expect(lines[4].find("—") != std::string::npos, "empty cell marker");
  }
  c.expect(percent_half_up(1, 8) == 13 && percent_half_up(1, 200) == 1 && percent_half_up(3, 8) == 38, "half-up");
  if (c.o.pass) c.o.detail = "English|Hindi > benchmark > Easy/Medium/Hard; 71/100 -> 71%, 2/3 -> 67%";
  return c.o;
}

// 12 ------------------------------------------------------------------------
Outcome pipeline_performance() {
  Checker c;
  const auto dir = scratch("perf");
  const auto start = Clock::now();
  cli::PipelineConfig cfg;
  cfg.out_dir = (dir / "demo").string();
  cli::run_demo(cfg, [](const std::string&) {});
  const auto lines = cli::run_scale(10000, 42);
  const double ms = elapsed_ms(start);
  c.expect(!lines.empty() && lines.front().starts_with("stage=classify in=10000"), "scale run");
  c.expect(ms < 10000, "runtime " + std::to_string(ms) + " ms");
  if (c.o.pass) c.o.detail = "demo + 10000-problem classify/decompose/split in " + std::to_string(static_cast<int>(ms)) + " ms";
  return c.o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"decomposition worked examples", decomposition_examples},
      {"decomposition oracle sweep", decomposition_sweep},
      {"MATH level mapping", math_levels},
      {"merge arithmetic", merge_arithmetic},
      {"split properties", split_properties},
      {"curriculum invariants", curriculum_invariants},
      {"prompt fidelity", prompt_fidelity},
      {"structured-solution round-trip", structured_round_trip},
      {"answer extraction suite", extraction_suite},
      {"Fleiss kappa", kappa},
      {"accuracy report layout", report_layout},
      {"pipeline performance", pipeline_performance},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail << "\n";
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}

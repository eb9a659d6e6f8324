#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bimath/classify.hpp"
#include "bimath/corpus.hpp"
#include "bimath/curriculum.hpp"
#include "bimath/decompose.hpp"
#include "bimath/demo_fixtures.hpp"
#include "bimath/errors.hpp"
#include "bimath/evaluate.hpp"
#include "bimath/io.hpp"
#include "bimath/llm_client.hpp"
#include "bimath/structure.hpp"

namespace bimath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct PipelineConfig {
  std::string out_dir = "bimath-demo";
  std::string gsm8k, math, hawp, indimathqa;  // optional corpus paths; empty = bundled fixtures
  std::uint64_t seed = 42;
  double ratio = 0.70;
  CurriculumMode mode = CurriculumMode::BilingualCombined;
  bool cumulative = false;
  std::string provider;  // provider config file; empty = in-memory mock
  std::string log_level = "info";

  bool operator==(const PipelineConfig&) const = default;

  /// Fails before any stage runs if a referenced input is missing.
  void validate() const {
    for (const auto* p : {&gsm8k, &math, &hawp, &indimathqa, &provider})
      if (!p->empty() && !std::filesystem::exists(*p)) throw IoError("config path not found: " + *p);
    if (!(ratio > 0 && ratio < 1)) throw ValidationError("ratio must lie in (0, 1)");
    if (log_level != "quiet" && log_level != "info" && log_level != "debug")
      throw ValidationError("log_level must be quiet, info or debug");
  }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
  return {{"out_dir", c.out_dir},
          {"corpora", {{"gsm8k", c.gsm8k}, {"math", c.math}, {"hawp", c.hawp}, {"indimathqa", c.indimathqa}}},
          {"seed", c.seed},
          {"ratio", c.ratio},
          {"mode", std::string(to_string(c.mode))},
          {"cumulative", c.cumulative},
          {"provider", c.provider},
          {"log_level", c.log_level}};
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  c.out_dir = j.value("out_dir", c.out_dir);
  if (j.contains("corpora")) {
    const auto& k = j.at("corpora");
    c.gsm8k = k.value("gsm8k", "");
    c.math = k.value("math", "");
    c.hawp = k.value("hawp", "");
    c.indimathqa = k.value("indimathqa", "");
  }
  c.seed = j.value("seed", c.seed);
  c.ratio = j.value("ratio", c.ratio);
  c.mode = parse_curriculum_mode(j.value("mode", std::string("bilingual")));
  c.cumulative = j.value("cumulative", c.cumulative);
  c.provider = j.value("provider", c.provider);
  c.log_level = j.value("log_level", c.log_level);
  return c;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct StageLine {
  std::string name;
  std::size_t in = 0, out = 0, flagged = 0;
};

inline std::string summary(const StageLine& s) {
  return "stage=" + s.name + " in=" + std::to_string(s.in) + " out=" + std::to_string(s.out) +
         " flagged=" + std::to_string(s.flagged);
}

inline bool use_color() {
  const char* nc = std::getenv("NO_COLOR");
  return (!nc || !*nc) && ::isatty(STDOUT_FILENO);
}

inline std::size_t count_unclassified(const CorpusManifest& m) {
  std::size_t n = 0;
  for (const auto& p : m.records()) n += p.difficulty == Difficulty::Unclassified;
  return n;
}

inline std::map<Difficulty, std::size_t> parse_expected_totals(const std::string& spec) {
  std::map<Difficulty, std::size_t> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw FormatError("expected difficulty=count, got '" + item + "'");
    out[parse_difficulty(item.substr(0, eq))] = std::stoull(item.substr(eq + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stage operations shared by subcommands and the demo
// ---------------------------------------------------------------------------

inline StageLine stage_ingest(SourceFormat f, const std::filesystem::path& in,
                              const std::filesystem::path& out) {
  auto m = ingest(f, in);
  save_manifest(m, out);
  return {"ingest", m.size(), m.size(), 0};
}

struct ClassifyArgs {
  bool math_levels = false;
  bool score = false;
  std::size_t bottom_k = 0;
  std::string annotations;
};

inline StageLine stage_classify(const std::filesystem::path& in, const std::filesystem::path& out,
                                const ClassifyArgs& a) {
  const auto m = load_manifest(in);
  const int modes = int(a.math_levels) + int(a.score) + int(!a.annotations.empty());
  if (modes != 1) throw ValidationError("choose exactly one of --math-levels, --score, --annotations");
  CorpusManifest r;
  if (a.math_levels) r = apply_math_levels(m);
  else if (a.score) r = rank_bottom_k(m, a.bottom_k);
  else r = apply_annotations(m, parse_annotations(io::read_file(a.annotations))).manifest;
  save_manifest(r, out);
  return {"classify", m.size(), r.size(), count_unclassified(r)};
}

inline DecomposeResult stage_decompose(const std::filesystem::path& in, const std::filesystem::path& out,
                                       const DecomposeOptions& opts) {
  auto r = apply_decomposition(load_manifest(in), opts);
  save_manifest(r.manifest, out);
  return r;
}

/// A deterministic stand-in model for the demo: right on most items, wrong
/// on every fifth and unparseable on every seventh.
inline std::string demo_prediction(const Problem& p, std::size_t index) {
  const auto ref = reference_answer(p);
  if (!ref || index % 7 == 6) return "I could not solve this problem.";
  std::string value;
  if (!ref->is_numeric()) value = ref->expression_text() + (index % 5 == 4 ? " + 1" : "");
  else value = format_fraction(ref->value() + (index % 5 == 4 ? 1 : 0));
  return "Reasoning omitted.\\n\\boxed{" + value + "}";
}

// ---------------------------------------------------------------------------
// Demo
// ---------------------------------------------------------------------------

struct DemoResult {
  std::vector<std::string> lines;
};

/// Runs ingest, classify, decompose, augment, review, merge, split, build,
/// export and evaluate over the bundled (or configured) corpora.
inline DemoResult run_demo(const PipelineConfig& cfg, const std::function<void(const std::string&)>& log) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path root = cfg.out_dir;
  const fs::path man = root / "manifests";
  DemoResult res;
  auto say = [&](const std::string& s) {
    res.lines.push_back(s);
    log(s);
  };

  demo::FixturePaths src = demo::write_fixtures(root / "fixtures");
  if (!cfg.gsm8k.empty()) src.gsm8k = cfg.gsm8k;
  if (!cfg.math.empty()) src.math = cfg.math;
  if (!cfg.hawp.empty()) src.hawp = cfg.hawp;
  if (!cfg.indimathqa.empty()) src.indimathqa = cfg.indimathqa;

  say(summary(stage_ingest(SourceFormat::Gsm8k, src.gsm8k, man / "gsm8k.jsonl")));
  say(summary(stage_ingest(SourceFormat::Math, src.math, man / "math.jsonl")));
  say(summary(stage_ingest(SourceFormat::Hawp, src.hawp, man / "hawp.jsonl")));
  say(summary(stage_ingest(SourceFormat::IndiMathQA, src.indimathqa, man / "indimathqa.jsonl")));

  const std::size_t gsm_k = std::max<std::size_t>(1, load_manifest(man / "gsm8k.jsonl").size() * 2 / 5);
  say(summary(stage_classify(man / "gsm8k.jsonl", man / "gsm8k.classified.jsonl", {false, true, gsm_k, ""})));
  say(summary(stage_classify(man / "math.jsonl", man / "math.classified.jsonl", {true, false, 0, ""})));
  // HAWP items are single-operation grade-school problems: all ranked Easy.
  const std::size_t hawp_n = load_manifest(man / "hawp.jsonl").size();
  say(summary(stage_classify(man / "hawp.jsonl", man / "hawp.classified.jsonl", {false, true, hawp_n, ""})));

  const auto dec = stage_decompose(man / "hawp.classified.jsonl", man / "hawp.decomposed.jsonl", {});
  say(summary({"decompose", dec.manifest.size(), dec.manifest.size(), dec.skipped_ids.size()}));
  say("rewritten=" + std::to_string(dec.rewritten) + " skipped=" + std::to_string(dec.skipped_ids.size()));

  // Augmentation through the mock provider, then an all-approve review.
  const auto gsm = load_manifest(man / "gsm8k.classified.jsonl");
  std::vector<Problem> easy_seeds;
  for (const auto& p : gsm.records())
    if (p.difficulty == Difficulty::Easy) easy_seeds.push_back(p);
  const CorpusManifest seeds = derive(gsm, easy_seeds);
  MockProvider mock;
  const auto tpl = prompt_template(PromptName::Augment);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Problem& s = seeds.records()[i];
    std::string reply = i % 5 == 3 ? "Sorry, I cannot help with that."
                                   : "Question: " + s.question + " Then two more arrive.\nAnswer: " +
                                         s.raw_solution.value_or("") + "\nAdd 2 more at the end.";
    mock.add(augment_prompt(tpl, s), reply);
  }
  AugmentOptions aopts;
  aopts.target = std::min<std::size_t>(6, seeds.size());
  aopts.concurrency = 4;
  auto aug = augment_batch(seeds, mock, tpl, aopts);
  say(summary({"augment", seeds.size(), aug.manifest.size(), aug.discarded}));
  std::map<std::string, ReviewStatus> review;
  for (const auto& p : aug.manifest.records()) review[p.id] = ReviewStatus::Approved;
  const auto reviewed = apply_review(aug.manifest, review);
  save_manifest(reviewed, man / "synthetic.jsonl");

  auto merged = merge_sources({gsm, load_manifest(man / "math.classified.jsonl"), dec.manifest,
                               load_manifest(man / "indimathqa.jsonl"), reviewed});
  save_manifest(merged.manifest, man / "merged.jsonl");
  say(summary({"merge", merged.manifest.size(), merged.manifest.size(), count_unclassified(merged.manifest)}));

  const auto sp = split(merged.manifest, cfg.seed, cfg.ratio);
  io::write_file(root / "split.json", to_json(sp).dump(2) + "\n");
  std::size_t test_n = 0;
  for (const auto& [id, part] : sp.assignments) test_n += part == Part::Test;
  say(summary({"split", merged.manifest.size(), sp.assignments.size(), 0}) + " test=" + std::to_string(test_n));

  BuildOptions bopts{cfg.mode, cfg.cumulative, true};
  const auto cur = build_curriculum(merged.manifest, sp, bopts);
  check_curriculum(cur);
  io::write_file(root / "curriculum.json", to_json(cur).dump(2) + "\n");
  say(summary({"curriculum", merged.manifest.size(), cur.stages[0].train_ids.size() + cur.stages[1].train_ids.size(),
               count_unclassified(merged.manifest)}));

  for (const auto& stage : cur.stages) {
    const auto ex = export_stage(cur, stage.name, merged.manifest, cfg.seed,
                                 root / "stages" / (stage.checkpoint_name + ".jsonl"));
    say(summary({"export", stage.train_ids.size(), ex.exported, ex.skipped}) +
        " checkpoint=" + stage.checkpoint_name);
  }
  emit_training_config(root / "stages" / "training_config.txt");

  std::string preds;
  for (std::size_t i = 0; i < cur.test_ids.size(); ++i) {
    const Problem* p = merged.manifest.find(cur.test_ids[i]);
    preds += p->id + "\t" + demo_prediction(*p, i) + "\n";
  }
  io::write_file(root / "eval" / "predictions.tsv", preds);
  const auto grades = grade_predictions(preds, merged.manifest, "demo-model");
  io::write_file(root / "eval" / "grades.jsonl", render_grades(grades));
  std::size_t unparseable = 0;
  for (const auto& g : grades) unparseable += g.verdict == Verdict::Unparseable;
  say(summary({"evaluate", cur.test_ids.size(), grades.size(), unparseable}));
  const auto report = accuracy_report(grades, merged.manifest);
  io::write_file(root / "eval" / "report.txt", render_report_table(report));
  io::write_file(root / "eval" / "report.csv", render_report_csv(report));

  const KappaInput kin{{{3, 0, 0}, {0, 3, 0}, {0, 2, 1}, {0, 0, 3}, {1, 2, 0}}};
  say(summary({"kappa", kin.items(), 1, 0}) + " kappa=" + format_double(fleiss_kappa(kin)));
  return res;
}

/// Classify + decompose + split over the generated scale corpus.
inline std::vector<std::string> run_scale(std::size_t count, std::uint64_t seed) {
  std::vector<std::string> lines;
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = demo::scale_corpus(count, seed);
  const auto classified = rank_bottom_k(corpus, corpus.size() / 3);
  lines.push_back(summary({"classify", corpus.size(), classified.size(), count_unclassified(classified)}));
  const auto dec = apply_decomposition(classified);
  lines.push_back(summary({"decompose", classified.size(), dec.manifest.size(), dec.skipped_ids.size()}));
  lines.push_back("rewritten=" + std::to_string(dec.rewritten) + " skipped=" + std::to_string(dec.skipped_ids.size()));
  const auto sp = split(dec.manifest, seed, 0.70);
  lines.push_back(summary({"split", dec.manifest.size(), sp.assignments.size(), 0}));
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  lines.push_back("scale=" + std::to_string(count) + " elapsed_ms=" + std::to_string(ms.count()));
  return lines;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bilingual math-reasoning data pipeline", "bimath"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::string stage = "bimath";
  std::function<void()> action;
  auto bind = [&](CLI::App* sub, std::string name, std::function<void()> fn) {
    sub->callback([&stage, &action, name = std::move(name), fn = std::move(fn)] {
      stage = name;
      action = fn;
    });
  };

  // ingest
  std::string in, out_path, format;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert a source corpus into a manifest");
  ingest_cmd->add_option("--format", format, "gsm8k | math | hawp | indimathqa")->required();
  ingest_cmd->add_option("--in", in, "Source JSONL file")->required();
  ingest_cmd->add_option("--out", out_path, "Output manifest")->required();
  bind(ingest_cmd, "ingest", [&] { out << summary(stage_ingest(parse_source_format(format), in, out_path)) << "\n"; });

  // classify
  ClassifyArgs cargs;
  auto* classify_cmd = app.add_subcommand("classify", "Assign Easy/Medium/Hard difficulty");
  classify_cmd->add_option("--in", in, "Input manifest")->required();
  classify_cmd->add_option("--out", out_path, "Output manifest")->required();
  classify_cmd->add_flag("--math-levels", cargs.math_levels, "Map MATH levels 1-5 to difficulties");
  classify_cmd->add_flag("--score", cargs.score, "Rank by complexity score and mark the bottom k Easy");
  classify_cmd->add_option("--bottom-k", cargs.bottom_k, "Number of problems marked Easy with --score");
  classify_cmd->add_option("--annotations", cargs.annotations, "id<TAB>difficulty file");
  bind(classify_cmd, "classify", [&] {
    if (cargs.score && classify_cmd->count("--bottom-k") == 0)
      throw ValidationError("--score requires --bottom-k");
    out << summary(stage_classify(in, out_path, cargs)) << "\n";
  });

  // decompose
  std::string ops = "mul,div", lang = "auto";
  auto* decompose_cmd = app.add_subcommand("decompose", "Rewrite multiplication/division solutions as place-value steps");
  decompose_cmd->add_option("--in", in, "Input manifest")->required();
  decompose_cmd->add_option("--out", out_path, "Output manifest")->required();
  decompose_cmd->add_option("--ops", ops, "Comma list of mul, div")->capture_default_str();
  decompose_cmd->add_option("--lang", lang, "auto | en | hi")->capture_default_str();
  bind(decompose_cmd, "decompose", [&] {
    DecomposeOptions o{false, false, std::nullopt};
    std::stringstream ss(ops);
    std::string op;
    while (std::getline(ss, op, ',')) {
      const auto v = parse_operation(op);
      if (v == Operation::Mul) o.multiplication = true;
      else if (v == Operation::Div) o.division = true;
      else throw ValidationError("--ops accepts mul and div only");
    }
    if (lang != "auto") o.language = parse_language(lang);
    const auto r = stage_decompose(in, out_path, o);
    out << summary({"decompose", r.manifest.size(), r.manifest.size(), r.skipped_ids.size()}) << "\n";
    out << "rewritten=" << r.rewritten << " skipped=" << r.skipped_ids.size() << "\n";
    for (const auto& id : r.skipped_ids) err << "skipped " << id << "\n";
  });

  // structure
  auto* structure_cmd = app.add_subcommand("structure", "Structured solutions, prompt templates, training config");
  structure_cmd->require_subcommand(1);
  std::string template_name, bindings_path;
  auto* s_parse = structure_cmd->add_subcommand("parse", "Parse a structured solution text into JSON");
  s_parse->add_option("--in", in, "Solution text file")->required();
  s_parse->add_option("--out", out_path, "Output JSON file (default stdout)");
  bind(s_parse, "structure", [&] {
    const auto s = parse_structured(io::read_file(in));
    const std::string j = bimath::to_json(s).dump(2) + "\n";
    if (out_path.empty()) out << j;
    else io::write_file(out_path, j);
    out << summary({"structure", 1, 1, 0}) << "\n";
  });
  auto* s_render = structure_cmd->add_subcommand("render", "Render a structured solution JSON as text");
  s_render->add_option("--in", in, "Structured solution JSON")->required();
  s_render->add_option("--lang", lang, "en | hi")->capture_default_str();
  s_render->add_option("--out", out_path, "Output text file (default stdout)");
  bind(s_render, "structure", [&] {
    const auto s = structured_from_json(read_json(in));
    const auto text = render_structured(s, parse_language(lang == "auto" ? "en" : lang));
    if (out_path.empty()) out << text;
    else io::write_file(out_path, text);
    out << summary({"structure", 1, 1, 0}) << "\n";
  });
  auto* s_prompt = structure_cmd->add_subcommand("prompt", "Fill a prompt template from a bindings file");
  s_prompt->add_option("--template", template_name, "finetune | augment | decompose-mul | decompose-div")->required();
  s_prompt->add_option("--bindings", bindings_path, "JSON object of placeholder values")->required();
  s_prompt->add_option("--out", out_path, "Output file (default stdout)");
  bind(s_prompt, "structure", [&] {
    Bindings b;
    const auto j = read_json(bindings_path);
    if (!j.is_object()) throw FormatError("bindings file must hold a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (!v.is_string()) throw FormatError("binding " + k + " is not a string");
      b[k] = v.get<std::string>();
    }
    const auto text = render_prompt(prompt_template(parse_prompt_name(template_name)), b);
    if (out_path.empty()) out << text << "\n";
    else io::write_file(out_path, text);
    out << summary({"structure", 1, 1, 0}) << "\n";
  });
  auto* s_config = structure_cmd->add_subcommand("emit-config", "Write the fine-tuning sampling configuration");
  s_config->add_option("--out", out_path, "Output path")->required();
  bind(s_config, "structure", [&] {
    emit_training_config(out_path);
    out << summary({"structure", 0, 1, 0}) << "\n";
  });

  // curriculum
  auto* cur_cmd = app.add_subcommand("curriculum", "Pair, merge, split, build and export curriculum stages");
  cur_cmd->require_subcommand(1);
  std::string en_path, hi_path, key = "id", expect, split_path, manifest_path, curriculum_path, stage_name, mode = "bilingual";
  std::vector<std::string> inputs;
  std::uint64_t seed = 42;
  double ratio = 0.70;
  bool cumulative = false, drop_unclassified = false;
  auto* c_pair = cur_cmd->add_subcommand("pair", "Pair an English and a Hindi manifest");
  c_pair->add_option("--en", en_path, "English manifest")->required();
  c_pair->add_option("--hi", hi_path, "Hindi manifest")->required();
  c_pair->add_option("--key", key, "id | index")->capture_default_str();
  c_pair->add_option("--out", out_path, "Output manifest")->required();
  bind(c_pair, "curriculum", [&] {
    if (key != "id" && key != "index") throw ValidationError("--key must be id or index");
    const auto en = load_manifest(en_path), hi = load_manifest(hi_path);
    const auto m = pair_bilingual(en, hi, key == "id" ? PairKey::ById : PairKey::ByIndex);
    save_manifest(m, out_path);
    out << summary({"pair", en.size() + hi.size(), m.size(), 0}) << "\n";
  });
  auto* c_merge = cur_cmd->add_subcommand("merge", "Merge manifests and report per-difficulty totals");
  c_merge->add_option("--in", inputs, "Input manifests")->required()->expected(1, -1);
  c_merge->add_option("--out", out_path, "Output manifest")->required();
  c_merge->add_option("--expect", expect, "Expected totals, e.g. easy=10,medium=20,hard=5");
  bind(c_merge, "curriculum", [&] {
    std::vector<CorpusManifest> ms;
    std::size_t n_in = 0;
    for (const auto& p : inputs) {
      ms.push_back(load_manifest(p));
      n_in += ms.back().size();
    }
    const auto r = merge_sources(ms);
    save_manifest(r.manifest, out_path);
    for (const auto& [d, n] : r.totals) out << "total " << to_string(d) << "=" << n << "\n";
    std::size_t flagged = 0;
    if (!expect.empty()) {
      for (const auto& d : compare_totals(r.totals, parse_expected_totals(expect))) {
        out << "discrepancy " << to_string(d.difficulty) << " computed=" << d.computed
            << " expected=" << d.expected << "\n";
        ++flagged;
      }
    }
    out << summary({"merge", n_in, r.manifest.size(), flagged}) << "\n";
  });
  auto* c_split = cur_cmd->add_subcommand("split", "Seeded stratified train/test split");
  c_split->add_option("--in", in, "Input manifest")->required();
  c_split->add_option("--out", out_path, "Output split JSON")->required();
  c_split->add_option("--seed", seed, "Random seed")->capture_default_str();
  c_split->add_option("--ratio", ratio, "Train fraction")->capture_default_str();
  bind(c_split, "curriculum", [&] {
    const auto m = load_manifest(in);
    const auto s = split(m, seed, ratio);
    io::write_file(out_path, to_json(s).dump(2) + "\n");
    out << summary({"split", m.size(), s.assignments.size(), 0}) << "\n";
  });
  auto* c_build = cur_cmd->add_subcommand("build", "Build the two-stage curriculum");
  c_build->add_option("--in", in, "Classified manifest")->required();
  c_build->add_option("--split", split_path, "Split JSON")->required();
  c_build->add_option("--out", out_path, "Output curriculum JSON")->required();
  c_build->add_option("--mode", mode, "en | hi | bilingual")->capture_default_str();
  c_build->add_flag("--cumulative", cumulative, "Stage 2 also contains the Easy problems");
  c_build->add_flag("--drop-unclassified", drop_unclassified, "Exclude Unclassified problems instead of failing");
  bind(c_build, "curriculum", [&] {
    const auto m = load_manifest(in);
    const auto s = split_from_json(read_json(split_path));
    const auto c = build_curriculum(m, s, {parse_curriculum_mode(mode), cumulative, drop_unclassified});
    io::write_file(out_path, to_json(c).dump(2) + "\n");
    out << summary({"curriculum", m.size(), c.stages[0].train_ids.size() + c.stages[1].train_ids.size(),
                    drop_unclassified ? count_unclassified(m) : 0})
        << "\n";
  });
  auto* c_export = cur_cmd->add_subcommand("export", "Write one stage as a fine-tuning JSONL file");
  c_export->add_option("--curriculum", curriculum_path, "Curriculum JSON")->required();
  c_export->add_option("--manifest", manifest_path, "Manifest holding the stage problems")->required();
  c_export->add_option("--stage", stage_name, "Stage or checkpoint name")->required();
  c_export->add_option("--out", out_path, "Output JSONL")->required();
  c_export->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  bind(c_export, "curriculum", [&] {
    const auto c = curriculum_from_json(read_json(curriculum_path));
    const auto m = load_manifest(manifest_path);
    const auto r = export_stage(c, stage_name, m, seed, out_path);
    out << "exported=" << r.exported << " skipped=" << r.skipped << "\n";
    out << summary({"export", find_stage(c, stage_name).train_ids.size(), r.exported, r.skipped}) << "\n";
  });

  // augment
  std::string provider_path, fixtures_dir, review_path;
  std::size_t target = 0, concurrency = 4;
  auto* aug_cmd = app.add_subcommand("augment", "Generate Synthetic problems or apply review decisions");
  aug_cmd->add_option("--in", in, "Seed manifest")->required();
  aug_cmd->add_option("--out", out_path, "Output manifest")->required();
  aug_cmd->add_option("--target", target, "Number of new problems");
  aug_cmd->add_option("--template", template_name, "Prompt template (augment)")->capture_default_str();
  aug_cmd->add_option("--provider", provider_path, "Provider config JSON");
  aug_cmd->add_option("--fixtures", fixtures_dir, "Mock fixture directory (overrides the config)");
  aug_cmd->add_option("--concurrency", concurrency, "Generations per wave")->capture_default_str();
  aug_cmd->add_option("--review", review_path, "Apply id<TAB>status decisions instead of generating");
  bind(aug_cmd, "augment", [&] {
    const auto m = load_manifest(in);
    if (!review_path.empty()) {
      const auto r = apply_review(m, parse_review_file(io::read_file(review_path)));
      std::size_t pending = 0;
      for (const auto& p : r.records()) pending += p.review_status && *p.review_status != ReviewStatus::Approved;
      save_manifest(r, out_path);
      out << summary({"augment", m.size(), r.size(), pending}) << "\n";
      return;
    }
    if (aug_cmd->count("--target") == 0) throw ValidationError("--target is required unless --review is given");
    ProviderConfig pc;
    if (!provider_path.empty()) pc = provider_config_from_json(read_json(provider_path));
    if (!fixtures_dir.empty()) {
      pc.kind = "mock";
      pc.fixtures = fixtures_dir;
    }
    auto provider = make_provider(pc);
    AugmentOptions o;
    o.target = target;
    o.concurrency = concurrency;
    const auto r = augment_batch(m, *provider, prompt_template(parse_prompt_name(template_name.empty() ? "augment" : template_name)), o);
    save_manifest(r.manifest, out_path);
    out << "attempts=" << r.attempts << " discarded=" << r.discarded << "\n";
    out << summary({"augment", m.size(), r.manifest.size(), r.discarded}) << "\n";
  });

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Grade predictions, build accuracy reports, compute kappa");
  eval_cmd->require_subcommand(1);
  std::string pred_path, model, report_format = "table", counts_path;
  std::vector<std::string> grade_files;
  auto* e_grade = eval_cmd->add_subcommand("grade", "Grade a problem_id<TAB>output prediction file");
  e_grade->add_option("--pred", pred_path, "Prediction file")->required();
  e_grade->add_option("--manifest", manifest_path, "Reference manifest")->required();
  e_grade->add_option("--model", model, "Model name")->required();
  e_grade->add_option("--out", out_path, "Output grades JSONL")->required();
  bind(e_grade, "evaluate", [&] {
    const auto text = io::read_file(pred_path);
    const auto g = grade_predictions(text, load_manifest(manifest_path), model);
    io::write_file(out_path, render_grades(g));
    std::size_t unparseable = 0;
    for (const auto& r : g) unparseable += r.verdict == Verdict::Unparseable;
    out << summary({"evaluate", g.size(), g.size(), unparseable}) << "\n";
  });
  auto* e_report = eval_cmd->add_subcommand("report", "Accuracy table grouped by language, benchmark and difficulty");
  e_report->add_option("--grades", grade_files, "Grade JSONL files")->required()->expected(1, -1);
  e_report->add_option("--manifest", manifest_path, "Manifest holding the graded problems")->required();
  e_report->add_option("--format", report_format, "table | csv")->capture_default_str();
  e_report->add_option("--out", out_path, "Output file (default stdout)");
  bind(e_report, "evaluate", [&] {
    if (report_format != "table" && report_format != "csv") throw ValidationError("--format must be table or csv");
    std::vector<GradeRecord> all;
    for (const auto& f : grade_files) {
      auto g = load_grades(f);
      all.insert(all.end(), g.begin(), g.end());
    }
    const auto r = accuracy_report(all, load_manifest(manifest_path));
    const auto text = report_format == "table" ? render_report_table(r) : render_report_csv(r);
    if (out_path.empty()) out << text;
    else io::write_file(out_path, text);
    out << summary({"evaluate", all.size(), r.columns.size() * r.models.size(), 0}) << "\n";
  });
  auto kappa_action = [&] {
    const auto k = parse_kappa_counts(io::read_file(counts_path));
    const auto exact = fleiss_kappa_exact(k);
    out << "kappa=" << format_double(static_cast<double>(exact)) << " exact=" << format_fraction(exact) << "\n";
    out << summary({"kappa", k.items(), 1, 0}) << "\n";
  };
  auto* e_kappa = eval_cmd->add_subcommand("kappa", "Fleiss' kappa from an items x categories count matrix");
  e_kappa->add_option("--counts", counts_path, "Count matrix file")->required();
  bind(e_kappa, "kappa", kappa_action);
  auto* kappa_cmd = app.add_subcommand("kappa", "Alias of evaluate kappa");
  kappa_cmd->add_option("--counts", counts_path, "Count matrix file")->required();
  bind(kappa_cmd, "kappa", kappa_action);

  // demo
  std::string config_path, demo_out = "bimath-demo";
  std::size_t scale = 0;
  auto* demo_cmd = app.add_subcommand("demo", "Run the whole pipeline on bundled fixture corpora");
  demo_cmd->add_option("--out", demo_out, "Output directory")->capture_default_str();
  demo_cmd->add_option("--config", config_path, "Pipeline config JSON (overrides --out/--seed/--ratio/--mode)");
  demo_cmd->add_option("--seed", seed, "Split and shuffle seed")->capture_default_str();
  demo_cmd->add_option("--ratio", ratio, "Train fraction")->capture_default_str();
  demo_cmd->add_option("--mode", mode, "en | hi | bilingual")->capture_default_str();
  demo_cmd->add_flag("--cumulative", cumulative, "Stage 2 also contains the Easy problems");
  demo_cmd->add_option("--scale", scale, "Also run classify+decompose+split on N generated problems");
  bind(demo_cmd, "demo", [&] {
    PipelineConfig pc;
    if (!config_path.empty()) {
      pc = pipeline_config_from_json(read_json(config_path));
    } else {
      pc.out_dir = demo_out;
      pc.seed = seed;
      pc.ratio = ratio;
      pc.mode = parse_curriculum_mode(mode);
      pc.cumulative = cumulative;
    }
    const bool quiet = pc.log_level == "quiet";
    run_demo(pc, [&](const std::string& line) {
      if (!quiet || line.starts_with("stage=")) out << line << "\n";
    });
    if (scale > 0)
      for (const auto& line : run_scale(scale, pc.seed)) out << line << "\n";
    const std::string ok = use_color() ? "\x1b[32mok\x1b[0m" : "ok";
    out << "demo " << ok << " out=" << pc.out_dir << "\n";
  });

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(argv_rev));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (!action) {
    err << app.help();
    return kExitUsage;
  }
  try {
    action();
  } catch (const Error& e) {
    err << "error: stage=" << stage << " " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: stage=" << stage << " " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace bimath::cli

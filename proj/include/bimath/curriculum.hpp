#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bimath/corpus.hpp"
#include "bimath/digest.hpp"
#include "bimath/errors.hpp"
#include "bimath/io.hpp"
#include "bimath/structure.hpp"
#include "bimath/types.hpp"

namespace bimath {

// ---------------------------------------------------------------------------
// Pairing and merging
// ---------------------------------------------------------------------------

enum class PairKey { ById, ByIndex };

/// Merges an English and a Hindi corpus into one where each twin pair shares
/// a pair_id ("pair-<english id>"). ById expects identical id sets and
/// suffixes merged ids with "-en"/"-hi"; ByIndex pairs record k with record k
/// and keeps ids. Twins are emitted adjacently in English-record order.
inline CorpusManifest pair_bilingual(const CorpusManifest& en, const CorpusManifest& hi,
                                     PairKey key) {
  for (const auto& p : en.records())
    if (p.language != Language::English)
      throw ValidationError("English corpus contains non-English problem " + p.id);
  for (const auto& p : hi.records())
    if (p.language != Language::Hindi)
      throw ValidationError("Hindi corpus contains non-Hindi problem " + p.id);
  if (en.size() != hi.size())
    throw ValidationError("corpus sizes differ: en=" + std::to_string(en.size()) +
                          " hi=" + std::to_string(hi.size()));

  std::vector<std::pair<const Problem*, const Problem*>> twins;
  twins.reserve(en.size());
  if (key == PairKey::ById) {
    std::vector<std::string> missing;
    for (const auto& p : en.records()) {
      const Problem* h = hi.find(p.id);
      if (!h) missing.push_back(p.id);
      else twins.emplace_back(&p, h);
    }
    if (!missing.empty()) {
      std::string msg = "ids without a Hindi twin:";
      for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
      throw ValidationError(msg);
    }
  } else {
    for (std::size_t i = 0; i < en.size(); ++i)
      twins.emplace_back(&en.records()[i], &hi.records()[i]);
  }

  std::vector<std::string> disagreements;
  for (const auto& [e, h] : twins) {
    if (e->difficulty != h->difficulty || e->source != h->source)
      disagreements.push_back(e->id + "/" + h->id);
  }
  if (!disagreements.empty()) {
    std::string msg = "difficulty or source disagreement within pairs:";
    for (std::size_t i = 0; i < disagreements.size() && i < 10; ++i) msg += " " + disagreements[i];
    throw ValidationError(msg);
  }

  std::vector<Problem> out;
  out.reserve(en.size() * 2);
  for (const auto& [e, h] : twins) {
    Problem pe = *e, ph = *h;
    pe.pair_id = ph.pair_id = "pair-" + e->id;
    if (key == PairKey::ById) {
      pe.id += "-en";
      ph.id += "-hi";
    }
    out.push_back(std::move(pe));
    out.push_back(std::move(ph));
  }
  std::set<std::string_view> ids;
  for (const auto& p : out)
    if (!ids.insert(p.id).second) throw ValidationError("id collision after pairing: " + p.id);
  return CorpusManifest(std::move(out), SourceFormat::Derived, latest_created_at({&en, &hi}));
}

struct MergeResult {
  CorpusManifest manifest;
  std::map<Difficulty, std::size_t> totals;
};

/// Concatenates manifests with disjoint id spaces.
inline MergeResult merge_sources(const std::vector<CorpusManifest>& inputs) {
  std::vector<Problem> out;
  std::set<std::string> ids;
  std::string created(kEpoch);
  for (const auto& m : inputs) {
    if (m.created_at() > created) created = m.created_at();
    for (const auto& p : m.records()) {
      if (!ids.insert(p.id).second) throw ValidationError("id collision while merging: " + p.id);
      out.push_back(p);
    }
  }
  MergeResult r;
  r.manifest = CorpusManifest(std::move(out), SourceFormat::Derived, created);
  r.totals = difficulty_counts(r.manifest);
  return r;
}

struct CountDiscrepancy {
  Difficulty difficulty;
  std::size_t computed = 0;
  std::size_t expected = 0;
};

/// Compares computed per-difficulty totals with externally stated totals.
inline std::vector<CountDiscrepancy> compare_totals(
    const std::map<Difficulty, std::size_t>& computed,
    const std::map<Difficulty, std::size_t>& expected) {
  std::vector<CountDiscrepancy> out;
  for (const auto& [d, want] : expected) {
    const auto it = computed.find(d);
    const std::size_t got = it == computed.end() ? 0 : it->second;
    if (got != want) out.push_back({d, got, want});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stratified split
// ---------------------------------------------------------------------------

enum class Part { Train, Test };

inline std::string_view to_string(Part p) { return p == Part::Train ? "train" : "test"; }

struct StratumKey {
  Source source;
  Difficulty difficulty;
  Language language;
  auto operator<=>(const StratumKey&) const = default;
};

struct StratumCounts {
  std::size_t train = 0;
  std::size_t test = 0;
  std::size_t size() const { return train + test; }
  bool operator==(const StratumCounts&) const = default;
};

struct SplitAssignment {
  std::uint64_t seed = 0;
  double ratio = 0.70;
  std::map<std::string, Part> assignments;
  std::map<StratumKey, StratumCounts> strata;

  bool operator==(const SplitAssignment&) const = default;
};

namespace curriculum_detail {

// Unbiased draw in [0, n) by rejection; the engine output is fully specified
// by the standard, so results are portable across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

inline std::size_t train_quota(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

}  // namespace curriculum_detail

/// Seeded stratified split by (source, difficulty, language). Twins sharing
/// a pair_id are assigned together: units are formed per pair and cut per
/// (source, difficulty, language set), which keeps every language stratum
/// within one problem of ratio * size.
inline SplitAssignment split(const CorpusManifest& manifest, std::uint64_t seed, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("split ratio must lie in (0, 1)");

  struct Unit {
    std::string key;
    std::vector<const Problem*> members;
  };
  std::map<std::string, Unit> units;
  for (const auto& p : manifest.records()) {
    const std::string key = p.pair_id.empty() ? "id:" + p.id : "pair:" + p.pair_id;
    auto& u = units[key];
    u.key = key;
    u.members.push_back(&p);
  }

  // (source, difficulty, language mask) -> unit keys, sorted
  std::map<std::tuple<Source, Difficulty, int>, std::vector<const Unit*>> unit_strata;
  for (const auto& [key, u] : units) {
    int mask = 0;
    for (const Problem* m : u.members) mask |= 1 << static_cast<int>(m->language);
    const Problem& first = *u.members.front();
    unit_strata[{first.source, first.difficulty, mask}].push_back(&u);
  }

  SplitAssignment out;
  out.seed = seed;
  out.ratio = ratio;
  for (auto& [skey, list] : unit_strata) {
    const auto& [source, difficulty, mask] = skey;
    const std::string label = std::string(to_string(source)) + "|" +
                              std::string(to_string(difficulty)) + "|" + std::to_string(mask);
    curriculum_detail::seeded_shuffle(list, seed ^ stable_hash64(label));
    const std::size_t quota = curriculum_detail::train_quota(ratio, list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Part part = i < quota ? Part::Train : Part::Test;
      for (const Problem* m : list[i]->members) {
        out.assignments[m->id] = part;
        auto& c = out.strata[{m->source, m->difficulty, m->language}];
        (part == Part::Train ? c.train : c.test) += 1;
      }
    }
  }
  return out;
}

inline nlohmann::json to_json(const SplitAssignment& s) {
  nlohmann::json assignments = nlohmann::json::object();
  for (const auto& [id, part] : s.assignments) assignments[id] = std::string(to_string(part));
  nlohmann::json strata = nlohmann::json::array();
  for (const auto& [k, c] : s.strata) {
    strata.push_back({{"source", std::string(to_string(k.source))},
                      {"difficulty", std::string(to_string(k.difficulty))},
                      {"language", std::string(to_string(k.language))},
                      {"train", c.train},
                      {"test", c.test}});
  }
  return {{"format", "bimath-split"}, {"version", 1},      {"seed", s.seed},
          {"ratio", s.ratio},         {"assignments", assignments}, {"strata", strata}};
}

inline SplitAssignment split_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "bimath-split") throw FormatError("not a split file");
  SplitAssignment s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ratio = j.at("ratio").get<double>();
  for (const auto& [id, v] : j.at("assignments").items()) {
    const auto part = v.get<std::string>();
    if (part != "train" && part != "test") throw FormatError("bad split part for " + id);
    s.assignments[id] = part == "train" ? Part::Train : Part::Test;
  }
  for (const auto& e : j.at("strata")) {
    s.strata[{parse_source(e.at("source").get<std::string>()),
              parse_difficulty(e.at("difficulty").get<std::string>()),
              parse_language(e.at("language").get<std::string>())}] = {
        e.at("train").get<std::size_t>(), e.at("test").get<std::size_t>()};
  }
  return s;
}

// ---------------------------------------------------------------------------
// Curriculum stages
// ---------------------------------------------------------------------------

enum class CurriculumMode { MonolingualEN, MonolingualHI, BilingualCombined };

inline std::string_view to_string(CurriculumMode m) {
  switch (m) {
    case CurriculumMode::MonolingualEN: return "en";
    case CurriculumMode::MonolingualHI: return "hi";
    case CurriculumMode::BilingualCombined: return "bilingual";
  }
  return "?";
}

inline CurriculumMode parse_curriculum_mode(std::string_view s) {
  const auto v = detail::lower(s);
  if (v == "en") return CurriculumMode::MonolingualEN;
  if (v == "hi") return CurriculumMode::MonolingualHI;
  if (v == "bilingual") return CurriculumMode::BilingualCombined;
  throw FormatError("unknown mode '" + std::string(s) + "' (valid: en, hi, bilingual)");
}

inline constexpr std::string_view kEasyCheckpoint = "SFT_easy";
inline constexpr std::string_view kEasyMediumCheckpoint = "SFT_easy+medium";

struct Stage {
  std::string name;
  std::vector<std::string> train_ids;
  std::string parent_checkpoint;  // empty for the first stage
  std::string checkpoint_name;
  bool operator==(const Stage&) const = default;
};

struct Curriculum {
  std::vector<Stage> stages;
  CurriculumMode mode = CurriculumMode::BilingualCombined;
  bool cumulative = false;
  std::vector<std::string> test_ids;
  std::vector<std::string> held_out_ids;  // Hard problems drawn into the train part
  std::uint64_t seed = 0;
  double ratio = 0.70;
  bool operator==(const Curriculum&) const = default;
};

struct BuildOptions {
  CurriculumMode mode = CurriculumMode::BilingualCombined;
  bool cumulative = false;
  bool drop_unclassified = false;
};

/// Stage 1 trains on Easy train-part problems (checkpoint SFT_easy); stage 2
/// continues from it on Medium train-part problems, plus the Easy ones when
/// cumulative (checkpoint SFT_easy+medium). Hard problems never enter a
/// stage. Items under review that are not approved are excluded.
inline Curriculum build_curriculum(const CorpusManifest& manifest, const SplitAssignment& split,
                                   const BuildOptions& opts = {}) {
  std::vector<const Problem*> scope;
  std::vector<std::string> unclassified;
  for (const auto& p : manifest.records()) {
    if (opts.mode == CurriculumMode::MonolingualEN && p.language != Language::English) continue;
    if (opts.mode == CurriculumMode::MonolingualHI && p.language != Language::Hindi) continue;
    if (p.review_status && *p.review_status != ReviewStatus::Approved) continue;
    if (p.difficulty == Difficulty::Unclassified) {
      if (!opts.drop_unclassified) unclassified.push_back(p.id);
      continue;
    }
    scope.push_back(&p);
  }
  if (!unclassified.empty()) {
    throw ValidationError("Unclassified problems in Easy/Medium strata: " +
                          std::to_string(unclassified.size()) + " (first: " + unclassified.front() +
                          ")");
  }

  Curriculum c;
  c.mode = opts.mode;
  c.cumulative = opts.cumulative;
  c.seed = split.seed;
  c.ratio = split.ratio;
  std::vector<std::string> easy, medium;
  for (const Problem* p : scope) {
    auto it = split.assignments.find(p->id);
    if (it == split.assignments.end())
      throw ValidationError("problem " + p->id + " has no split assignment");
    if (it->second == Part::Test) {
      c.test_ids.push_back(p->id);
      continue;
    }
    switch (p->difficulty) {
      case Difficulty::Easy: easy.push_back(p->id); break;
      case Difficulty::Medium: medium.push_back(p->id); break;
      default: c.held_out_ids.push_back(p->id); break;
    }
  }
  if (easy.empty()) throw ValidationError("empty Easy train stratum");
  if (medium.empty()) throw ValidationError("empty Medium train stratum");

  Stage first{"easy", easy, "", std::string(kEasyCheckpoint)};
  Stage second{opts.cumulative ? "easy+medium" : "medium", {}, std::string(kEasyCheckpoint),
               std::string(kEasyMediumCheckpoint)};
  if (opts.cumulative) second.train_ids = easy;
  second.train_ids.insert(second.train_ids.end(), medium.begin(), medium.end());
  c.stages = {std::move(first), std::move(second)};
  return c;
}

/// Verifies checkpoint lineage, the cumulative/disjoint stage relation and
/// train/test disjointness.
inline void check_curriculum(const Curriculum& c) {
  if (c.stages.size() != 2) throw ValidationError("curriculum must have exactly two stages");
  const auto& s1 = c.stages[0];
  const auto& s2 = c.stages[1];
  if (s1.checkpoint_name != kEasyCheckpoint || !s1.parent_checkpoint.empty())
    throw ValidationError("stage 1 must produce SFT_easy from the base model");
  if (s2.checkpoint_name != kEasyMediumCheckpoint || s2.parent_checkpoint != s1.checkpoint_name)
    throw ValidationError("stage 2 must produce SFT_easy+medium from SFT_easy");
  const std::set<std::string> a(s1.train_ids.begin(), s1.train_ids.end());
  const std::set<std::string> b(s2.train_ids.begin(), s2.train_ids.end());
  if (c.cumulative) {
    if (!std::includes(b.begin(), b.end(), a.begin(), a.end()))
      throw ValidationError("cumulative stage 2 does not contain stage 1");
  } else {
    for (const auto& id : a)
      if (b.contains(id)) throw ValidationError("stages overlap on " + id);
  }
  for (const auto& id : c.test_ids)
    if (a.contains(id) || b.contains(id)) throw ValidationError("test id in training: " + id);
}

inline const Stage& find_stage(const Curriculum& c, std::string_view name) {
  for (const auto& s : c.stages)
    if (s.name == name || s.checkpoint_name == name) return s;
  throw ValidationError("no stage named " + std::string(name));
}

inline nlohmann::json to_json(const Curriculum& c) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : c.stages) {
    stages.push_back({{"name", s.name},
                      {"checkpoint_name", s.checkpoint_name},
                      {"parent_checkpoint", s.parent_checkpoint},
                      {"train_ids", s.train_ids}});
  }
  return {{"format", "bimath-curriculum"},
          {"version", 1},
          {"mode", std::string(to_string(c.mode))},
          {"cumulative", c.cumulative},
          {"seed", c.seed},
          {"ratio", c.ratio},
          {"stages", stages},
          {"test_ids", c.test_ids},
          {"held_out_ids", c.held_out_ids}};
}

inline Curriculum curriculum_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "bimath-curriculum") throw FormatError("not a curriculum file");
  Curriculum c;
  c.mode = parse_curriculum_mode(j.at("mode").get<std::string>());
  c.cumulative = j.at("cumulative").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.ratio = j.at("ratio").get<double>();
  for (const auto& s : j.at("stages")) {
    c.stages.push_back({s.at("name").get<std::string>(),
                        s.at("train_ids").get<std::vector<std::string>>(),
                        s.at("parent_checkpoint").get<std::string>(),
                        s.at("checkpoint_name").get<std::string>()});
  }
  c.test_ids = j.at("test_ids").get<std::vector<std::string>>();
  c.held_out_ids = j.value("held_out_ids", std::vector<std::string>{});
  check_curriculum(c);
  return c;
}

struct ExportSummary {
  std::size_t exported = 0;
  std::size_t skipped = 0;
  std::vector<std::string> skipped_ids;  // problems without solution text
};

/// Line-delimited training file: a header record, then one record per
/// problem holding the rendered fine-tuning prompt. Record order is a seeded
/// shuffle of the stage's ids.
inline ExportSummary export_stage(const Curriculum& c, std::string_view stage_name,
                                  const CorpusManifest& manifest, std::uint64_t seed,
                                  const std::filesystem::path& out_path) {
  check_curriculum(c);
  const Stage& stage = find_stage(c, stage_name);
  std::vector<std::string> ids = stage.train_ids;
  std::sort(ids.begin(), ids.end());
  curriculum_detail::seeded_shuffle(ids, seed ^ stable_hash64(stage.checkpoint_name));

  const PromptTemplate tpl = prompt_template(PromptName::FineTune);
  ExportSummary summary;
  std::string body;
  for (const auto& id : ids) {
    const Problem* p = manifest.find(id);
    if (!p) throw ValidationError("stage id " + id + " not in manifest");
    const auto response = solution_text(*p);
    if (!response || detail::trim(*response).empty()) {
      ++summary.skipped;
      summary.skipped_ids.push_back(id);
      continue;
    }
    const std::string text = render_prompt(tpl, {{"Question", p->question}, {"Response", *response}});
    body += io::dump({{"id", id}, {"language", std::string(to_string(p->language))}, {"text", text}});
    body += '\n';
    ++summary.exported;
  }
  nlohmann::json header = {{"format", "bimath-stage"},
                           {"version", 1},
                           {"stage", stage.name},
                           {"checkpoint", stage.checkpoint_name},
                           {"parent_checkpoint", stage.parent_checkpoint},
                           {"seed", seed},
                           {"count", summary.exported}};
  io::write_file(out_path, io::dump(header) + "\n" + body);
  return summary;
}

}  // namespace bimath

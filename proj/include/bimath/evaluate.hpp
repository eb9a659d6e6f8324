#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "bimath/answer.hpp"
#include "bimath/corpus.hpp"
#include "bimath/errors.hpp"
#include "bimath/io.hpp"
#include "bimath/rational.hpp"
#include "bimath/types.hpp"
#include "bimath/unicode.hpp"

namespace bimath {

enum class Verdict { Correct, Incorrect, Unparseable };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Correct: return "correct";
    case Verdict::Incorrect: return "incorrect";
    case Verdict::Unparseable: return "unparseable";
  }
  return "?";
}

inline Verdict parse_verdict(std::string_view s) {
  if (s == "correct") return Verdict::Correct;
  if (s == "incorrect") return Verdict::Incorrect;
  if (s == "unparseable") return Verdict::Unparseable;
  throw FormatError("unknown verdict '" + std::string(s) + "'");
}

/// Relative tolerance for numeric answers, applied after exact comparison.
inline const Rational kRelativeTolerance{1, 1000000};

/// Exact first; numeric kinds then fall back to |a-b| <= tol * max(|a|,|b|),
/// evaluated exactly so the boundary is inclusive and reproducible.
inline Verdict grade(const std::optional<AnswerValue>& predicted, const AnswerValue& reference) {
  if (!predicted) return Verdict::Unparseable;
  const AnswerValue& p = *predicted;
  if (p.is_numeric() != reference.is_numeric()) return Verdict::Incorrect;
  if (!p.is_numeric()) {
    auto squeeze = [](const std::string& s) {
      std::string out;
      for (char c : s)
        if (!answer_detail::is_space(c)) out += c;
      return out;
    };
    return squeeze(p.expression_text()) == squeeze(reference.expression_text()) ? Verdict::Correct
                                                                                : Verdict::Incorrect;
  }
  const Rational& a = p.value();
  const Rational& b = reference.value();
  if (a == b) return Verdict::Correct;
  const Rational bound = kRelativeTolerance * std::max(abs_value(a), abs_value(b));
  return abs_value(Rational(a - b)) <= bound ? Verdict::Correct : Verdict::Incorrect;
}

struct GradeRecord {
  std::string problem_id;
  std::string model_name;
  std::optional<AnswerValue> predicted;
  AnswerValue reference;
  Verdict verdict = Verdict::Unparseable;
  bool operator==(const GradeRecord&) const = default;
};

inline nlohmann::json to_json(const GradeRecord& g) {
  return {{"problem_id", g.problem_id},
          {"model", g.model_name},
          {"predicted", g.predicted ? to_json_value(*g.predicted) : nlohmann::json(nullptr)},
          {"reference", to_json_value(g.reference)},
          {"verdict", std::string(to_string(g.verdict))}};
}

inline GradeRecord grade_from_json(const nlohmann::json& j) {
  GradeRecord g;
  g.problem_id = j.at("problem_id").get<std::string>();
  g.model_name = j.at("model").get<std::string>();
  if (!j.at("predicted").is_null()) g.predicted = answer_from_json(j.at("predicted"));
  g.reference = answer_from_json(j.at("reference"));
  g.verdict = parse_verdict(j.at("verdict").get<std::string>());
  if ((g.verdict == Verdict::Unparseable) != !g.predicted)
    throw FormatError("grade for " + g.problem_id + ": unparseable iff prediction absent");
  return g;
}

inline std::string render_grades(const std::vector<GradeRecord>& grades) {
  std::string out;
  for (const auto& g : grades) out += io::dump(to_json(g)) + "\n";
  return out;
}

inline std::vector<GradeRecord> load_grades(const std::filesystem::path& path) {
  std::vector<GradeRecord> out;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    try {
      out.push_back(grade_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

/// Undoes the escaping used in prediction files: \n, \t and \\.
inline std::string unescape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char n = s[i + 1];
      if (n == 'n' || n == 't' || n == '\\') {
        out += n == 'n' ? '\n' : n == 't' ? '\t' : '\\';
        ++i;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

/// Grades a prediction file of `problem_id<TAB>model_output` lines.
inline std::vector<GradeRecord> grade_predictions(std::string_view text,
                                                  const CorpusManifest& manifest,
                                                  const std::string& model) {
  std::vector<GradeRecord> out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw FormatError("prediction line " + std::to_string(lineno) + ": missing tab");
    const std::string id(detail::trim(line.substr(0, tab)));
    const Problem* p = manifest.find(id);
    if (!p) throw ValidationError("unknown problem_id " + id + " at line " + std::to_string(lineno));
    auto ref = reference_answer(*p);
    if (!ref) throw ValidationError("problem " + id + " has no reference answer");
    GradeRecord g;
    g.problem_id = id;
    g.model_name = model;
    g.predicted = extract_answer(unescape_field(line.substr(tab + 1)), p->language);
    g.reference = *ref;
    g.verdict = grade(g.predicted, g.reference);
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Accuracy report
// ---------------------------------------------------------------------------

struct ReportColumn {
  Language language;
  Source source;
  Difficulty difficulty;
  auto operator<=>(const ReportColumn&) const = default;
};

struct CellCounts {
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t unparseable = 0;
  std::size_t total() const { return correct + incorrect + unparseable; }
  bool operator==(const CellCounts&) const = default;
};

/// Integer percentage rounded half-up; nullopt for an empty cell.
inline std::optional<int> percent_half_up(std::size_t correct, std::size_t total) {
  if (total == 0) return std::nullopt;
  return static_cast<int>((200 * correct + total) / (2 * total));
}

inline constexpr std::string_view kEmptyCell = "—";

struct EvaluationReport {
  std::vector<std::string> models;
  std::vector<ReportColumn> columns;
  std::map<std::pair<std::string, ReportColumn>, CellCounts> cells;

  CellCounts cell(const std::string& model, const ReportColumn& c) const {
    auto it = cells.find({model, c});
    return it == cells.end() ? CellCounts{} : it->second;
  }
  std::string cell_text(const std::string& model, const ReportColumn& c) const {
    const CellCounts n = cell(model, c);
    const auto pct = percent_half_up(n.correct, n.total());
    return pct ? std::to_string(*pct) + "%" : std::string(kEmptyCell);
  }
};

/// Groups grades by (model, language, source, difficulty). Columns run
/// English then Hindi; each source present for a language gets Easy, Medium
/// and Hard sub-columns, plus Unclassified when such grades exist.
inline EvaluationReport accuracy_report(const std::vector<GradeRecord>& grades,
                                        const CorpusManifest& manifest) {
  EvaluationReport r;
  std::set<std::pair<Language, Source>> groups;
  std::set<std::pair<Language, Source>> with_unclassified;
  for (const auto& g : grades) {
    const Problem* p = manifest.find(g.problem_id);
    if (!p) throw ValidationError("unknown problem_id " + g.problem_id);
    if (std::find(r.models.begin(), r.models.end(), g.model_name) == r.models.end())
      r.models.push_back(g.model_name);
    groups.insert({p->language, p->source});
    if (p->difficulty == Difficulty::Unclassified) with_unclassified.insert({p->language, p->source});
    auto& c = r.cells[{g.model_name, ReportColumn{p->language, p->source, p->difficulty}}];
    switch (g.verdict) {
      case Verdict::Correct: ++c.correct; break;
      case Verdict::Incorrect: ++c.incorrect; break;
      case Verdict::Unparseable: ++c.unparseable; break;
    }
  }
  for (Language lang : {Language::English, Language::Hindi}) {
    for (Source src : kAllSources) {
      if (!groups.contains({lang, src})) continue;
      for (Difficulty d : {Difficulty::Easy, Difficulty::Medium, Difficulty::Hard})
        r.columns.push_back({lang, src, d});
      if (with_unclassified.contains({lang, src}))
        r.columns.push_back({lang, src, Difficulty::Unclassified});
    }
  }
  return r;
}

namespace evaluate_detail {

inline std::size_t display_width(std::string_view s) {
  std::size_t n = 0;
  unicode::for_each_codepoint(s, [&](char32_t, std::size_t, std::size_t) { ++n; });
  return n;
}

inline std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  const std::size_t w = display_width(s);
  if (w < width) out.append(width - w, ' ');
  return out;
}

inline std::string language_label(Language l) {
  return l == Language::English ? "English benchmarks" : "Hindi benchmarks";
}

inline std::string difficulty_label(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Medium: return "Medium";
    case Difficulty::Hard: return "Hard";
    case Difficulty::Unclassified: return "Unclassified";
  }
  return "?";
}

}  // namespace evaluate_detail

/// Plain-text table with three header rows: language group, benchmark and
/// difficulty. Group headers span their sub-columns.
inline std::string render_report_table(const EvaluationReport& r) {
  using namespace evaluate_detail;
  const std::size_t ncol = r.columns.size();
  std::vector<std::size_t> width(ncol);
  for (std::size_t i = 0; i < ncol; ++i) {
    width[i] = difficulty_label(r.columns[i].difficulty).size();
    for (const auto& m : r.models) width[i] = std::max(width[i], display_width(r.cell_text(m, r.columns[i])));
  }

  // Spans: [begin, end) column ranges sharing a label.
  struct Span {
    std::size_t begin, end;
    std::string label;
  };
  auto spans_for = [&](auto key, auto label) {
    std::vector<Span> spans;
    for (std::size_t i = 0; i < ncol; ++i) {
      if (!spans.empty() && key(r.columns[spans.back().begin]) == key(r.columns[i]))
        spans.back().end = i + 1;
      else
        spans.push_back({i, i + 1, label(r.columns[i])});
    }
    return spans;
  };
  auto lang_spans = spans_for([](const ReportColumn& c) { return c.language; },
                              [](const ReportColumn& c) { return language_label(c.language); });
  auto src_spans = spans_for(
      [](const ReportColumn& c) { return std::pair(c.language, c.source); },
      [](const ReportColumn& c) { return std::string(to_string(c.source)); });

  // Widen the last sub-column of a span until its label fits.
  auto fit = [&](const std::vector<Span>& spans) {
    for (const auto& s : spans) {
      std::size_t w = 3 * (s.end - s.begin - 1);
      for (std::size_t i = s.begin; i < s.end; ++i) w += width[i];
      if (w < s.label.size()) width[s.end - 1] += s.label.size() - w;
    }
  };
  fit(src_spans);
  fit(lang_spans);

  std::size_t model_w = std::string_view("Model").size();
  for (const auto& m : r.models) model_w = std::max(model_w, display_width(m));

  auto span_row = [&](const std::string& first, const std::vector<Span>& spans) {
    std::string line = "| " + pad(first, model_w) + " |";
    for (const auto& s : spans) {
      std::size_t w = 3 * (s.end - s.begin - 1);
      for (std::size_t i = s.begin; i < s.end; ++i) w += width[i];
      line += " " + pad(s.label, w) + " |";
    }
    return line + "\n";
  };

  std::string out;
  out += span_row("", lang_spans);
  out += span_row("", src_spans);
  std::string diff_row = "| " + pad("Model", model_w) + " |";
  std::string rule = "|" + std::string(model_w + 2, '-') + "|";
  for (std::size_t i = 0; i < ncol; ++i) {
    diff_row += " " + pad(difficulty_label(r.columns[i].difficulty), width[i]) + " |";
    rule += std::string(width[i] + 2, '-') + "|";
  }
  out += diff_row + "\n" + rule + "\n";
  for (const auto& m : r.models) {
    std::string line = "| " + pad(m, model_w) + " |";
    for (std::size_t i = 0; i < ncol; ++i) line += " " + pad(r.cell_text(m, r.columns[i]), width[i]) + " |";
    out += line + "\n";
  }
  return out;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Machine-readable companion: one row per (model, column).
inline std::string render_report_csv(const EvaluationReport& r) {
  std::string out = "model,language,source,difficulty,correct,incorrect,unparseable,total,percent\n";
  for (const auto& m : r.models) {
    for (const auto& c : r.columns) {
      const CellCounts n = r.cell(m, c);
      const auto pct = percent_half_up(n.correct, n.total());
      out += csv_field(m) + "," + std::string(to_string(c.language)) + "," +
             std::string(to_string(c.source)) + "," + std::string(to_string(c.difficulty)) + "," +
             std::to_string(n.correct) + "," + std::to_string(n.incorrect) + "," +
             std::to_string(n.unparseable) + "," + std::to_string(n.total()) + "," +
             (pct ? std::to_string(*pct) : std::string()) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fleiss' kappa
// ---------------------------------------------------------------------------

struct KappaInput {
  std::vector<std::vector<std::uint64_t>> counts;  // items x categories

  std::size_t items() const { return counts.size(); }
  std::size_t categories() const { return counts.empty() ? 0 : counts.front().size(); }
  std::uint64_t raters() const {
    std::uint64_t n = 0;
    if (!counts.empty())
      for (auto v : counts.front()) n += v;
    return n;
  }

  void validate() const {
    if (counts.empty()) throw ValidationError("kappa input has no items");
    const std::size_t k = categories();
    if (k == 0) throw ValidationError("kappa input has no categories");
    const std::uint64_t n = raters();
    if (n < 2) throw ValidationError("kappa needs at least 2 raters per item");
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i].size() != k)
        throw ValidationError("row " + std::to_string(i + 1) + " has " +
                              std::to_string(counts[i].size()) + " categories, expected " +
                              std::to_string(k));
      std::uint64_t s = 0;
      for (auto v : counts[i]) s += v;
      if (s != n)
        throw ValidationError("row " + std::to_string(i + 1) + " sums to " + std::to_string(s) +
                              ", expected " + std::to_string(n));
    }
  }
};

/// Exact-arithmetic Fleiss' kappa. When every rating falls in one category
/// the chance agreement is 1; that case is defined as 1.0 when observed
/// agreement is also 1.
inline Rational fleiss_kappa_exact(const KappaInput& in) {
  in.validate();
  const std::size_t N = in.items();
  const std::size_t k = in.categories();
  const BigInt n = in.raters();

  Rational p_bar = 0;
  std::vector<BigInt> column(k, 0);
  for (const auto& row : in.counts) {
    BigInt agree = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const BigInt c = row[j];
      agree += c * (c - 1);
      column[j] += c;
    }
    p_bar += Rational(agree, n * (n - 1));
  }
  p_bar /= static_cast<long long>(N);

  const BigInt all = BigInt(static_cast<unsigned long long>(N)) * n;
  Rational p_e = 0;
  for (const auto& c : column) {
    const Rational pj(c, all);
    p_e += pj * pj;
  }
  if (p_e == 1) {
    if (p_bar == 1) return Rational(1);
    throw DomainError("degenerate marginals");
  }
  return (p_bar - p_e) / (1 - p_e);
}

inline double fleiss_kappa(const KappaInput& in) {
  return static_cast<double>(fleiss_kappa_exact(in));
}

/// One item per line, counts separated by whitespace or commas; '#' starts a
/// comment.
inline KappaInput parse_kappa_counts(std::string_view text) {
  KappaInput in;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<std::uint64_t> row;
    std::string tok;
    while (fields >> tok) {
      if (tok.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("kappa counts line " + std::to_string(lineno) + ": bad count '" + tok + "'");
      row.push_back(std::stoull(tok));
    }
    if (!row.empty()) in.counts.push_back(std::move(row));
  }
  return in;
}

}  // namespace bimath

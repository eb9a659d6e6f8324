#include <gtest/gtest.h>

#include <sstream>

#include "bimath/cli.hpp"
#include "test_util.hpp"

using namespace bimath;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_file(e.path());
  return files;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  const auto r = run({"classify", "--in", "a", "--out", "b", "--no-such-flag"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, StageFailureNamesStage) {
  const auto r = run({"ingest", "--format", "gsm8k", "--in", "/nonexistent/x.jsonl", "--out", "/tmp/x"});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_EQ(r.err.rfind("error: stage=ingest ", 0), 0u);
}

TEST(Cli, DemoIsReproducible) {
  const auto a = testutil::scratch("demo-a"), b = testutil::scratch("demo-b");
  const auto ra = run({"demo", "--out", a.string()});
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_NE(ra.out.find("demo ok"), std::string::npos);
  EXPECT_NE(ra.out.find("stage=ingest in=30 out=30"), std::string::npos);
  const auto rb = run({"demo", "--out", b.string()});
  ASSERT_EQ(rb.code, 0) << rb.err;
  const auto ta = tree(a), tb = tree(b);
  EXPECT_EQ(ta, tb);
  EXPECT_TRUE(ta.contains("stages/SFT_easy.jsonl"));
  EXPECT_TRUE(ta.contains("stages/SFT_easy+medium.jsonl"));
  EXPECT_TRUE(ta.contains("eval/report.txt"));
}

TEST(Cli, PipelineStepByStep) {
  const auto dir = testutil::scratch("cli-steps");
  const auto fx = demo::write_fixtures(dir / "fx");
  auto p = [&](const char* n) { return (dir / n).string(); };

  ASSERT_EQ(run({"ingest", "--format", "hawp", "--in", fx.hawp.string(), "--out", p("hawp.jsonl")}).code, 0);
  const auto dec = run({"decompose", "--in", p("hawp.jsonl"), "--out", p("hawp.dec.jsonl")});
  ASSERT_EQ(dec.code, 0) << dec.err;
  EXPECT_NE(dec.out.find("rewritten="), std::string::npos);
  EXPECT_NE(dec.out.find(" skipped="), std::string::npos);

  ASSERT_EQ(run({"ingest", "--format", "gsm8k", "--in", fx.gsm8k.string(), "--out", p("gsm.jsonl")}).code, 0);
  ASSERT_EQ(run({"curriculum", "split", "--in", p("gsm.jsonl"), "--out", p("split.json")}).code, 0);
  const auto build = run({"curriculum", "build", "--in", p("gsm.jsonl"), "--split", p("split.json"), "--out", p("cur.json")});
  EXPECT_EQ(build.code, cli::kExitFailure);
  EXPECT_NE(build.err.find("Unclassified problems in Easy/Medium strata"), std::string::npos);

  const auto kappa_file = dir / "k.txt";
  testutil::write(kappa_file, "3 0\n2 1\n");
  const auto k = run({"kappa", "--counts", kappa_file.string()});
  ASSERT_EQ(k.code, 0) << k.err;
  EXPECT_NE(k.out.find("-0.2"), std::string::npos);
}

TEST(Cli, MergeExpectFlagsDiscrepancy) {
  const auto dir = testutil::scratch("cli-merge");
  save_manifest(testutil::count_corpus(Source::MATH, "math", 664, 3140, 3994), dir / "math.jsonl");
  save_manifest(testutil::count_corpus(Source::IndiMathQA, "imqa", 820, 2470, 4533), dir / "imqa.jsonl");
  save_manifest(testutil::count_corpus(Source::GSM8K, "gsm", 700, 0, 0), dir / "gsm.jsonl");
  const auto r = run({"curriculum", "merge", "--in", (dir / "gsm.jsonl").string(), (dir / "math.jsonl").string(),
                      (dir / "imqa.jsonl").string(), "--out", (dir / "all.jsonl").string(), "--expect",
                      "easy=2184,medium=5470,hard=8527"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("discrepancy Medium computed=5610 expected=5470\n"), std::string::npos);
  EXPECT_NE(r.out.find("total Easy=2184\n"), std::string::npos);
  EXPECT_NE(r.out.find("total Hard=8527\n"), std::string::npos);
  EXPECT_NE(r.out.find("flagged=1"), std::string::npos);
}

TEST(Cli, PipelineConfigRoundTrip) {
  cli::PipelineConfig c;
  c.out_dir = "x";
  c.seed = 7;
  c.ratio = 0.6;
  c.mode = CurriculumMode::MonolingualHI;
  c.cumulative = true;
  c.log_level = "quiet";
  EXPECT_EQ(cli::pipeline_config_from_json(cli::to_json(c)), c);
  c.gsm8k = "/nonexistent/gsm.jsonl";
  EXPECT_THROW(c.validate(), IoError);
}

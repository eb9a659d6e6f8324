#include <gtest/gtest.h>

#include <fstream>

#include "bimath/corpus.hpp"
#include "bimath/digest.hpp"
#include "test_util.hpp"

using namespace bimath;

TEST(Ingest, Gsm8kRecord) {
  const auto dir = testutil::scratch("gsm8k");
  testutil::write(dir / "a.jsonl",
                  R"({"question":"2+2 apples?","answer":"2+2=4\n#### 4","extra":7})" "\n");
  const auto m = ingest_gsm8k(dir / "a.jsonl");
  ASSERT_EQ(m.size(), 1u);
  const auto& p = m.records()[0];
  EXPECT_EQ(p.source, Source::GSM8K);
  EXPECT_EQ(p.language, Language::English);
  EXPECT_EQ(p.difficulty, Difficulty::Unclassified);
  EXPECT_TRUE(p.raw_solution->ends_with("#### 4"));
  EXPECT_EQ(p.extras.at("extra"), 7);
}

TEST(Ingest, Gsm8kEmptyFile) {
  const auto dir = testutil::scratch("gsm8k-empty");
  testutil::write(dir / "a.jsonl", "");
  const auto m = ingest_gsm8k(dir / "a.jsonl");
  EXPECT_TRUE(m.empty());
  EXPECT_EQ(m.checksum(), sha256_hex(""));
}

TEST(Ingest, Gsm8kMissingMarker) {
  const auto dir = testutil::scratch("gsm8k-bad");
  testutil::write(dir / "a.jsonl", "{\"question\":\"q\",\"answer\":\"4\\n#### 4\"}\n"
                                   "{\"question\":\"q\",\"answer\":\"no marker\"}\n");
  try {
    ingest_gsm8k(dir / "a.jsonl");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_STREQ(e.what(), "no final-answer marker at line 2");
  }
}

TEST(Ingest, MathLevels) {
  const auto dir = testutil::scratch("math");
  testutil::write(dir / "a.jsonl",
                  R"({"problem":"p","level":"Level 1","type":"Algebra","solution":"s"})" "\n"
                  R"({"problem":"p","level":"Level 5","type":"Geometry","solution":"s"})" "\n");
  const auto m = ingest_math(dir / "a.jsonl");
  EXPECT_EQ(m.records()[0].math_level, 1);
  EXPECT_EQ(m.records()[1].math_level, 5);
  EXPECT_EQ(m.records()[1].topic, "Geometry");
  testutil::write(dir / "b.jsonl", R"({"problem":"p","level":"Level 9","type":"A","solution":"s"})" "\n");
  EXPECT_THROW(ingest_math(dir / "b.jsonl"), FormatError);
  testutil::write(dir / "c.jsonl", R"({"problem":"p","level":"Hard","type":"A","solution":"s"})" "\n");
  EXPECT_THROW(ingest_math(dir / "c.jsonl"), FormatError);
}

TEST(Ingest, HawpOperations) {
  const auto dir = testutil::scratch("hawp");
  testutil::write(dir / "a.jsonl", R"({"question":"राम के पास 5 आम","operation":"MUL"})" "\n");
  const auto m = ingest_hawp(dir / "a.jsonl");
  EXPECT_EQ(m.records()[0].operation, Operation::Mul);
  EXPECT_EQ(m.records()[0].language, Language::Hindi);
  testutil::write(dir / "b.jsonl", R"({"question":"q","operation":"mod"})" "\n");
  try {
    ingest_hawp(dir / "b.jsonl");
    FAIL();
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("add"), std::string::npos);
    EXPECT_NE(msg.find("div"), std::string::npos);
  }
}

TEST(Ingest, HawpSize) {
  const auto dir = testutil::scratch("hawp-size");
  std::string body;
  for (int i = 0; i < 2336; ++i) body += R"({"question":"प्रश्न )" + std::to_string(i) + R"(","operation":"add"})" "\n";
  testutil::write(dir / "a.jsonl", body);
  EXPECT_EQ(ingest_hawp(dir / "a.jsonl").size(), 2336u);
}

TEST(Ingest, NfcApplied) {
  const auto dir = testutil::scratch("nfc");
  // e + combining acute composes to U+00E9.
  testutil::write(dir / "a.jsonl", "{\"question\":\"cafe\xCC\x81\",\"answer\":\"#### 1\"}\n");
  EXPECT_EQ(ingest_gsm8k(dir / "a.jsonl").records()[0].question, "caf\xC3\xA9");
}

TEST(Ingest, OrderPreserving) {
  const auto dir = testutil::scratch("order");
  std::string body;
  for (int i = 0; i < 20; ++i)
    body += R"({"question":"q)" + std::to_string(i) + R"(","answer":"#### 1"})" "\n";
  testutil::write(dir / "a.jsonl", body);
  const auto m = ingest_gsm8k(dir / "a.jsonl");
  for (int i = 0; i < 20; ++i) EXPECT_EQ(m.records()[i].question, "q" + std::to_string(i));
}

TEST(Manifest, RoundTripRandomized) {
  std::mt19937_64 rng(7);
  const auto dir = testutil::scratch("roundtrip");
  for (int round = 0; round < 25; ++round) {
    CorpusManifest m(testutil::random_problems(rng, 1 + rng() % 30, true), SourceFormat::Derived,
                     "2024-05-01T10:00:00Z");
    save_manifest(m, dir / "m.jsonl");
    EXPECT_EQ(load_manifest(dir / "m.jsonl"), m);
  }
}

TEST(Manifest, ThreeRecordRoundTrip) {
  std::mt19937_64 rng(3);
  CorpusManifest m(testutil::random_problems(rng, 3, false), SourceFormat::Hawp, "2024-01-01T00:00:00Z");
  const auto dir = testutil::scratch("three");
  save_manifest(m, dir / "m.jsonl");
  const auto back = load_manifest(dir / "m.jsonl");
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.records().size(), 3u);
}

TEST(Manifest, FlippedByteIsIntegrityError) {
  std::mt19937_64 rng(11);
  CorpusManifest m(testutil::random_problems(rng, 5, false), SourceFormat::Derived, "2024-01-01T00:00:00Z");
  const auto dir = testutil::scratch("flip");
  save_manifest(m, dir / "m.jsonl");
  std::string data = io::read_file(dir / "m.jsonl");
  const auto pos = data.find("\"question\":\"") + 12;
  data[pos] = data[pos] == 'x' ? 'y' : 'x';
  testutil::write(dir / "m.jsonl", data);
  EXPECT_THROW(load_manifest(dir / "m.jsonl"), IntegrityError);
}

TEST(Manifest, MissingPathIsIoError) {
  EXPECT_THROW(load_manifest("/nonexistent/bimath/manifest.jsonl"), IoError);
}

TEST(Manifest, InvariantsEnforced) {
  Problem a;
  a.id = "a";
  a.question = "q";
  Problem b = a;
  EXPECT_THROW(CorpusManifest({a, b}, SourceFormat::Derived, "x"), ValidationError);  // duplicate id
  b.id = "b";
  a.pair_id = b.pair_id = "p";
  EXPECT_THROW(CorpusManifest({a, b}, SourceFormat::Derived, "x"), ValidationError);  // same language
  b.language = Language::Hindi;
  EXPECT_NO_THROW(CorpusManifest({a, b}, SourceFormat::Derived, "x"));
  b.difficulty = Difficulty::Hard;
  EXPECT_THROW(CorpusManifest({a, b}, SourceFormat::Derived, "x"), ValidationError);
  Problem m;
  m.id = "m";
  m.question = "q";
  m.source = Source::MATH;
  EXPECT_THROW(CorpusManifest({m}, SourceFormat::Derived, "x"), ValidationError);  // no level
  m.math_level = 3;
  EXPECT_NO_THROW(CorpusManifest({m}, SourceFormat::Derived, "x"));
  a.pair_id.clear();
  a.math_level = 2;
  EXPECT_THROW(CorpusManifest({a}, SourceFormat::Derived, "x"), ValidationError);
}

TEST(Manifest, CreatedAtFollowsFileTime) {
  const auto dir = testutil::scratch("mtime");
  testutil::write(dir / "a.jsonl", R"({"question":"q","answer":"#### 1"})" "\n");
  const auto t = std::chrono::sys_seconds(std::chrono::seconds(1704067200));
  std::filesystem::last_write_time(dir / "a.jsonl", std::chrono::file_clock::from_sys(t));
  EXPECT_EQ(ingest_gsm8k(dir / "a.jsonl").created_at(), "2024-01-01T00:00:00Z");
}

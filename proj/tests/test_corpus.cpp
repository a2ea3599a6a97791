#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "assaykg/corpus.hpp"
#include "assaykg/error.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace assaykg;

namespace {

CorpusParseResult parse(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

}  // namespace

TEST(ParseCorpus, WellFormedLines) {
  auto r = parse(
      R"({"id":"a","text":"t1","statements":[{"property":"p","value":"v"}]})"
      "\n\n"
      R"({"id":"b","text":"t2","statements":[]})"
      "\n"
      R"({"id":"c","text":"t3","statements":[],"assay_type":"Kinase Activity","assay_format":"cell-based format"})"
      "\n");
  EXPECT_EQ(r.assays.size(), 3u);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(ParseCorpus, EmptyTextSkippedWithLineNumber) {
  auto r = parse(
      R"({"id":"a","text":"t1","statements":[]})"
      "\n"
      R"({"id":"b","text":"","statements":[]})"
      "\n"
      R"({"id":"c","text":"t3","statements":[]})"
      "\n");
  ASSERT_EQ(r.assays.size(), 2u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].line, 2u);
}

TEST(ParseCorpus, DuplicatePairCollapsed) {
  auto r = parse(
      R"({"id":"a","text":"t","statements":[{"property":"has assay format","value":"tissue-based format"},{"property":"Has Assay Format","value":"tissue-based  format"}]})");
  ASSERT_EQ(r.assays.size(), 1u);
  EXPECT_EQ(r.assays[0].statements.size(), 1u);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(ParseCorpus, MalformedLinesNeverAbort) {
  auto r = parse(
      "not json\n"
      "[1,2]\n"
      R"({"id":"a","text":"t","statements":[{"property":"p"}],"extra":1})"
      "\n"
      R"({"id":"b","text":"t","statements":[{"property":"p","value":"v","value_uri":"bad uri"}]})"
      "\n"
      R"({"id":"a","text":"again","statements":[]})"
      "\n"
      R"({"id":"c","text":"t","statements":[],"assay_type":"made up type"})"
      "\n");
  ASSERT_EQ(r.assays.size(), 3u);
  EXPECT_EQ(r.assays[0].id, "a");
  EXPECT_TRUE(r.assays[0].statements.empty());
  EXPECT_TRUE(r.assays[1].statements.empty());
  EXPECT_EQ(r.assays[2].assay_type, "made up type");
  std::set<std::size_t> lines;
  for (const auto& w : r.warnings) lines.insert(w.line);
  EXPECT_EQ(lines, (std::set<std::size_t>{1, 2, 3, 4, 5, 6}));
}

TEST(ParseCorpus, UnreadableSource) {
  EXPECT_THROW(parse_corpus_file("/nonexistent/corpus.jsonl"), Error);
}

TEST(Vocabulary, TypeListIsSeeded) {
  const auto& v = default_type_vocabulary();
  EXPECT_EQ(v.size(), 41u);
  EXPECT_TRUE(v.contains("protein-protein interaction"));
  EXPECT_TRUE(v.contains("Kinase Activity"));
  EXPECT_TRUE(v.contains("viability"));
  for (const auto& e : v.entries()) EXPECT_EQ(normalize_label(e), e);
}

TEST(Stats, ShippedFixture) {
  auto r = parse_corpus_file(testgen::fixture("three_assays.jsonl"));
  ASSERT_EQ(r.assays.size(), 3u);
  auto s = compute_stats(r.assays);
  EXPECT_EQ(s.statements_min, 5u);
  EXPECT_EQ(s.statements_max, 92u);
  EXPECT_DOUBLE_EQ(s.statements_mean, 50.0);
  EXPECT_EQ(s.distinct_types, 3u);
  EXPECT_EQ(s.distinct_formats, 2u);
}

TEST(Stats, EmptyCorpus) {
  auto s = compute_stats({});
  EXPECT_EQ(s.assay_count, 0u);
  EXPECT_FALSE(s.statements_min);
  EXPECT_FALSE(s.statements_max);
}

TEST(Stats, MatchesBruteForceRecount) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto corpus = testgen::random_corpus(rng, 50);
    auto s = compute_stats(corpus);
    EXPECT_EQ(s, oracle::recount(corpus));
    EXPECT_LE(static_cast<double>(*s.statements_min), s.statements_mean);
    EXPECT_LE(s.statements_mean, static_cast<double>(*s.statements_max));
  }
}

TEST(RoundTrip, ParseSerializeParse) {
  auto first = parse_corpus_file(testgen::fixture("three_assays.jsonl"));
  std::istringstream in(serialize_corpus(first.assays));
  auto second = parse_corpus(in);
  EXPECT_EQ(first.assays, second.assays);
  EXPECT_EQ(serialize_corpus(first.assays), serialize_corpus(second.assays));
}

TEST(ToGraph, CountsSharingAndIdempotence) {
  Graph g;
  AnnotatedAssay a{"x", std::nullopt, "text", {}, std::nullopt, std::nullopt};
  for (int i = 0; i < 8; ++i) {
    a.statements.push_back({"property " + std::to_string(i), "value", std::nullopt, std::nullopt});
  }
  auto [paper, contribution] = to_graph(a, g);
  EXPECT_EQ(g.statements_of(contribution).size(), 8u);
  EXPECT_EQ(g.find_paper(paper)->title, "x");
  auto again = to_graph(a, g);
  EXPECT_EQ(again.second, contribution);
  EXPECT_EQ(g.statement_count(), 8u);

  AnnotatedAssay empty{"y", std::string("Title"), "text", {}, std::nullopt, std::nullopt};
  auto [p2, c2] = to_graph(empty, g);
  EXPECT_TRUE(g.statements_of(c2).empty());
  EXPECT_EQ(g.find_paper(p2)->title, "Title");

  Graph shared;
  AnnotatedAssay s1{"s1", {}, "t", {{"has assay method", "reporter gene", {}, {}}}, {}, {}};
  AnnotatedAssay s2{"s2", {}, "t", {{"has assay method", "Reporter Gene", {}, {}}}, {}, {}};
  to_graph(s1, shared);
  to_graph(s2, shared);
  EXPECT_EQ(shared.resources().size(), 1u);
  EXPECT_EQ(shared.statement_count(), 2u);
}

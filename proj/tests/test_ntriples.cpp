#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "assaykg/corpus.hpp"
#include "assaykg/error.hpp"
#include "assaykg/ntriples.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace assaykg;

namespace {

const std::string kBase{kDefaultBaseUri};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ImportReport import_text(Graph& g, const std::string& text, bool partial = false) {
  std::istringstream in(text);
  ImportOptions o;
  o.partial_apply = partial;
  return import_ntriples(g, in, kBase, o);
}

}  // namespace

TEST(Export, OntologyUrisVerbatim) {
  Graph g;
  auto c = g.create_contribution(g.create_paper("T"), "c");
  g.add_statement(c, "has assay format", "http://www.bioassayontology.org/bao#BAO_0000205",
                  "tissue-based format", "http://www.bioassayontology.org/bao#BAO_0000221");
  auto lines = export_ntriples_lines(g, kBase);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0],
            "<http://example.org/assaykg/resource/C1> "
            "<http://www.bioassayontology.org/bao#BAO_0000205> "
            "<http://www.bioassayontology.org/bao#BAO_0000221> .");
}

TEST(Export, MintsAndEscapes) {
  Graph g;
  auto c = g.create_contribution(g.create_paper("T"), "c");
  g.add_literal_statement(c, "has note", {}, Literal::make("say \"hi\"\\\n", LiteralType::kString));
  g.add_literal_statement(c, "has count", {}, Literal::make("12", LiteralType::kInteger));
  g.add_statement(c, "has target", {}, "kinase", {});
  auto lines = export_ntriples_lines(g, kBase);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end()));
  bool escaped = false;
  for (const auto& l : lines) {
    EXPECT_TRUE(oracle::valid_ntriples_line(l)) << l;
    if (l.find(R"("say \"hi\"\\\n")") != std::string::npos) escaped = true;
  }
  EXPECT_TRUE(escaped);
  EXPECT_NE(export_ntriples(g, kBase).find("^^<http://www.w3.org/2001/XMLSchema#integer>"),
            std::string::npos);
  EXPECT_EQ(export_ntriples(Graph{}, kBase), "");
  EXPECT_THROW(export_ntriples(g, "http://example.org/no-slash"), Error);
  EXPECT_THROW(export_ntriples(g, "relative/"), Error);
}

TEST(ParseLine, GrammarCases) {
  auto t = parse_ntriples_line(
      R"(<http://a/s> <http://a/p> "café \"x\""@en-GB .)", 1);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->object.value, "caf\xc3\xa9 \"x\"");
  EXPECT_EQ(t->object.language, "en-GB");
  EXPECT_FALSE(parse_ntriples_line("   # comment", 2));
  EXPECT_FALSE(parse_ntriples_line("", 3));
  EXPECT_THROW(parse_ntriples_line("<http://a/s> <http://a/p> .", 4), ParseError);
  EXPECT_THROW(parse_ntriples_line("<http://a/s> <http://a/p> <http://a/o>", 5), ParseError);
  EXPECT_THROW(parse_ntriples_line(R"(<http://a/s> <http://a/p> "open .)", 6), ParseError);
}

TEST(Import, IdempotentReimport) {
  Graph g;
  for (const auto& a : parse_corpus_file(testgen::fixture("three_assays.jsonl")).assays) {
    to_graph(a, g);
  }
  const auto text = export_ntriples(g, kBase);
  auto first = import_text(g, text);
  EXPECT_EQ(first.new_statements, 0u);
  EXPECT_EQ(first.duplicate_statements, g.statement_count());
}

TEST(Import, UnknownPredicateCreatesNode) {
  Graph g;
  auto c = g.create_contribution(g.create_paper("T"), "c");
  (void)c;
  auto r = import_text(g, "<http://example.org/assaykg/resource/C1> <http://x.org/newprop> \"v\" .\n");
  EXPECT_EQ(r.new_statements, 1u);
  ASSERT_EQ(r.created_predicates.size(), 1u);
  EXPECT_EQ(g.find_predicate(r.created_predicates[0])->uri, "http://x.org/newprop");
}

TEST(Import, TransactionalAndPartialPolicies) {
  const std::string text =
      "<http://x.org/s1> <http://x.org/p> \"a\" .\n"
      "<http://x.org/s2> <http://x.org/p> \"b\" .\n"
      "<http://x.org/s3> <http://x.org/p> broken .\n"
      "<http://x.org/s4> <http://x.org/p> \"d\" .\n";
  Graph strict;
  try {
    import_text(strict, text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_EQ(strict.statement_count(), 0u);

  Graph partial;
  auto r = import_text(partial, text, true);
  EXPECT_EQ(r.error_line, 3u);
  EXPECT_EQ(partial.statement_count(), 2u);
}

TEST(Import, BlankNodesRejected) {
  Graph g;
  EXPECT_THROW(import_text(g, "_:b1 <http://x.org/p> \"a\" .\n"), ParseError);
}

TEST(RoundTrip, ExportImportExportFixedPoint) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 60; ++round) {
    auto rg = testgen::random_graph(rng, 6, 8);
    if (round % 3 == 0) {
      rg.graph.add_literal_statement(rg.contributions[0], "note \"q\"", {},
                                     Literal::make("line\nbreak \\ tab\t", LiteralType::kString));
      rg.graph.add_literal_statement(rg.contributions[0], "ratio", {},
                                     Literal::make("-0.25", LiteralType::kDecimal));
    }
    const auto first = export_ntriples(rg.graph, kBase);
    for (const auto& l : lines_of(first)) EXPECT_TRUE(oracle::valid_ntriples_line(l)) << l;
    Graph fresh;
    import_text(fresh, first);
    EXPECT_EQ(export_ntriples(fresh, kBase), first);
    // Importing into the source graph adds nothing.
    auto again = import_text(rg.graph, first);
    EXPECT_EQ(again.new_statements, 0u);
    EXPECT_EQ(export_ntriples(rg.graph, kBase), first);
  }
}

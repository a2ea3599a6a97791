#include <gtest/gtest.h>

#include <sstream>

#include "assaykg/curation.hpp"
#include "assaykg/error.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace assaykg;
using testgen::label;

namespace {

std::int64_t fake_now = 1000;
std::int64_t fake_clock() { return fake_now++; }

Prediction pred(const std::string& p, const std::string& v, double score, bool accepted = true) {
  return {label(p, v), score, accepted};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIoFailure;
}

std::set<std::string> contribution_keys(const Graph& g, const NodeId& c) {
  return oracle::statement_keys(g, c);
}

}  // namespace

TEST(Open, AcceptedOnlyScoreOrder) {
  auto s = CurationSession::open("S1", "text",
                                 {pred("a", "1", 0.9), pred("b", "2", 0.4), pred("c", "3", 0.7),
                                  pred("d", "4", 0.95, false)},
                                 fake_clock);
  ASSERT_EQ(s.proposals().size(), 3u);
  EXPECT_EQ(s.proposals()[0].score, 0.9);
  EXPECT_EQ(s.proposals()[1].score, 0.7);
  EXPECT_EQ(s.proposals()[2].score, 0.4);
  EXPECT_EQ(s.proposals()[0].proposal_id, "p1");
  EXPECT_EQ(s.pending_count(), 3u);
  EXPECT_EQ(s.state(), SessionState::kOpen);
  EXPECT_TRUE(CurationSession::open("S2", "t", {}, fake_clock).proposals().empty());
  EXPECT_EQ(code_of([] { CurationSession::open("S3", "  ", {}, fake_clock); }),
            ErrorCode::kEmptyText);
}

TEST(Decide, OverwriteAndErrors) {
  auto s = CurationSession::open("S1", "t", {pred("a", "1", 0.9)}, fake_clock);
  s.decide("p1", Decision::kAccepted);
  EXPECT_EQ(s.find_proposal("p1")->decision, Decision::kAccepted);
  s.decide("p1", Decision::kRejected);
  EXPECT_EQ(s.find_proposal("p1")->decision, Decision::kRejected);
  EXPECT_EQ(code_of([&] { s.decide("p9", Decision::kAccepted); }), ErrorCode::kUnknownProposal);
  Graph g;
  s.finalize(g, "Paper");
  EXPECT_EQ(code_of([&] { s.decide("p1", Decision::kAccepted); }), ErrorCode::kSessionClosed);
  EXPECT_EQ(code_of([&] { s.finalize(g, "Paper"); }), ErrorCode::kSessionClosed);
  EXPECT_EQ(code_of([&] { s.add_manual("x", "y"); }), ErrorCode::kSessionClosed);
}

TEST(AddManual, Rules) {
  auto s = CurationSession::open("S1", "t", {pred("has assay method", "reporter gene", 0.9)},
                                 fake_clock);
  s.decide("p1", Decision::kAccepted);
  s.add_manual("has significant direction", "increase");
  EXPECT_EQ(code_of([&] { s.add_manual("Has Assay Method", "reporter gene"); }),
            ErrorCode::kDuplicateStatementInSession);
  EXPECT_EQ(code_of([&] { s.add_manual("has significant direction", "Increase"); }),
            ErrorCode::kDuplicateStatementInSession);
  EXPECT_EQ(code_of([&] { s.add_manual("", "x"); }), ErrorCode::kEmptyLabel);
}

TEST(Finalize, CountRuleAndPending) {
  auto s = CurationSession::open(
      "S1", "t", {pred("a", "1", 0.9), pred("b", "2", 0.8), pred("c", "3", 0.7)}, fake_clock);
  Graph g;
  s.decide("p1", Decision::kAccepted);
  EXPECT_EQ(code_of([&] { s.finalize(g, "P"); }), ErrorCode::kPendingProposalsRemain);
  EXPECT_EQ(g.statement_count(), 0u);
  EXPECT_TRUE(g.papers().empty());
  s.decide("p2", Decision::kAccepted);
  s.decide("p3", Decision::kRejected);
  s.add_manual("d", "4");
  EXPECT_EQ(code_of([&] { s.finalize(g, " "); }), ErrorCode::kEmptyTitle);
  auto r = s.finalize(g, "P");
  EXPECT_EQ(r.statement_count, 3u);
  EXPECT_EQ(g.statements_of(r.contribution).size(), 3u);
  EXPECT_EQ(s.state(), SessionState::kFinalized);
  EXPECT_EQ(s.contribution(), r.contribution);
}

TEST(Finalize, AllRejectedWarns) {
  auto s = CurationSession::open("S1", "t", {pred("a", "1", 0.9)}, fake_clock);
  s.decide("p1", Decision::kRejected);
  Graph g;
  auto r = s.finalize(g, "P");
  EXPECT_EQ(r.statement_count, 0u);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(History, AppendOnlyTimestamped) {
  fake_now = 5000;
  auto s = CurationSession::open("S1", "t", {pred("a", "1", 0.9)}, fake_clock);
  s.decide("p1", Decision::kAccepted);
  s.add_manual("b", "2");
  s.discard();
  const auto& h = s.history();
  ASSERT_EQ(h.size(), 4u);
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(h[i].sequence, i + 1);
    EXPECT_EQ(h[i].timestamp_ms, 5000 + static_cast<std::int64_t>(i));
  }
  EXPECT_EQ(h[1].kind, EventKind::kDecided);
  EXPECT_EQ(h[1].decision, Decision::kAccepted);
  EXPECT_EQ(h[3].kind, EventKind::kDiscarded);
  EXPECT_EQ(code_of([&] { s.decide("p1", Decision::kRejected); }), ErrorCode::kSessionClosed);
}

TEST(Conservation, RandomSessions) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 300; ++round) {
    auto preds = testgen::random_predictions(rng, 8);
    auto s = CurationSession::open("S", "t", preds, fake_clock);
    std::map<std::string, Decision> decided;
    std::set<std::string> manual;
    for (int step = 0; step < 12; ++step) {
      if (!s.proposals().empty() && rng() % 2 == 0) {
        const auto& p = s.proposals()[rng() % s.proposals().size()];
        const auto d = rng() % 2 ? Decision::kAccepted : Decision::kRejected;
        s.decide(p.proposal_id, d);
        decided[p.label.key()] = d;
      } else {
        auto l = label("has property " + std::to_string(rng() % 5), "value " + std::to_string(rng() % 6));
        bool dup = manual.count(l.key()) > 0;
        for (const auto& p : s.proposals()) {
          if (p.label == l && p.decision == Decision::kAccepted) dup = true;
        }
        try {
          s.add_manual(l.property(), l.value());
          EXPECT_FALSE(dup);
          manual.insert(l.key());
        } catch (const Error& e) {
          EXPECT_TRUE(dup);
          EXPECT_EQ(e.code(), ErrorCode::kDuplicateStatementInSession);
        }
      }
    }
    Graph g;
    if (s.pending_count() > 0) {
      EXPECT_THROW(s.finalize(g, "P"), Error);
      EXPECT_EQ(g.statement_count(), 0u);
      for (const auto& p : s.proposals()) {
        if (p.decision == Decision::kPending) {
          s.decide(p.proposal_id, Decision::kRejected);
          decided[p.label.key()] = Decision::kRejected;
        }
      }
    }
    auto r = s.finalize(g, "P");
    std::set<std::string> expected = manual;
    for (const auto& [k, d] : decided) {
      if (d == Decision::kAccepted) expected.insert(k);
    }
    EXPECT_EQ(contribution_keys(g, r.contribution), expected);
    EXPECT_EQ(r.statement_count, expected.size());
  }
}

TEST(DecisionsFile, Parse) {
  std::istringstream in(
      R"({"proposal_id":"p1","decision":"accept"})"
      "\n"
      R"({"proposal_id":"p2","decision":"rejected"})"
      "\n\n"
      R"({"property":"has target","value":"kinase"})"
      "\n"
      R"({"finalize":true,"paper_title":"T"})"
      "\n");
  auto cmds = parse_decisions(in);
  ASSERT_EQ(cmds.size(), 4u);
  EXPECT_EQ(cmds[0].decision, Decision::kAccepted);
  EXPECT_EQ(cmds[1].decision, Decision::kRejected);
  EXPECT_EQ(cmds[2].kind, DecisionCommand::Kind::kManual);
  EXPECT_EQ(cmds[3].paper_title, "T");

  std::istringstream bad(R"({"proposal_id":"p1","decision":"accept"})"
                         "\n"
                         R"({"proposal_id":"p1","decision":"maybe"})"
                         "\n");
  try {
    parse_decisions(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

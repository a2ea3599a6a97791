#include <gtest/gtest.h>

#include <memory>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "assaykg/compare.hpp"
#include "assaykg/error.hpp"
#include "assaykg/service.hpp"
#include "assaykg/snapshot.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace assaykg;
using json = nlohmann::json;

namespace {

struct Reply {
  int status;
  json body;
};

std::int64_t fixed_clock() { return 1700000000000; }

Reply call(Service& s, const std::string& method, const std::string& path,
           const json& body = nullptr, const QueryParams& query = {}) {
  auto r = s.handle(method, path, query, body.is_null() ? "" : body.dump());
  return {r.status, json::parse(r.body)};
}

std::string read_fixture(const std::string& name) { return read_file(testgen::fixture(name)); }

std::unique_ptr<Service> trained_service() {
  auto owned = std::make_unique<Service>(Store{}, std::string{}, fixed_clock);
  auto& s = *owned;
  auto ingest = s.handle("POST", "/api/corpus", {}, read_fixture("six_assays.jsonl"));
  EXPECT_EQ(ingest.status, 200);
  EXPECT_EQ(call(s, "POST", "/api/model/train", {{"calibration_split", 0.0}}).status, 201);
  return owned;
}

}  // namespace

TEST(ErrorMapping, OnePairPerCode) {
  std::set<std::pair<int, std::string>> pairs;
  for (int c = 0; c <= static_cast<int>(ErrorCode::kModelUnavailable); ++c) {
    const auto code = static_cast<ErrorCode>(c);
    auto e = to_api_error(Error(code, "m"));
    EXPECT_GE(e.status, 400);
    EXPECT_LT(e.status, 600);
    EXPECT_EQ(e.code, error_code_name(code));
    EXPECT_TRUE(pairs.insert({e.status, e.code}).second);
  }
  EXPECT_EQ(http_status(ErrorCode::kEmptyText), 400);
  EXPECT_EQ(http_status(ErrorCode::kUnknownAssay), 404);
  EXPECT_EQ(http_status(ErrorCode::kSessionClosed), 409);
  EXPECT_EQ(http_status(ErrorCode::kChecksumMismatch), 500);
}

TEST(Assays, SubmitRules) {
  Service s({}, {}, fixed_clock);
  auto ok = call(s, "POST", "/api/assays", {{"title", "T"}, {"text", "some assay"}});
  EXPECT_EQ(ok.status, 201);
  auto again = call(s, "POST", "/api/assays", {{"text", "some assay"}});
  EXPECT_EQ(again.status, 201);
  EXPECT_NE(ok.body["assay_id"], again.body["assay_id"]);
  auto empty = call(s, "POST", "/api/assays", {{"text", ""}});
  EXPECT_EQ(empty.status, 400);
  EXPECT_EQ(empty.body["error"]["code"], "EmptyText");
  EXPECT_EQ(s.handle("POST", "/api/assays", {}, "{not json").status, 400);
  EXPECT_EQ(call(s, "GET", "/api/nowhere").status, 404);
}

TEST(Semantify, ModelAndIds) {
  Service bare({}, {}, fixed_clock);
  const auto id = call(bare, "POST", "/api/assays", {{"text", "luciferase"}}).body["assay_id"];
  auto no_model = call(bare, "POST", "/api/assays/" + id.get<std::string>() + "/semantify");
  EXPECT_EQ(no_model.status, 409);
  EXPECT_EQ(no_model.body["error"]["code"], "ModelUnavailable");

  auto owned = trained_service();
  auto& s = *owned;
  EXPECT_EQ(call(s, "POST", "/api/assays/A99/semantify").status, 404);
  const auto aid = call(s, "POST", "/api/assays", {{"text", "luciferase reporter luminescence"}})
                       .body["assay_id"].get<std::string>();
  auto r = call(s, "POST", "/api/assays/" + aid + "/semantify", {{"top_k", 4}});
  ASSERT_EQ(r.status, 201);
  const auto& props = r.body["proposals"];
  ASSERT_FALSE(props.empty());
  for (std::size_t i = 1; i < props.size(); ++i) {
    EXPECT_GE(props[i - 1]["score"].get<double>(), props[i]["score"].get<double>());
  }
  for (const auto& p : props) {
    for (const char* key : {"proposal_id", "property", "value", "score", "accepted_by_threshold"}) {
      EXPECT_TRUE(p.contains(key));
    }
  }
}

TEST(Sessions, FullFlowAndConflicts) {
  auto owned = trained_service();
  auto& s = *owned;
  const auto aid = call(s, "POST", "/api/assays", {{"text", "luciferase reporter luminescence binding"}})
                       .body["assay_id"].get<std::string>();
  auto sem = call(s, "POST", "/api/assays/" + aid + "/semantify", {{"top_k", 4}});
  const auto sid = sem.body["session_id"].get<std::string>();
  const auto base = "/api/sessions/" + sid;
  const auto& props = sem.body["proposals"];
  ASSERT_GE(props.size(), 2u);

  EXPECT_EQ(call(s, "PATCH", base + "/proposals/p1", {{"decision", "maybe"}}).status, 400);
  EXPECT_EQ(call(s, "PATCH", base + "/proposals/p99", {{"decision", "accepted"}}).status, 404);
  auto accepted = call(s, "PATCH", base + "/proposals/p1", {{"decision", "accepted"}});
  EXPECT_EQ(accepted.status, 200);
  EXPECT_EQ(accepted.body["decision"], "accepted");

  auto pending = call(s, "POST", base + "/finalize", {{"paper_title", "T"}});
  EXPECT_EQ(pending.status, 409);
  EXPECT_EQ(pending.body["error"]["code"], "PendingProposalsRemain");

  std::set<std::string> expected;
  expected.insert(props[0]["property"].get<std::string>() + " :: " + props[0]["value"].get<std::string>());
  for (std::size_t i = 1; i < props.size(); ++i) {
    EXPECT_EQ(call(s, "PATCH", base + "/proposals/" + props[i]["proposal_id"].get<std::string>(),
                   {{"decision", "rejected"}})
                  .status,
              200);
  }
  EXPECT_EQ(call(s, "POST", base + "/statements", {{"property", "has note"}, {"value", "manual"}}).status, 201);
  expected.insert("has note :: manual");
  auto dup = call(s, "POST", base + "/statements", {{"property", "Has Note"}, {"value", "manual"}});
  EXPECT_EQ(dup.status, 409);
  EXPECT_EQ(dup.body["error"]["code"], "DuplicateStatementInSession");

  auto fin = call(s, "POST", base + "/finalize", {{"paper_title", "Curated"}});
  ASSERT_EQ(fin.status, 201);
  EXPECT_EQ(fin.body["statement_count"], expected.size());
  const auto store = s.copy_store();
  auto cid = *NodeId::parse(fin.body["contribution_id"].get<std::string>());
  EXPECT_EQ(oracle::statement_keys(store.graph, cid), expected);

  auto closed = call(s, "PATCH", base + "/proposals/p1", {{"decision", "rejected"}});
  EXPECT_EQ(closed.status, 409);
  EXPECT_EQ(closed.body["error"]["code"], "SessionClosed");
  EXPECT_EQ(call(s, "GET", base).body["state"], "finalized");
  EXPECT_EQ(call(s, "GET", "/api/assays/" + aid).body["contribution_id"], fin.body["contribution_id"]);
}

TEST(Queries, ComparisonSimilarStats) {
  Service s({}, {}, fixed_clock);
  s.handle("POST", "/api/corpus", {}, read_fixture("three_assays.jsonl"));
  auto cmp = s.handle("GET", "/api/comparisons", {{"contributions", "AID-1001,AID-1002,C3"}}, "");
  ASSERT_EQ(cmp.status, 200);
  const auto store = s.copy_store();
  std::vector<NodeId> ids;
  for (const auto& [id, c] : store.graph.contributions()) ids.push_back(id);
  EXPECT_EQ(cmp.body, render_json(build_comparison(store.graph, ids)));

  auto unknown = s.handle("GET", "/api/comparisons", {{"contributions", "C1,C42"}}, "");
  EXPECT_EQ(unknown.status, 404);
  EXPECT_NE(unknown.body.find("C42"), std::string::npos);

  auto csv = s.handle("GET", "/api/comparisons", {{"contributions", "C1,C2,C3"}, {"format", "csv"}}, "");
  EXPECT_EQ(csv.body.substr(0, 18), "property,C1,C2,C3\r");

  EXPECT_EQ(s.handle("GET", "/api/assays/C1/similar", {{"k", "0"}}, "").status, 400);
  EXPECT_EQ(s.handle("GET", "/api/assays/C1/similar", {{"k", "x"}}, "").status, 400);
  auto sim = call(s, "GET", "/api/assays/AID-1001/similar", nullptr, {{"k", "5"}});
  ASSERT_EQ(sim.status, 200);
  auto want = oracle::exhaustive_similar(store.graph, NodeId(NodeKind::kContribution, 1), 5);
  ASSERT_EQ(sim.body["results"].size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(sim.body["results"][i]["contribution_id"], want[i].contribution.str());
  }

  auto stats = call(s, "GET", "/api/stats");
  EXPECT_EQ(stats.body["statements_min"], 5);
  EXPECT_EQ(stats.body["statements_max"], 92);
  EXPECT_EQ(stats.body["statements_mean"].get<double>(), 50.0);
}

TEST(Concurrency, InterleavedSessions) {
  auto owned = trained_service();
  auto& s = *owned;
  const std::vector<std::string> texts = {"luciferase reporter", "binding fluorescence polarization",
                                          "viability glo luminescence", "alpha screen binding"};
  constexpr int kThreads = 8;
  std::vector<std::string> contributions(kThreads);
  std::vector<std::set<std::string>> expected(kThreads);
  std::vector<std::thread> workers;
  for (int t = 0; t < kThreads; ++t) {
    workers.emplace_back([&, t] {
      for (int rep = 0; rep < 5; ++rep) {
        auto aid = call(s, "POST", "/api/assays", {{"text", texts[t % texts.size()]}})
                       .body["assay_id"].get<std::string>();
        auto sem = call(s, "POST", "/api/assays/" + aid + "/semantify", {{"top_k", 3}});
        const auto sid = sem.body["session_id"].get<std::string>();
        std::set<std::string> keep;
        for (const auto& p : sem.body["proposals"]) {
          const bool accept = p["proposal_id"] != "p2";
          call(s, "PATCH", "/api/sessions/" + sid + "/proposals/" + p["proposal_id"].get<std::string>(),
               {{"decision", accept ? "accepted" : "rejected"}});
          if (accept) keep.insert(p["property"].get<std::string>() + " :: " + p["value"].get<std::string>());
        }
        const auto manual = "thread " + std::to_string(t);
        call(s, "POST", "/api/sessions/" + sid + "/statements", {{"property", "has worker"}, {"value", manual}});
        keep.insert("has worker :: " + manual);
        auto fin = call(s, "POST", "/api/sessions/" + sid + "/finalize", {{"paper_title", sid}});
        contributions[t] = fin.body["contribution_id"].get<std::string>();
        expected[t] = keep;
      }
    });
  }
  for (auto& w : workers) w.join();
  const auto store = s.copy_store();
  EXPECT_EQ(store.sessions.size(), static_cast<std::size_t>(kThreads * 5));
  for (int t = 0; t < kThreads; ++t) {
    EXPECT_EQ(oracle::statement_keys(store.graph, *NodeId::parse(contributions[t])), expected[t]);
  }
  EXPECT_TRUE(store.graph.check_integrity());
}

TEST(Persistence, FlushWritesSnapshotAndModel) {
  const auto dir = testgen::temp_dir("svc");
  const auto path = dir + "/store.json";
  {
    Service s({}, path, fixed_clock);
    EXPECT_FALSE(s.flush());
    s.handle("POST", "/api/corpus", {}, read_fixture("six_assays.jsonl"));
    call(s, "POST", "/api/model/train", {{"calibration_split", 0.0}});
    EXPECT_TRUE(s.dirty());
    EXPECT_TRUE(s.flush());
    EXPECT_FALSE(s.flush());
  }
  auto store = load_snapshot(path);
  Service reopened(std::move(store), path, fixed_clock);
  EXPECT_TRUE(reopened.has_model());
  const auto aid = call(reopened, "POST", "/api/assays", {{"text", "luciferase"}}).body["assay_id"];
  EXPECT_EQ(call(reopened, "POST", "/api/assays/" + aid.get<std::string>() + "/semantify").status, 201);
}

TEST(Http, AdapterServesRequests) {
  Service s({}, {}, fixed_clock);
  const int port = 19000 + static_cast<int>(::getpid() % 500);
  std::thread server([&] { serve_http(s, "127.0.0.1", port, std::chrono::milliseconds(50)); });
  httplib::Client client("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 100 && !res; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    res = client.Post("/api/assays", R"({"text":"over http"})", "application/json");
  }
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  auto patch = client.Patch("/api/sessions/S1/proposals/p1", R"({"decision":"accepted"})", "application/json");
  ASSERT_TRUE(patch);
  EXPECT_EQ(patch->status, 404);
  auto stats = client.Get("/api/stats");
  ASSERT_TRUE(stats);
  EXPECT_EQ(json::parse(stats->body)["assay_count"], 0);
  stop_server();
  server.join();
}

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "assaykg/cli.hpp"
#include "assaykg/snapshot.hpp"
#include "generators.hpp"

using namespace assaykg;
using json = nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testgen::temp_dir("cli");
    store_ = dir_ + "/store.json";
  }

  CliResult run(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), {"--store", store_});
    std::ostringstream out, err;
    std::istringstream in(input);
    const int code = run_cli(args, out, err, in);
    return {code, out.str(), err.str()};
  }

  std::string write(const std::string& name, const std::string& content) {
    const auto path = dir_ + "/" + name;
    std::ofstream(path) << content;
    return path;
  }

  std::string dir_;
  std::string store_;
};

json error_line(const std::string& err) {
  auto trimmed = err;
  while (!trimmed.empty() && trimmed.back() == '\n') trimmed.pop_back();
  return json::parse(trimmed.substr(trimmed.rfind('\n') + 1));
}

}  // namespace

TEST_F(Cli, StatsAfterIngest) {
  auto ingest = run({"ingest", testgen::fixture("three_assays.jsonl")});
  ASSERT_EQ(ingest.code, 0) << ingest.err;
  auto stats = run({"stats"});
  ASSERT_EQ(stats.code, 0);
  EXPECT_NE(stats.out.find("statements min 5\n"), std::string::npos);
  EXPECT_NE(stats.out.find("statements max 92\n"), std::string::npos);
  EXPECT_NE(stats.out.find("statements mean 50.0\n"), std::string::npos);
  auto js = json::parse(run({"stats", "--json"}).out);
  EXPECT_EQ(js["statements_mean"].get<double>(), 50.0);
}

TEST_F(Cli, CompareCsvHeader) {
  run({"ingest", testgen::fixture("three_assays.jsonl")});
  auto r = run({"compare", "C1", "C2", "C3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find("\r\n")), "property,C1,C2,C3");
  auto bad = run({"compare", "C1", "C9"});
  EXPECT_NE(bad.code, 0);
  EXPECT_EQ(error_line(bad.err)["error"]["code"], "UnknownContribution");
}

TEST_F(Cli, EvalDeterministic) {
  run({"ingest", testgen::fixture("six_assays.jsonl")});
  auto a = run({"eval", "--split", "0.2", "--seed", "42"});
  auto b = run({"eval", "--split", "0.2", "--seed", "42"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("micro precision"), std::string::npos);
}

TEST_F(Cli, SemantifyCurateFinalize) {
  run({"ingest", testgen::fixture("six_assays.jsonl")});
  auto no_model = run({"semantify", "--stdin"}, "luciferase");
  EXPECT_EQ(error_line(no_model.err)["error"]["code"], "ModelUnavailable");
  ASSERT_EQ(run({"train", "--calibration-split", "0", "--timestamp", "t0"}).code, 0);
  auto text = write("assay.txt", "luciferase reporter luminescence");
  auto sem = run({"semantify", "--text-file", text, "--top-k", "3"});
  ASSERT_EQ(sem.code, 0) << sem.err;
  auto session = json::parse(sem.out);
  EXPECT_EQ(session["state"], "open");
  std::string decisions;
  for (const auto& p : session["proposals"]) {
    decisions += json{{"proposal_id", p["proposal_id"].get<std::string>()}, {"decision", "accepted"}}.dump() + "\n";
  }
  decisions += R"({"property":"has note","value":"cli"})" "\n";
  decisions += R"({"finalize":true,"paper_title":"From CLI"})" "\n";
  auto file = write("decisions.jsonl", decisions);
  auto cur = run({"curate", session["session_id"], "--decisions", file});
  ASSERT_EQ(cur.code, 0) << cur.err;
  auto after = json::parse(cur.out);
  EXPECT_EQ(after["state"], "finalized");
  auto again = run({"curate", session["session_id"], "--decisions", file});
  EXPECT_EQ(error_line(again.err)["error"]["code"], "SessionClosed");
}

TEST_F(Cli, AutoAcceptOnlyBehindFlag) {
  run({"ingest", testgen::fixture("six_assays.jsonl")});
  run({"train", "--calibration-split", "0", "--timestamp", "t0"});
  auto plain = json::parse(run({"semantify", "--stdin"}, "luciferase reporter").out);
  EXPECT_EQ(plain["state"], "open");
  auto auto_acc = json::parse(run({"semantify", "--stdin", "--auto-accept"}, "luciferase reporter").out);
  EXPECT_EQ(auto_acc["state"], "finalized");
  EXPECT_EQ(auto_acc["pending"], 0);
}

TEST_F(Cli, ExportImportSaveLoad) {
  run({"ingest", testgen::fixture("three_assays.jsonl")});
  const auto nt = dir_ + "/graph.nt";
  ASSERT_EQ(run({"export", "--ntriples", nt}).code, 0);
  auto imp = run({"import", "--ntriples", nt});
  ASSERT_EQ(imp.code, 0) << imp.err;
  EXPECT_NE(imp.out.find(" 0 new statements"), std::string::npos);
  auto bad_base = run({"export", "--ntriples", nt, "--base-uri", "nope"});
  EXPECT_EQ(error_line(bad_base.err)["error"]["code"], "InvalidBaseUri");

  const auto snap = dir_ + "/copy.json";
  auto saved = run({"save", snap});
  ASSERT_EQ(saved.code, 0);
  std::ofstream(store_) << "corrupted";
  auto broken = run({"stats"});
  EXPECT_NE(broken.code, 0);
  EXPECT_EQ(error_line(broken.err)["error"]["code"], "ChecksumMismatch");
  ASSERT_EQ(run({"load", snap}).code, 0);
  EXPECT_NE(run({"stats"}).out.find("statements max 92"), std::string::npos);
}

TEST_F(Cli, UsageErrorsAreMachineParsable) {
  auto none = run({});
  EXPECT_EQ(none.code, 2);
  EXPECT_EQ(error_line(none.err)["error"]["code"], "UsageError");
  auto fmt = run({"compare", "C1", "--format", "xml"});
  EXPECT_EQ(fmt.code, 2);
  auto k = run({"similar", "C1", "-k", "0"});
  EXPECT_NE(k.code, 0);
  auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("semantify"), std::string::npos);
}

TEST(CliEnv, StorePathFromEnvironment) {
  const auto dir = testgen::temp_dir("cli-env");
  const auto store = dir + "/env-store.json";
  ::setenv(kStoreEnv, store.c_str(), 1);
  std::ostringstream out, err;
  std::istringstream in;
  EXPECT_EQ(run_cli({"ingest", testgen::fixture("three_assays.jsonl")}, out, err, in), 0);
  ::unsetenv(kStoreEnv);
  EXPECT_TRUE(std::ifstream(store).good());
}

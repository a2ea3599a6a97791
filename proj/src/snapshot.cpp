#include "assaykg/snapshot.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "assaykg/error.hpp"

namespace assaykg {

using ojson = nlohmann::ordered_json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoFailure, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0F]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failure: " + path);
  return buffer.str();
}

void write_file_atomic(const std::string& path, std::string_view data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + tmp);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out.flush()) throw Error(ErrorCode::kIoFailure, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot rename " + tmp + ": " + ec.message());
}

namespace {

ojson optional_json(const std::optional<std::string>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

std::optional<std::string> optional_string(const ojson& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

NodeId parse_id(const ojson& j) {
  auto id = NodeId::parse(j.get<std::string>());
  if (!id) throw Error(ErrorCode::kParseError, "bad node id " + j.dump());
  return *id;
}

ojson label_json(const StatementLabel& l) { return ojson::array({l.property(), l.value()}); }

StatementLabel parse_label(const ojson& j) {
  return StatementLabel::make(j.at(0).get<std::string>(), j.at(1).get<std::string>());
}

ojson graph_json(const Graph& g) {
  ojson out;
  const auto& c = g.counters();
  out["counters"] = {{"paper", c.paper},
                     {"contribution", c.contribution},
                     {"resource", c.resource},
                     {"predicate", c.predicate}};
  auto papers = ojson::array();
  for (const auto& [id, p] : g.papers()) {
    papers.push_back({{"id", id.str()}, {"title", p.title}, {"metadata", p.metadata}});
  }
  out["papers"] = std::move(papers);
  auto contributions = ojson::array();
  for (const auto& [id, co] : g.contributions()) {
    contributions.push_back(
        {{"id", id.str()}, {"paper", co.paper.str()}, {"label", co.label}});
  }
  out["contributions"] = std::move(contributions);
  auto predicates = ojson::array();
  for (const auto& [id, p] : g.predicates()) {
    predicates.push_back({{"id", id.str()}, {"label", p.label}, {"uri", optional_json(p.uri)}});
  }
  out["predicates"] = std::move(predicates);
  auto resources = ojson::array();
  for (const auto& [id, r] : g.resources()) {
    resources.push_back({{"id", id.str()}, {"label", r.label}, {"uri", optional_json(r.uri)}});
  }
  out["resources"] = std::move(resources);
  auto statements = ojson::array();
  for (const auto& s : g.statements()) {
    ojson st = {{"s", s.subject.str()}, {"p", s.predicate.str()}};
    if (const auto* node = std::get_if<NodeId>(&s.object)) {
      st["o"] = node->str();
    } else {
      const auto& lit = std::get<Literal>(s.object);
      st["literal"] = lit.value;
      st["datatype"] = literal_type_name(lit.type);
    }
    statements.push_back(std::move(st));
  }
  out["statements"] = std::move(statements);
  return out;
}

Graph parse_graph(const ojson& j) {
  const auto& c = j.at("counters");
  IdCounters counters{c.at("paper").get<std::uint64_t>(),
                      c.at("contribution").get<std::uint64_t>(),
                      c.at("resource").get<std::uint64_t>(),
                      c.at("predicate").get<std::uint64_t>()};
  std::vector<Paper> papers;
  for (const auto& p : j.at("papers")) {
    papers.push_back({parse_id(p.at("id")), p.at("title").get<std::string>(),
                      p.at("metadata").get<std::map<std::string, std::string>>()});
  }
  std::vector<Contribution> contributions;
  for (const auto& co : j.at("contributions")) {
    contributions.push_back({parse_id(co.at("id")), parse_id(co.at("paper")),
                             co.at("label").get<std::string>()});
  }
  std::vector<Predicate> predicates;
  for (const auto& p : j.at("predicates")) {
    predicates.push_back({parse_id(p.at("id")), p.at("label").get<std::string>(),
                          optional_string(p, "uri")});
  }
  std::vector<Resource> resources;
  for (const auto& r : j.at("resources")) {
    resources.push_back({parse_id(r.at("id")), r.at("label").get<std::string>(),
                         optional_string(r, "uri")});
  }
  std::vector<Statement> statements;
  for (const auto& s : j.at("statements")) {
    Statement st{parse_id(s.at("s")), parse_id(s.at("p")), NodeId{}};
    if (s.contains("o")) {
      st.object = parse_id(s.at("o"));
    } else {
      auto type = parse_literal_type(s.at("datatype").get<std::string>());
      if (!type) throw Error(ErrorCode::kParseError, "bad literal datatype");
      st.object = Literal::make(s.at("literal").get<std::string>(), *type);
    }
    statements.push_back(std::move(st));
  }
  return Graph::restore(std::move(papers), std::move(contributions),
                        std::move(predicates), std::move(resources),
                        std::move(statements), counters);
}

ojson session_json(const CurationSession& s) {
  ojson out;
  out["id"] = s.id();
  out["assay_id"] = optional_json(s.assay_id());
  out["assay_text"] = s.assay_text();
  out["state"] = session_state_name(s.state());
  out["contribution"] =
      s.contribution() ? ojson(s.contribution()->str()) : ojson(nullptr);
  auto proposals = ojson::array();
  for (const auto& p : s.proposals()) {
    proposals.push_back({{"proposal_id", p.proposal_id},
                         {"label", label_json(p.label)},
                         {"score", p.score},
                         {"decision", decision_name(p.decision)}});
  }
  out["proposals"] = std::move(proposals);
  auto manual = ojson::array();
  for (const auto& m : s.manual_additions()) manual.push_back(label_json(m));
  out["manual_additions"] = std::move(manual);
  auto history = ojson::array();
  for (const auto& e : s.history()) {
    history.push_back(
        {{"sequence", e.sequence},
         {"timestamp_ms", e.timestamp_ms},
         {"kind", event_kind_name(e.kind)},
         {"proposal_id", e.proposal_id},
         {"label", e.label ? label_json(*e.label) : ojson(nullptr)},
         {"decision", e.decision ? ojson(decision_name(*e.decision)) : ojson(nullptr)},
         {"note", e.note}});
  }
  out["history"] = std::move(history);
  return out;
}

CurationSession parse_session(const ojson& j) {
  std::vector<ProposedStatement> proposals;
  for (const auto& p : j.at("proposals")) {
    auto decision = parse_decision(p.at("decision").get<std::string>());
    if (!decision) throw Error(ErrorCode::kParseError, "bad decision");
    proposals.push_back({p.at("proposal_id").get<std::string>(), parse_label(p.at("label")),
                         p.at("score").get<double>(), *decision});
  }
  std::vector<StatementLabel> manual;
  for (const auto& m : j.at("manual_additions")) manual.push_back(parse_label(m));
  std::vector<CurationEvent> history;
  for (const auto& e : j.at("history")) {
    auto kind = parse_event_kind(e.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::kParseError, "bad event kind");
    CurationEvent ev;
    ev.sequence = e.at("sequence").get<std::uint64_t>();
    ev.timestamp_ms = e.at("timestamp_ms").get<std::int64_t>();
    ev.kind = *kind;
    ev.proposal_id = e.at("proposal_id").get<std::string>();
    if (!e.at("label").is_null()) ev.label = parse_label(e.at("label"));
    if (!e.at("decision").is_null()) {
      ev.decision = parse_decision(e.at("decision").get<std::string>());
      if (!ev.decision) throw Error(ErrorCode::kParseError, "bad event decision");
    }
    ev.note = e.at("note").get<std::string>();
    history.push_back(std::move(ev));
  }
  auto state = parse_session_state(j.at("state").get<std::string>());
  if (!state) throw Error(ErrorCode::kParseError, "bad session state");
  std::optional<NodeId> contribution;
  if (!j.at("contribution").is_null()) contribution = parse_id(j.at("contribution"));
  return CurationSession::restore(j.at("id").get<std::string>(),
                                  j.at("assay_text").get<std::string>(),
                                  optional_string(j, "assay_id"), std::move(proposals),
                                  std::move(manual), *state, std::move(history),
                                  contribution);
}

}  // namespace

std::string serialize_store(const Store& store) {
  ojson doc;
  doc["format"] = "assaykg-snapshot";
  doc["format_version"] = kSnapshotFormatVersion;
  doc["graph"] = graph_json(store.graph);
  auto corpus = ojson::array();
  for (const auto& a : store.corpus) corpus.push_back(ojson::parse(serialize_assay(a)));
  doc["corpus"] = std::move(corpus);
  auto inbox = ojson::array();
  for (const auto& [id, a] : store.inbox) {
    inbox.push_back({{"id", a.id},
                     {"title", optional_json(a.title)},
                     {"text", a.text},
                     {"sessions", a.sessions},
                     {"contribution", a.contribution ? ojson(a.contribution->str())
                                                     : ojson(nullptr)}});
  }
  doc["inbox"] = std::move(inbox);
  auto sessions = ojson::array();
  for (const auto& [id, s] : store.sessions) sessions.push_back(session_json(s));
  doc["sessions"] = std::move(sessions);
  doc["next_assay"] = store.next_assay;
  doc["next_session"] = store.next_session;
  doc["model"] = store.model ? ojson{{"path", store.model->path},
                                     {"checksum", store.model->checksum}}
                             : ojson(nullptr);
  return doc.dump(1) + "\n";
}

Store deserialize_store(std::string_view text) {
  ojson doc = ojson::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("format", "") != "assaykg-snapshot") {
    throw Error(ErrorCode::kParseError, "not an assaykg snapshot");
  }
  if (!doc.contains("format_version") || doc["format_version"] != kSnapshotFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "snapshot format version " + doc.value("format_version", ojson()).dump() +
                    " is not supported (expected " +
                    std::to_string(kSnapshotFormatVersion) + ")");
  }
  try {
    Store store;
    store.graph = parse_graph(doc.at("graph"));
    std::string lines;
    for (const auto& a : doc.at("corpus")) lines += a.dump() + "\n";
    std::istringstream in(lines);
    auto parsed = parse_corpus(in, CorpusOptions{nullptr, nullptr});
    if (parsed.assays.size() != doc.at("corpus").size()) {
      throw Error(ErrorCode::kParseError, "snapshot corpus contains invalid records");
    }
    store.corpus = std::move(parsed.assays);
    for (const auto& a : doc.at("inbox")) {
      InboxAssay assay{a.at("id").get<std::string>(), optional_string(a, "title"),
                       a.at("text").get<std::string>(),
                       a.at("sessions").get<std::vector<std::string>>(), std::nullopt};
      if (!a.at("contribution").is_null()) assay.contribution = parse_id(a.at("contribution"));
      store.inbox.emplace(assay.id, std::move(assay));
    }
    for (const auto& s : doc.at("sessions")) {
      auto session = parse_session(s);
      const std::string id = session.id();
      store.sessions.emplace(id, std::move(session));
    }
    store.next_assay = doc.at("next_assay").get<std::uint64_t>();
    store.next_session = doc.at("next_session").get<std::uint64_t>();
    if (!doc.at("model").is_null()) {
      store.model = ModelRef{doc["model"].at("path").get<std::string>(),
                             doc["model"].at("checksum").get<std::string>()};
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed snapshot: ") + e.what());
  }
}

std::string manifest_path(const std::string& snapshot_path) {
  return snapshot_path + ".manifest.json";
}

std::string save_snapshot(const Store& store, const std::string& path) {
  const std::string bytes = serialize_store(store);
  const std::string checksum = sha256_hex(bytes);
  ojson manifest;
  manifest["format_version"] = kSnapshotFormatVersion;
  manifest["sha256"] = checksum;
  manifest["bytes"] = bytes.size();
  write_file_atomic(path, bytes);
  write_file_atomic(manifest_path(path), manifest.dump(1) + "\n");
  return checksum;
}

Store load_snapshot(const std::string& path) {
  const std::string bytes = read_file(path);
  std::string manifest_bytes;
  try {
    manifest_bytes = read_file(manifest_path(path));
  } catch (const Error&) {
    throw Error(ErrorCode::kIoFailure, "missing manifest " + manifest_path(path));
  }
  ojson manifest = ojson::parse(manifest_bytes, nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object() || !manifest.contains("sha256")) {
    throw Error(ErrorCode::kParseError, "malformed manifest " + manifest_path(path));
  }

  // Version first: a bumped version also changes the checksum, and the
  // version is the more useful diagnosis.
  ojson doc = ojson::parse(bytes, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && doc.contains("format_version") &&
      doc["format_version"] != kSnapshotFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "snapshot format version " + doc["format_version"].dump() +
                    " is not supported");
  }
  if (manifest.value("format_version", ojson()) != kSnapshotFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "manifest format version mismatch");
  }
  if (manifest["sha256"] != sha256_hex(bytes)) {
    throw Error(ErrorCode::kChecksumMismatch, "snapshot checksum does not match manifest");
  }
  return deserialize_store(bytes);
}

}  // namespace assaykg

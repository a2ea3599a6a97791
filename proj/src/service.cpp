#include "assaykg/service.hpp"

#include <atomic>
#include <condition_variable>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "assaykg/compare.hpp"
#include "assaykg/ntriples.hpp"
#include "assaykg/snapshot.hpp"

namespace assaykg {

using ojson = nlohmann::ordered_json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTitle:
    case ErrorCode::kEmptyLabel:
    case ErrorCode::kInvalidUri:
    case ErrorCode::kInvalidLiteral:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyCorpus:
    case ErrorCode::kEmptyText:
    case ErrorCode::kEmptySelection:
    case ErrorCode::kInvalidBaseUri:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kUnknownContribution:
    case ErrorCode::kUnknownNode:
    case ErrorCode::kUnknownProposal:
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownAssay:
      return 404;
    case ErrorCode::kDuplicateStatement:
    case ErrorCode::kSessionClosed:
    case ErrorCode::kDuplicateStatementInSession:
    case ErrorCode::kPendingProposalsRemain:
    case ErrorCode::kModelUnavailable:
      return 409;
    case ErrorCode::kUnreadableSource:
    case ErrorCode::kIoFailure:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kChecksumMismatch:
      return 500;
  }
  return 500;
}

ApiError to_api_error(const Error& error) {
  return {http_status(error.code()), std::string(error.code_name()), error.what()};
}

std::string model_path_for(const std::string& store_path) {
  return store_path + ".model.json";
}

std::optional<TrainedModel> load_store_model(const Store& store) {
  if (!store.model) return std::nullopt;
  if (store.model->path.empty()) {
    throw Error(ErrorCode::kModelUnavailable, "model was trained in memory only");
  }
  const std::string bytes = read_file(store.model->path);
  if (sha256_hex(bytes) != store.model->checksum) {
    throw Error(ErrorCode::kChecksumMismatch,
                "model file " + store.model->path + " does not match its checksum");
  }
  return deserialize_model(bytes);
}

TrainedModel train_store_model(Store& store, const std::string& store_path,
                               std::size_t min_frequency, const TrainConfig& config,
                               std::vector<std::string>* warnings) {
  if (store.corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no assays ingested");
  auto space = build_label_space(store.corpus, default_omitted_properties(), min_frequency);
  auto out = train(store.corpus, space, config);
  const std::string bytes = serialize_model(out.model);
  ModelRef ref{"", sha256_hex(bytes)};
  if (!store_path.empty()) {
    ref.path = model_path_for(store_path);
    write_file_atomic(ref.path, bytes);
  }
  store.model = ref;
  if (warnings) *warnings = std::move(out.warnings);
  return std::move(out.model);
}

std::string iso_timestamp(std::int64_t ms) {
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

ApiResponse json_response(int status, const ojson& body) {
  return {status, "application/json", body.dump()};
}

ApiResponse error_response(const ApiError& e) {
  return json_response(e.status, {{"error", {{"status", e.status},
                                             {"code", e.code},
                                             {"message", e.message}}}});
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

ojson parse_body(std::string_view body) {
  if (body.empty()) return ojson::object();
  ojson j = ojson::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kParseError, "request body is not a JSON object");
  }
  return j;
}

std::string body_string(const ojson& body, const char* key, bool required) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) throw Error(ErrorCode::kInvalidArgument, std::string("missing field ") + key);
    return {};
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field ") + key + " must be a string");
  }
  return it->get<std::string>();
}

template <typename T>
T body_number(const ojson& body, const char* key, T fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field ") + key + " must be a number");
  }
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("field ") + key + " must be a nonnegative integer");
    }
  }
  return it->get<T>();
}

std::size_t query_size(const QueryParams& query, const std::string& key, std::size_t fallback) {
  auto it = query.find(key);
  if (it == query.end()) return fallback;
  const std::string& v = it->second;
  if (v.empty() || v.size() > 9 || v.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, key + " must be a nonnegative integer");
  }
  return static_cast<std::size_t>(std::stoul(v));
}

std::string query_string(const QueryParams& query, const std::string& key,
                         std::string fallback) {
  auto it = query.find(key);
  return it == query.end() ? fallback : it->second;
}

ojson optional_json(const std::optional<std::string>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

ojson proposal_json(const ProposedStatement& p) {
  return {{"proposal_id", p.proposal_id},
          {"property", p.label.property()},
          {"value", p.label.value()},
          {"score", p.score},
          {"accepted_by_threshold", true},
          {"decision", decision_name(p.decision)}};
}

ojson session_view(const CurationSession& s) {
  ojson proposals = ojson::array();
  for (const auto& p : s.proposals()) proposals.push_back(proposal_json(p));
  ojson manual = ojson::array();
  for (const auto& m : s.manual_additions()) {
    manual.push_back({{"property", m.property()}, {"value", m.value()}});
  }
  return {{"session_id", s.id()},
          {"assay_id", optional_json(s.assay_id())},
          {"state", session_state_name(s.state())},
          {"pending", s.pending_count()},
          {"proposals", std::move(proposals)},
          {"manual_additions", std::move(manual)},
          {"contribution_id",
           s.contribution() ? ojson(s.contribution()->str()) : ojson(nullptr)}};
}

ojson stats_json(const CorpusStats& stats) {
  return {{"assay_count", stats.assay_count},
          {"statements_min", stats.statements_min ? ojson(*stats.statements_min) : ojson()},
          {"statements_max", stats.statements_max ? ojson(*stats.statements_max) : ojson()},
          {"statements_mean", stats.statements_mean},
          {"statements_total", stats.statements_total},
          {"distinct_types", stats.distinct_types},
          {"distinct_formats", stats.distinct_formats},
          {"per_label_frequency", stats.per_label_frequency}};
}

NodeId require_contribution_ref(const Store& store, const std::string& ref) {
  auto id = resolve_contribution(store, ref);
  if (!id) throw Error(ErrorCode::kUnknownContribution, "unknown contribution " + ref);
  return *id;
}

}  // namespace

std::string session_view_json(const CurationSession& session) {
  return session_view(session).dump();
}

std::string stats_view_json(const CorpusStats& stats) { return stats_json(stats).dump(); }

Service::Service(Store store, std::string store_path, Clock clock)
    : store_(std::move(store)), store_path_(std::move(store_path)), clock_(std::move(clock)) {
  if (store_.model && !store_.model->path.empty()) {
    model_ = std::make_shared<const TrainedModel>(std::move(*load_store_model(store_)));
  }
}

bool Service::dirty() const {
  std::shared_lock lock(mutex_);
  return generation_ != flushed_generation_;
}

bool Service::flush() {
  std::lock_guard flush_lock(flush_mutex_);
  if (store_path_.empty()) return false;
  std::string bytes;
  std::uint64_t generation = 0;
  {
    std::shared_lock lock(mutex_);
    if (generation_ == flushed_generation_) return false;
    bytes = serialize_store(store_);
    generation = generation_;
  }
  write_file_atomic(store_path_, bytes);
  ojson manifest;
  manifest["format_version"] = kSnapshotFormatVersion;
  manifest["sha256"] = sha256_hex(bytes);
  manifest["bytes"] = bytes.size();
  write_file_atomic(manifest_path(store_path_), manifest.dump(1) + "\n");
  std::unique_lock lock(mutex_);
  flushed_generation_ = generation;
  return true;
}

Store Service::copy_store() const {
  std::shared_lock lock(mutex_);
  return store_;
}

void Service::set_model(std::optional<TrainedModel> model) {
  std::unique_lock lock(mutex_);
  if (model) {
    model_ = std::make_shared<const TrainedModel>(std::move(*model));
  } else {
    model_.reset();
  }
}

bool Service::has_model() const {
  std::shared_lock lock(mutex_);
  return model_ != nullptr;
}

ApiResponse Service::handle(std::string_view method, std::string_view path,
                            const QueryParams& query, std::string_view body) {
  try {
    return dispatch(method, path, query, body);
  } catch (const Error& e) {
    return error_response(to_api_error(e));
  } catch (const nlohmann::json::exception& e) {
    return error_response({400, "ParseError", e.what()});
  } catch (const std::exception& e) {
    return error_response({500, "InternalError", e.what()});
  }
}

ApiResponse Service::dispatch(std::string_view method, std::string_view path,
                              const QueryParams& query, std::string_view body) {
  auto parts = split(path, '/');
  // "/api/x" splits into "", "api", "x".
  if (parts.size() < 3 || !parts[0].empty() || parts[1] != "api") {
    return error_response({404, "NotFound", "no route for " + std::string(path)});
  }
  parts.erase(parts.begin(), parts.begin() + 2);
  const auto n = parts.size();
  auto route = [&](std::string_view m, std::initializer_list<std::string_view> shape) {
    if (method != m || n != shape.size()) return false;
    std::size_t i = 0;
    for (auto s : shape) {
      if (s != "*" && parts[i] != s) return false;
      ++i;
    }
    return true;
  };
  auto mutated = [&] { ++generation_; };

  if (route("GET", {"stats"})) {
    std::shared_lock lock(mutex_);
    return json_response(200, stats_json(graph_profile(store_.graph)));
  }

  if (route("POST", {"corpus"})) {
    std::istringstream in{std::string(body)};
    auto parsed = parse_corpus(in);
    std::unique_lock lock(mutex_);
    auto report = ingest(store_, parsed.assays);
    mutated();
    ojson warnings = ojson::array();
    for (const auto& w : parsed.warnings) {
      warnings.push_back({{"line", w.line}, {"message", w.message}});
    }
    ojson contributions = ojson::object();
    for (const auto& [id, c] : report.contributions) contributions[id] = c.str();
    return json_response(200, {{"assays", report.assays},
                               {"replaced", report.replaced},
                               {"statements_added", report.statements_added},
                               {"contributions", std::move(contributions)},
                               {"warnings", std::move(warnings)}});
  }

  if (route("GET", {"model"})) {
    std::shared_lock lock(mutex_);
    ojson out = {{"loaded", model_ != nullptr}};
    if (model_) {
      out["labels"] = model_->label_space().size();
      out["vocabulary"] = model_->vocabulary().size();
      out["trained_at"] = model_->metadata().timestamp;
    }
    return json_response(200, out);
  }

  if (route("POST", {"model", "train"})) {
    const auto req = parse_body(body);
    TrainConfig config;
    config.seed = body_number<std::uint64_t>(req, "seed", 0);
    config.calibration_split = body_number<double>(req, "calibration_split", 0.2);
    config.timestamp = iso_timestamp(clock_());
    const auto min_frequency = body_number<std::size_t>(req, "min_frequency", 1);
    std::unique_lock lock(mutex_);
    std::vector<std::string> warnings;
    auto model = train_store_model(store_, store_path_, min_frequency, config, &warnings);
    mutated();
    ojson out = {{"labels", model.label_space().size()},
                 {"vocabulary", model.vocabulary().size()},
                 {"warnings", warnings}};
    model_ = std::make_shared<const TrainedModel>(std::move(model));
    return json_response(201, out);
  }

  if (route("POST", {"assays"})) {
    const auto req = parse_body(body);
    std::optional<std::string> title;
    if (auto t = body_string(req, "title", false); !t.empty()) title = t;
    std::string text = body_string(req, "text", false);
    std::unique_lock lock(mutex_);
    auto id = submit_assay(store_, std::move(title), std::move(text));
    mutated();
    return json_response(201, {{"assay_id", id}});
  }

  if (route("GET", {"assays", "*"})) {
    std::shared_lock lock(mutex_);
    const auto& a = find_inbox_assay(store_, parts[1]);
    return json_response(
        200, {{"assay_id", a.id},
              {"title", optional_json(a.title)},
              {"text", a.text},
              {"sessions", a.sessions},
              {"contribution_id", a.contribution ? ojson(a.contribution->str()) : ojson()}});
  }

  if (route("POST", {"assays", "*", "semantify"})) {
    const auto req = parse_body(body);
    const auto top_k = body_number<std::size_t>(req, "top_k", 10);
    std::unique_lock lock(mutex_);
    const bool known = store_.inbox.count(parts[1]) > 0 ||
                       std::any_of(store_.corpus.begin(), store_.corpus.end(),
                                   [&](const AnnotatedAssay& a) { return a.id == parts[1]; });
    if (!known) throw Error(ErrorCode::kUnknownAssay, "unknown assay " + parts[1]);
    if (!model_) throw Error(ErrorCode::kModelUnavailable, "no trained model is loaded");
    auto& session = semantify(store_, parts[1], *model_, top_k, clock_);
    mutated();
    return json_response(201, session_view(session));
  }

  if (route("GET", {"assays", "*", "similar"})) {
    const auto k = query_size(query, "k", 5);
    const auto mode_name = query_string(query, "mode", "statements");
    SimilarityMode mode;
    if (mode_name == "statements") {
      mode = SimilarityMode::kStatements;
    } else if (mode_name == "properties") {
      mode = SimilarityMode::kProperties;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "mode must be statements or properties");
    }
    std::shared_lock lock(mutex_);
    auto id = resolve_contribution(store_, parts[1]);
    if (!id) throw Error(ErrorCode::kUnknownAssay, "no contribution for " + parts[1]);
    ojson results = ojson::array();
    for (const auto& r : find_similar(store_.graph, *id, k, mode)) {
      const auto* c = store_.graph.find_contribution(r.contribution);
      results.push_back({{"contribution_id", r.contribution.str()},
                         {"label", c->label},
                         {"score", r.score}});
    }
    return json_response(200, {{"query", id->str()}, {"results", std::move(results)}});
  }

  if (route("GET", {"sessions", "*"})) {
    std::shared_lock lock(mutex_);
    return json_response(200, session_view(find_session(store_, parts[1])));
  }

  if (route("PATCH", {"sessions", "*", "proposals", "*"})) {
    const auto req = parse_body(body);
    const auto name = body_string(req, "decision", true);
    auto decision = parse_decision(name);
    if (!decision || *decision == Decision::kPending) {
      throw Error(ErrorCode::kInvalidArgument, "decision must be accepted or rejected");
    }
    std::unique_lock lock(mutex_);
    auto& session = find_session(store_, parts[1]);
    session.set_clock(clock_);
    session.decide(parts[3], *decision);
    mutated();
    return json_response(200, proposal_json(*session.find_proposal(parts[3])));
  }

  if (route("POST", {"sessions", "*", "statements"})) {
    const auto req = parse_body(body);
    const auto property = body_string(req, "property", true);
    const auto value = body_string(req, "value", true);
    std::unique_lock lock(mutex_);
    auto& session = find_session(store_, parts[1]);
    session.set_clock(clock_);
    session.add_manual(property, value);
    mutated();
    const auto& added = session.manual_additions().back();
    return json_response(201, {{"property", added.property()}, {"value", added.value()}});
  }

  if (route("POST", {"sessions", "*", "finalize"})) {
    const auto req = parse_body(body);
    const auto title = body_string(req, "paper_title", false);
    std::unique_lock lock(mutex_);
    find_session(store_, parts[1]).set_clock(clock_);
    auto result = finalize_session(store_, parts[1], title);
    mutated();
    return json_response(201, {{"contribution_id", result.contribution.str()},
                                {"paper_id", result.paper.str()},
                                {"statement_count", result.statement_count},
                                {"warnings", result.warnings}});
  }

  if (route("POST", {"sessions", "*", "discard"})) {
    std::unique_lock lock(mutex_);
    auto& session = find_session(store_, parts[1]);
    session.set_clock(clock_);
    session.discard();
    mutated();
    return json_response(200, session_view(session));
  }

  if (route("GET", {"comparisons"})) {
    const auto list = query_string(query, "contributions", "");
    const auto format = query_string(query, "format", "json");
    std::shared_lock lock(mutex_);
    std::vector<NodeId> ids;
    if (!list.empty()) {
      for (const auto& ref : split(list, ',')) {
        ids.push_back(require_contribution_ref(store_, ref));
      }
    }
    auto table = build_comparison(store_.graph, ids);
    if (format == "json") return {200, "application/json", render_json(table)};
    if (format == "csv") return {200, "text/csv", render_csv(table)};
    if (format == "text") return {200, "text/plain", render_text(table)};
    throw Error(ErrorCode::kInvalidArgument, "format must be json, csv or text");
  }

  if (route("GET", {"export"})) {
    const auto base = query_string(query, "base_uri", std::string(kDefaultBaseUri));
    std::shared_lock lock(mutex_);
    return {200, "application/n-triples", export_ntriples(store_.graph, base)};
  }

  if (route("POST", {"import"})) {
    const auto base = query_string(query, "base_uri", std::string(kDefaultBaseUri));
    ImportOptions options;
    options.partial_apply = query_string(query, "partial", "false") == "true";
    std::istringstream in{std::string(body)};
    std::unique_lock lock(mutex_);
    auto report = import_ntriples(store_.graph, in, base, options);
    mutated();
    ojson out = {{"lines", report.lines},
                 {"triples", report.triples},
                 {"new_statements", report.new_statements},
                 {"duplicate_statements", report.duplicate_statements},
                 {"warnings", report.warnings},
                 {"error_line", report.error_line ? ojson(*report.error_line) : ojson()},
                 {"error", optional_json(report.error)}};
    return json_response(200, out);
  }

  return error_response(
      {404, "NotFound", "no route for " + std::string(method) + " " + std::string(path)});
}

namespace {

std::atomic<httplib::Server*> g_server{nullptr};

}  // namespace

void stop_server() {
  if (auto* s = g_server.load()) s->stop();
}

void serve_http(Service& service, const std::string& host, int port,
                std::chrono::milliseconds flush_interval) {
  httplib::Server server;
  auto adapt = [&service](const httplib::Request& req, httplib::Response& res) {
    QueryParams query;
    for (const auto& [k, v] : req.params) query[k] = v;
    auto out = service.handle(req.method, req.path, query, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type == "application/json"
                                  ? "application/json; charset=utf-8"
                                  : out.content_type);
  };
  const std::string pattern = R"(/api/.*)";
  server.Get(pattern, adapt);
  server.Post(pattern, adapt);
  server.Patch(pattern, adapt);

  std::mutex m;
  std::condition_variable cv;
  bool done = false;
  std::thread flusher([&] {
    std::unique_lock lock(m);
    while (!cv.wait_for(lock, flush_interval, [&] { return done; })) {
      try {
        service.flush();
      } catch (const Error&) {
        // Retried on the next tick; shutdown flush reports.
      }
    }
  });

  g_server = &server;
  const bool ok = server.listen(host, port);
  g_server = nullptr;
  {
    std::lock_guard lock(m);
    done = true;
  }
  cv.notify_all();
  flusher.join();
  service.flush();
  if (!ok) throw Error(ErrorCode::kIoFailure, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace assaykg

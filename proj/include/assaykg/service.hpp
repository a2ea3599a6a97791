#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>

#include "assaykg/error.hpp"
#include "assaykg/semantifier.hpp"
#include "assaykg/store.hpp"

namespace assaykg {

struct ApiError {
  int status = 500;
  std::string code;
  std::string message;
};

// One (status, code) pair per module error: 400 for malformed input, 404
// for unknown ids, 409 for state conflicts, 500 for store faults.
int http_status(ErrorCode code);
ApiError to_api_error(const Error& error);

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using QueryParams = std::map<std::string, std::string>;

// Loads the model a store points at. Checks the file against the recorded
// checksum; nullopt when the store has no model.
std::optional<TrainedModel> load_store_model(const Store& store);

// Trains on the store's corpus, writes the model next to store_path (kept in
// memory only when store_path is empty) and records the reference.
TrainedModel train_store_model(Store& store, const std::string& store_path,
                               std::size_t min_frequency, const TrainConfig& config,
                               std::vector<std::string>* warnings = nullptr);
std::string model_path_for(const std::string& store_path);

// JSON views shared by the API and the CLI.
std::string session_view_json(const CurationSession& session);
std::string stats_view_json(const CorpusStats& stats);
std::string iso_timestamp(std::int64_t unix_ms);

// Stateful JSON API over one store. handle() is transport independent; the
// HTTP server only adapts requests onto it.
//
// Reads take a shared lock, mutations an exclusive one. Sessions on different
// assays interleave freely since every request is applied atomically.
class Service {
 public:
  explicit Service(Store store = {}, std::string store_path = {},
                   Clock clock = system_clock_ms);

  ApiResponse handle(std::string_view method, std::string_view path,
                     const QueryParams& query, std::string_view body);

  // Writes the snapshot if anything changed since the last flush. Returns
  // true when a snapshot was written.
  bool flush();
  bool dirty() const;

  Store copy_store() const;
  void set_model(std::optional<TrainedModel> model);
  bool has_model() const;

 private:
  ApiResponse dispatch(std::string_view method, std::string_view path,
                       const QueryParams& query, std::string_view body);

  mutable std::shared_mutex mutex_;
  Store store_;
  std::shared_ptr<const TrainedModel> model_;
  std::string store_path_;
  Clock clock_;
  std::uint64_t generation_ = 0;
  std::uint64_t flushed_generation_ = 0;
  std::mutex flush_mutex_;
};

// Blocks serving HTTP until stop_server() or a stop signal. Flushes every
// flush_interval and once more on shutdown.
void serve_http(Service& service, const std::string& host, int port,
                std::chrono::milliseconds flush_interval);
void stop_server();

}  // namespace assaykg

#pragma once

#include <string>
#include <string_view>

#include "assaykg/store.hpp"

namespace assaykg {

inline constexpr int kSnapshotFormatVersion = 1;

std::string sha256_hex(std::string_view data);

// Deterministic JSON encoding: identical stores give identical bytes.
std::string serialize_store(const Store& store);
Store deserialize_store(std::string_view text);

// "<path>.manifest.json", holding the format version and SHA-256 of the
// snapshot bytes.
std::string manifest_path(const std::string& snapshot_path);

// Writes snapshot and manifest (each via rename of a temporary file) and
// returns the checksum.
std::string save_snapshot(const Store& store, const std::string& path);

// Rejects a version other than kSnapshotFormatVersion (kVersionMismatch)
// before checking the manifest checksum (kChecksumMismatch).
Store load_snapshot(const std::string& path);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view data);

}  // namespace assaykg

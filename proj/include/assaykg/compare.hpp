#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "assaykg/graph.hpp"

namespace assaykg {

struct ComparisonColumn {
  NodeId contribution;
  std::string paper_title;
};

struct ComparisonRow {
  std::string property;
  std::optional<std::string> property_uri;
  // One cell per column; each cell is a sorted, possibly empty value list.
  std::vector<std::vector<std::string>> cells;
  std::size_t coverage = 0;
};

// Survey-style matrix: contributions as columns, the union of their
// properties as rows, ordered by coverage (desc) then property name.
struct ComparisonTable {
  std::vector<ComparisonColumn> columns;
  std::vector<ComparisonRow> rows;
};

// Predicates are aligned on normalized label, and also on equal URI.
// Repeated ids in the selection are collapsed to their first occurrence.
ComparisonTable build_comparison(const Graph& graph,
                                 const std::vector<NodeId>& contributions);

std::string render_text(const ComparisonTable& table);
// RFC 4180; header row is "property" followed by the contribution ids.
std::string render_csv(const ComparisonTable& table);
std::string render_json(const ComparisonTable& table);

using KeySet = std::set<std::string>;

double jaccard_similarity(const KeySet& a, const KeySet& b);

enum class SimilarityMode { kStatements, kProperties };

// Normalized "property :: value" keys of a contribution, or just the
// normalized property labels in kProperties mode.
KeySet statement_keys(const Graph& graph, const NodeId& contribution,
                      SimilarityMode mode = SimilarityMode::kStatements);

struct SimilarityResult {
  NodeId contribution;
  double score = 0.0;
};

// Top-k other contributions by Jaccard score, ties by id ascending.
std::vector<SimilarityResult> find_similar(
    const Graph& graph, const NodeId& query, std::size_t k,
    SimilarityMode mode = SimilarityMode::kStatements);

}  // namespace assaykg

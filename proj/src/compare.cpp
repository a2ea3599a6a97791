#include "assaykg/compare.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "assaykg/error.hpp"
#include "assaykg/kernels.hpp"

namespace assaykg {

namespace {

struct RowBuilder {
  std::string property;
  std::optional<std::string> uri;
  std::vector<std::vector<std::string>> cells;
};

}  // namespace

ComparisonTable build_comparison(const Graph& graph,
                                 const std::vector<NodeId>& contributions) {
  if (contributions.empty()) {
    throw Error(ErrorCode::kEmptySelection, "no contributions selected");
  }
  ComparisonTable table;
  std::set<NodeId> seen;
  for (const auto& id : contributions) {
    if (!seen.insert(id).second) continue;
    const auto* c = graph.find_contribution(id);
    if (!c) {
      throw Error(ErrorCode::kUnknownContribution, "unknown contribution " + id.str());
    }
    const auto* paper = graph.find_paper(c->paper);
    table.columns.push_back({id, paper ? paper->title : std::string()});
  }

  // Row groups keyed by URI when the predicate has one, else by label.
  std::vector<RowBuilder> rows;
  std::unordered_map<std::string, std::size_t> by_uri;
  std::unordered_map<std::string, std::size_t> by_label;
  std::map<NodeId, std::size_t> group_of;
  auto group_for = [&](const NodeId& pid) -> std::size_t {
    if (auto it = group_of.find(pid); it != group_of.end()) return it->second;
    const auto* pred = graph.find_predicate(pid);
    const std::string norm = normalize_label(pred->label);
    std::size_t g;
    if (pred->uri && by_uri.contains(*pred->uri)) {
      g = by_uri.at(*pred->uri);
    } else if (by_label.contains(norm)) {
      g = by_label.at(norm);
    } else {
      g = rows.size();
      rows.push_back({pred->label, pred->uri,
                      std::vector<std::vector<std::string>>(table.columns.size())});
    }
    by_label.emplace(norm, g);
    if (pred->uri) by_uri.emplace(*pred->uri, g);
    if (!rows[g].uri && pred->uri) rows[g].uri = pred->uri;
    group_of.emplace(pid, g);
    return g;
  };

  // Visit predicates in id order so the representative label is stable
  // under column permutation.
  std::map<NodeId, std::vector<std::pair<std::size_t, std::string>>> values;
  for (std::size_t col = 0; col < table.columns.size(); ++col) {
    for (const auto& s : graph.statements_of(table.columns[col].contribution)) {
      values[s.predicate].emplace_back(col, graph.object_label(s.object));
    }
  }
  for (const auto& [pid, entries] : values) {
    const std::size_t g = group_for(pid);
    for (const auto& [col, label] : entries) rows[g].cells[col].push_back(label);
  }

  for (auto& r : rows) {
    ComparisonRow row{std::move(r.property), std::move(r.uri), std::move(r.cells), 0};
    for (auto& cell : row.cells) {
      std::sort(cell.begin(), cell.end());
      if (!cell.empty()) ++row.coverage;
    }
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const ComparisonRow& a, const ComparisonRow& b) {
              if (a.coverage != b.coverage) return a.coverage > b.coverage;
              const auto na = normalize_label(a.property);
              const auto nb = normalize_label(b.property);
              if (na != nb) return na < nb;
              return a.property < b.property;
            });
  return table;
}

namespace {

std::string join_cell(const std::vector<std::string>& cell) {
  std::string out;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (i) out += "; ";
    out += cell[i];
  }
  return out;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string render_text(const ComparisonTable& table) {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"property"};
  for (const auto& c : table.columns) {
    header.push_back(c.contribution.str() +
                     (c.paper_title.empty() ? "" : " (" + c.paper_title + ")"));
  }
  grid.push_back(std::move(header));
  for (const auto& row : table.rows) {
    std::vector<std::string> line{row.property};
    for (const auto& cell : row.cells) {
      line.push_back(cell.empty() ? "-" : join_cell(cell));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      width[i] = std::max(width[i], line[i].size());
    }
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out << " | ";
      out << line[i];
      if (i + 1 < line.size()) out << std::string(width[i] - line[i].size(), ' ');
    }
    out << '\n';
  };
  emit(grid.front());
  for (std::size_t i = 0; i < width.size(); ++i) {
    if (i) out << "-+-";
    out << std::string(width[i], '-');
  }
  out << '\n';
  for (std::size_t r = 1; r < grid.size(); ++r) emit(grid[r]);
  return out.str();
}

std::string render_csv(const ComparisonTable& table) {
  std::string out = "property";
  for (const auto& c : table.columns) out += "," + csv_field(c.contribution.str());
  out += "\r\n";
  for (const auto& row : table.rows) {
    out += csv_field(row.property);
    for (const auto& cell : row.cells) out += "," + csv_field(join_cell(cell));
    out += "\r\n";
  }
  return out;
}

std::string render_json(const ComparisonTable& table) {
  nlohmann::ordered_json doc;
  auto columns = nlohmann::ordered_json::array();
  for (const auto& c : table.columns) {
    columns.push_back({{"contribution", c.contribution.str()},
                       {"paper_title", c.paper_title}});
  }
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json row;
    row["property"] = r.property;
    row["property_uri"] = r.property_uri ? nlohmann::ordered_json(*r.property_uri)
                                         : nlohmann::ordered_json(nullptr);
    row["coverage"] = r.coverage;
    row["cells"] = r.cells;
    rows.push_back(std::move(row));
  }
  doc["columns"] = std::move(columns);
  doc["rows"] = std::move(rows);
  return doc.dump(2);
}

double jaccard_similarity(const KeySet& a, const KeySet& b) {
  const std::vector<std::string> va(a.begin(), a.end());
  const std::vector<std::string> vb(b.begin(), b.end());
  return kernels::jaccard_sorted(va, vb);
}

KeySet statement_keys(const Graph& graph, const NodeId& contribution,
                      SimilarityMode mode) {
  KeySet keys;
  for (const auto& s : graph.statements_of(contribution)) {
    const auto* pred = graph.find_predicate(s.predicate);
    std::string key = normalize_label(pred->label);
    if (mode == SimilarityMode::kStatements) {
      key += " :: ";
      key += normalize_label(graph.object_label(s.object));
    }
    keys.insert(std::move(key));
  }
  return keys;
}

std::vector<SimilarityResult> find_similar(const Graph& graph, const NodeId& query,
                                           std::size_t k, SimilarityMode mode) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto q = statement_keys(graph, query, mode);
  const std::vector<std::string> query_keys(q.begin(), q.end());

  std::vector<NodeId> ids;
  std::vector<std::vector<std::string>> candidates;
  for (const auto& [id, _] : graph.contributions()) {
    if (id == query) continue;
    const auto keys = statement_keys(graph, id, mode);
    ids.push_back(id);
    candidates.emplace_back(keys.begin(), keys.end());
  }
  std::vector<double> scores(ids.size());
  kernels::jaccard_scan_parallel(query_keys, candidates, scores);

  std::vector<SimilarityResult> results;
  results.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) results.push_back({ids[i], scores[i]});
  std::sort(results.begin(), results.end(),
            [](const SimilarityResult& a, const SimilarityResult& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.contribution < b.contribution;
            });
  if (results.size() > k) results.resize(k);
  return results;
}

}  // namespace assaykg

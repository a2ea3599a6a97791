#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "assaykg/graph.hpp"

namespace assaykg {

struct GoldStatement {
  std::string property;
  std::string value;
  std::optional<std::string> property_uri;
  std::optional<std::string> value_uri;

  friend bool operator==(const GoldStatement&, const GoldStatement&) = default;
};

// One expert-annotated assay: free text plus its gold statements.
struct AnnotatedAssay {
  std::string id;
  std::optional<std::string> title;
  std::string text;
  std::vector<GoldStatement> statements;
  std::optional<std::string> assay_type;
  std::optional<std::string> assay_format;

  friend bool operator==(const AnnotatedAssay&, const AnnotatedAssay&) = default;
};

// A set of normalized labels. Lookups normalize their argument.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& labels);

  bool contains(std::string_view label) const;
  std::size_t size() const { return entries_.size(); }
  const std::set<std::string>& entries() const { return entries_; }

 private:
  std::set<std::string> entries_;
};

// Bioassay types as tabulated by the source annotation effort. The table
// repeats one entry, so 41 distinct labels remain.
const Vocabulary& default_type_vocabulary();
// Top-level BAO assay formats (cell-based, biochemical, tissue-based, ...).
const Vocabulary& default_format_vocabulary();

struct CorpusWarning {
  std::size_t line = 0;
  std::string message;
};

struct CorpusParseResult {
  std::vector<AnnotatedAssay> assays;
  std::vector<CorpusWarning> warnings;
};

struct CorpusOptions {
  const Vocabulary* types = &default_type_vocabulary();
  const Vocabulary* formats = &default_format_vocabulary();
};

// Reads JSON Lines. Malformed records become warnings; only a failing stream
// throws (kUnreadableSource).
CorpusParseResult parse_corpus(std::istream& in, const CorpusOptions& options = {});
CorpusParseResult parse_corpus_file(const std::string& path,
                                    const CorpusOptions& options = {});

std::string serialize_assay(const AnnotatedAssay& assay);
std::string serialize_corpus(const std::vector<AnnotatedAssay>& corpus);

struct CorpusStats {
  std::size_t assay_count = 0;
  std::optional<std::size_t> statements_min;
  std::optional<std::size_t> statements_max;
  double statements_mean = 0.0;
  std::size_t statements_total = 0;
  std::size_t distinct_types = 0;
  std::size_t distinct_formats = 0;
  // "property :: value" (normalized) -> number of assays carrying it.
  std::map<std::string, std::size_t> per_label_frequency;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats compute_stats(const std::vector<AnnotatedAssay>& corpus);

// Writes one assay into the graph as paper + contribution. Re-ingesting an
// assay id reuses its contribution and absorbs duplicate statements.
std::pair<NodeId, NodeId> to_graph(const AnnotatedAssay& assay, Graph& graph);

// Metadata key under which to_graph records the assay id on the paper.
inline constexpr std::string_view kAssayIdKey = "assay_id";

}  // namespace assaykg

#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "assaykg/graph.hpp"

namespace assaykg {

inline constexpr std::string_view kDefaultBaseUri = "http://example.org/assaykg/";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";

// Absolute URI ending in '/'; throws kInvalidBaseUri otherwise.
void require_base_uri(std::string_view base_uri);

// Escapes '"', '\\', LF and CR as N-Triples ECHARs.
std::string escape_ntriples_string(std::string_view value);

// Sorted, duplicate-free lines ("<s> <p> <o> .") without trailing newlines.
// Nodes with an ontology URI use it verbatim; others are minted under
// base_uri + "resource/" or base_uri + "predicate/".
std::vector<std::string> export_ntriples_lines(const Graph& graph,
                                               std::string_view base_uri);
std::string export_ntriples(const Graph& graph, std::string_view base_uri);

struct NTriplesTerm {
  enum class Kind { kIri, kBlank, kLiteral };
  Kind kind = Kind::kIri;
  std::string value;     // IRI, blank label or unescaped lexical form
  std::string datatype;  // literal datatype IRI, empty when absent
  std::string language;  // literal language tag, empty when absent
};

struct NTriple {
  NTriplesTerm subject;
  NTriplesTerm predicate;
  NTriplesTerm object;
};

// Parses one line of the W3C N-Triples grammar. Returns nullopt for blank and
// comment-only lines; throws ParseError(line_no) otherwise.
std::optional<NTriple> parse_ntriples_line(std::string_view line, std::size_t line_no);

struct ImportOptions {
  // Keep lines applied before a failing line instead of rolling back.
  bool partial_apply = false;
};

struct ImportReport {
  std::size_t lines = 0;
  std::size_t triples = 0;
  std::size_t new_statements = 0;
  std::size_t duplicate_statements = 0;
  std::vector<NodeId> created_resources;
  std::vector<NodeId> created_predicates;
  std::vector<std::string> warnings;
  // Only set in partial-apply mode, where a failure does not throw.
  std::optional<std::size_t> error_line;
  std::optional<std::string> error;
};

// Applies N-Triples to the graph. IRIs minted under base_uri resolve to the
// node they name when it exists; other IRIs resolve by URI or become new
// nodes labelled with the IRI. By default the whole stream is one
// transaction: a ParseError leaves the graph unchanged.
ImportReport import_ntriples(Graph& graph, std::istream& in,
                             std::string_view base_uri,
                             const ImportOptions& options = {});

}  // namespace assaykg

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "assaykg/corpus.hpp"
#include "assaykg/curation.hpp"
#include "assaykg/graph.hpp"
#include "assaykg/semantifier.hpp"

namespace assaykg {

// Assay text submitted for semantification (not part of the gold corpus).
struct InboxAssay {
  std::string id;
  std::optional<std::string> title;
  std::string text;
  std::vector<std::string> sessions;
  std::optional<NodeId> contribution;
};

struct ModelRef {
  std::string path;
  std::string checksum;
};

// Everything a deployment persists: the graph, the gold corpus it was built
// from, submitted assays, curation sessions and the active model reference.
struct Store {
  Graph graph;
  std::vector<AnnotatedAssay> corpus;
  std::map<std::string, InboxAssay> inbox;
  std::map<std::string, CurationSession> sessions;
  std::uint64_t next_assay = 1;
  std::uint64_t next_session = 1;
  std::optional<ModelRef> model;
};

struct IngestReport {
  std::size_t assays = 0;
  std::size_t replaced = 0;
  std::size_t statements_added = 0;
  std::vector<std::pair<std::string, NodeId>> contributions;
};

// Adds parsed assays to the corpus (same id replaces) and to the graph.
IngestReport ingest(Store& store, const std::vector<AnnotatedAssay>& assays);

// Registers new assay text; returns its id ("A<n>"). No deduplication.
std::string submit_assay(Store& store, std::optional<std::string> title,
                         std::string text);

const InboxAssay& find_inbox_assay(const Store& store, const std::string& assay_id);
CurationSession& find_session(Store& store, const std::string& session_id);
const CurationSession& find_session(const Store& store, const std::string& session_id);

// Runs the scorer on a submitted assay and opens a curation session.
CurationSession& semantify(Store& store, const std::string& assay_id,
                           const LabelScorer& scorer, std::size_t top_k,
                           Clock clock = system_clock_ms);

FinalizeResult finalize_session(Store& store, const std::string& session_id,
                                std::string_view paper_title);

// Accepts every pending proposal, then finalizes.
FinalizeResult auto_accept(Store& store, const std::string& session_id,
                           std::string_view paper_title);

// Applies headless decision commands in order. Returns the finalize result
// if a command finalized the session.
std::optional<FinalizeResult> apply_decisions(
    Store& store, const std::string& session_id,
    const std::vector<DecisionCommand>& commands);

// Resolves a contribution id or an assay id (gold or submitted) to the
// contribution that holds its statements.
std::optional<NodeId> resolve_contribution(const Store& store, const std::string& ref);

// CorpusStats-shaped profile of the graph's contributions: statement counts,
// assay types/formats from paper metadata, label frequencies.
CorpusStats graph_profile(const Graph& graph);

}  // namespace assaykg

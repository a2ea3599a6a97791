#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "assaykg/graph.hpp"
#include "assaykg/semantifier.hpp"

namespace assaykg {

enum class Decision { kPending, kAccepted, kRejected };
enum class SessionState { kOpen, kFinalized, kDiscarded };

std::string_view decision_name(Decision d);
std::optional<Decision> parse_decision(std::string_view name);
std::string_view session_state_name(SessionState s);
std::optional<SessionState> parse_session_state(std::string_view name);

struct ProposedStatement {
  std::string proposal_id;
  StatementLabel label;
  double score = 0.0;
  Decision decision = Decision::kPending;
};

enum class EventKind { kOpened, kDecided, kManualAdded, kFinalized, kDiscarded };

std::string_view event_kind_name(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view name);

// Audit record. Sequence numbers are dense from 1; timestamps are
// milliseconds since the Unix epoch.
struct CurationEvent {
  std::uint64_t sequence = 0;
  std::int64_t timestamp_ms = 0;
  EventKind kind = EventKind::kOpened;
  std::string proposal_id;
  std::optional<StatementLabel> label;
  std::optional<Decision> decision;
  std::string note;
};

struct FinalizeResult {
  NodeId paper;
  NodeId contribution;
  std::size_t statement_count = 0;
  std::vector<std::string> warnings;
};

using Clock = std::function<std::int64_t()>;
std::int64_t system_clock_ms();

// Human-in-the-loop review of machine-proposed statements. One writer per
// session; closed sessions reject every mutation with kSessionClosed.
class CurationSession {
 public:
  // One pending proposal per accepted-by-threshold prediction, highest score
  // first. Duplicate labels keep their first (highest) occurrence.
  static CurationSession open(std::string session_id, std::string assay_text,
                              const std::vector<Prediction>& predictions,
                              Clock clock = system_clock_ms);

  void decide(std::string_view proposal_id, Decision decision);
  void add_manual(std::string_view property, std::string_view value);
  void discard();
  // Writes accepted proposals and manual additions as one new paper and
  // contribution. Requires every proposal decided.
  FinalizeResult finalize(Graph& graph, std::string_view paper_title);

  const std::string& id() const { return id_; }
  const std::string& assay_text() const { return assay_text_; }
  const std::optional<std::string>& assay_id() const { return assay_id_; }
  void set_assay_id(std::string assay_id) { assay_id_ = std::move(assay_id); }
  SessionState state() const { return state_; }
  const std::vector<ProposedStatement>& proposals() const { return proposals_; }
  const std::vector<StatementLabel>& manual_additions() const { return manual_; }
  const std::vector<CurationEvent>& history() const { return history_; }
  const std::optional<NodeId>& contribution() const { return contribution_; }
  const ProposedStatement* find_proposal(std::string_view proposal_id) const;
  std::size_t pending_count() const;

  // Labels a finalize would write right now: accepted proposals in proposal
  // order, then manual additions not already accepted.
  std::vector<StatementLabel> final_labels() const;

  void set_clock(Clock clock) { clock_ = std::move(clock); }

  // Persistence hook: rebuild a session exactly as stored.
  static CurationSession restore(std::string id, std::string assay_text,
                                 std::optional<std::string> assay_id,
                                 std::vector<ProposedStatement> proposals,
                                 std::vector<StatementLabel> manual,
                                 SessionState state,
                                 std::vector<CurationEvent> history,
                                 std::optional<NodeId> contribution);

 private:
  CurationSession() = default;
  void require_open() const;
  void record(EventKind kind, std::string proposal_id = {},
              std::optional<StatementLabel> label = std::nullopt,
              std::optional<Decision> decision = std::nullopt,
              std::string note = {});

  std::string id_;
  std::string assay_text_;
  std::optional<std::string> assay_id_;
  std::vector<ProposedStatement> proposals_;
  std::vector<StatementLabel> manual_;
  SessionState state_ = SessionState::kOpen;
  std::vector<CurationEvent> history_;
  std::optional<NodeId> contribution_;
  Clock clock_ = system_clock_ms;
};

// One line of a headless decisions file.
struct DecisionCommand {
  enum class Kind { kDecide, kManual, kFinalize, kDiscard };
  Kind kind = Kind::kDecide;
  std::string proposal_id;
  Decision decision = Decision::kAccepted;
  std::string property;
  std::string value;
  std::string paper_title;
};

// JSON Lines: {"proposal_id": "p1", "decision": "accepted"} |
// {"property": "...", "value": "..."} | {"finalize": true, "paper_title": "..."}
// | {"discard": true}. Throws ParseError naming the line.
std::vector<DecisionCommand> parse_decisions(std::istream& in);

}  // namespace assaykg

#include "assaykg/curation.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <set>

#include <json.hpp>

#include "assaykg/error.hpp"

namespace assaykg {

std::string_view decision_name(Decision d) {
  switch (d) {
    case Decision::kPending: return "pending";
    case Decision::kAccepted: return "accepted";
    case Decision::kRejected: return "rejected";
  }
  return "pending";
}

std::optional<Decision> parse_decision(std::string_view name) {
  if (name == "pending") return Decision::kPending;
  if (name == "accepted" || name == "accept") return Decision::kAccepted;
  if (name == "rejected" || name == "reject") return Decision::kRejected;
  return std::nullopt;
}

std::string_view session_state_name(SessionState s) {
  switch (s) {
    case SessionState::kOpen: return "open";
    case SessionState::kFinalized: return "finalized";
    case SessionState::kDiscarded: return "discarded";
  }
  return "open";
}

std::optional<SessionState> parse_session_state(std::string_view name) {
  if (name == "open") return SessionState::kOpen;
  if (name == "finalized") return SessionState::kFinalized;
  if (name == "discarded") return SessionState::kDiscarded;
  return std::nullopt;
}

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::kOpened: return "opened";
    case EventKind::kDecided: return "decided";
    case EventKind::kManualAdded: return "manual_added";
    case EventKind::kFinalized: return "finalized";
    case EventKind::kDiscarded: return "discarded";
  }
  return "opened";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (auto k : {EventKind::kOpened, EventKind::kDecided, EventKind::kManualAdded,
                 EventKind::kFinalized, EventKind::kDiscarded}) {
    if (event_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

CurationSession CurationSession::open(std::string session_id,
                                      std::string assay_text,
                                      const std::vector<Prediction>& predictions,
                                      Clock clock) {
  if (normalize_label(assay_text).empty()) {
    throw Error(ErrorCode::kEmptyText, "assay text is empty");
  }
  std::vector<const Prediction*> accepted;
  for (const auto& p : predictions) {
    if (p.accepted_by_threshold) accepted.push_back(&p);
  }
  std::stable_sort(accepted.begin(), accepted.end(),
                   [](const Prediction* a, const Prediction* b) {
                     return a->score > b->score;
                   });
  CurationSession session;
  session.id_ = std::move(session_id);
  session.assay_text_ = std::move(assay_text);
  session.clock_ = std::move(clock);
  std::set<std::string> seen;
  for (const auto* p : accepted) {
    if (!seen.insert(p->label.key()).second) continue;
    session.proposals_.push_back(
        ProposedStatement{"p" + std::to_string(session.proposals_.size() + 1),
                          p->label, p->score, Decision::kPending});
  }
  session.record(EventKind::kOpened, {}, std::nullopt, std::nullopt,
                 std::to_string(session.proposals_.size()) + " proposals");
  return session;
}

void CurationSession::require_open() const {
  if (state_ != SessionState::kOpen) {
    throw Error(ErrorCode::kSessionClosed,
                "session " + id_ + " is " + std::string(session_state_name(state_)));
  }
}

void CurationSession::record(EventKind kind, std::string proposal_id,
                             std::optional<StatementLabel> label,
                             std::optional<Decision> decision, std::string note) {
  history_.push_back(CurationEvent{history_.size() + 1, clock_ ? clock_() : 0, kind,
                                   std::move(proposal_id), std::move(label),
                                   decision, std::move(note)});
}

const ProposedStatement* CurationSession::find_proposal(
    std::string_view proposal_id) const {
  for (const auto& p : proposals_) {
    if (p.proposal_id == proposal_id) return &p;
  }
  return nullptr;
}

std::size_t CurationSession::pending_count() const {
  return static_cast<std::size_t>(
      std::count_if(proposals_.begin(), proposals_.end(), [](const auto& p) {
        return p.decision == Decision::kPending;
      }));
}

void CurationSession::decide(std::string_view proposal_id, Decision decision) {
  require_open();
  if (decision == Decision::kPending) {
    throw Error(ErrorCode::kInvalidArgument, "decision must be accepted or rejected");
  }
  auto it = std::find_if(proposals_.begin(), proposals_.end(),
                         [&](const auto& p) { return p.proposal_id == proposal_id; });
  if (it == proposals_.end()) {
    throw Error(ErrorCode::kUnknownProposal,
                "no proposal '" + std::string(proposal_id) + "' in session " + id_);
  }
  it->decision = decision;
  record(EventKind::kDecided, it->proposal_id, it->label, decision);
}

void CurationSession::add_manual(std::string_view property, std::string_view value) {
  require_open();
  auto label = StatementLabel::make(property, value);
  for (const auto& p : proposals_) {
    if (p.decision == Decision::kAccepted && p.label == label) {
      throw Error(ErrorCode::kDuplicateStatementInSession,
                  "'" + label.key() + "' is already accepted as " + p.proposal_id);
    }
  }
  if (std::find(manual_.begin(), manual_.end(), label) != manual_.end()) {
    throw Error(ErrorCode::kDuplicateStatementInSession,
                "'" + label.key() + "' was already added");
  }
  manual_.push_back(label);
  record(EventKind::kManualAdded, {}, std::move(label));
}

void CurationSession::discard() {
  require_open();
  state_ = SessionState::kDiscarded;
  record(EventKind::kDiscarded);
}

std::vector<StatementLabel> CurationSession::final_labels() const {
  std::vector<StatementLabel> out;
  std::set<std::string> seen;
  for (const auto& p : proposals_) {
    if (p.decision == Decision::kAccepted && seen.insert(p.label.key()).second) {
      out.push_back(p.label);
    }
  }
  for (const auto& m : manual_) {
    if (seen.insert(m.key()).second) out.push_back(m);
  }
  return out;
}

FinalizeResult CurationSession::finalize(Graph& graph, std::string_view paper_title) {
  require_open();
  if (const auto pending = pending_count(); pending > 0) {
    throw Error(ErrorCode::kPendingProposalsRemain,
                std::to_string(pending) + " proposal(s) still pending in session " + id_);
  }
  if (normalize_label(paper_title).empty()) {
    throw Error(ErrorCode::kEmptyTitle, "paper title is empty");
  }
  std::map<std::string, std::string> metadata{{"curation_session", id_}};
  if (assay_id_) metadata["source_assay"] = *assay_id_;

  FinalizeResult result;
  result.paper = graph.create_paper(paper_title, std::move(metadata));
  result.contribution = graph.create_contribution(result.paper, id_);
  for (const auto& label : final_labels()) {
    try {
      graph.add_statement(result.contribution, label.property(), std::nullopt,
                          label.value(), std::nullopt);
      ++result.statement_count;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDuplicateStatement) throw;
    }
  }
  if (result.statement_count == 0) {
    result.warnings.push_back("session " + id_ + " finalized with no statements");
  }
  state_ = SessionState::kFinalized;
  contribution_ = result.contribution;
  record(EventKind::kFinalized, {}, std::nullopt, std::nullopt,
         result.contribution.str());
  return result;
}

CurationSession CurationSession::restore(std::string id, std::string assay_text,
                                         std::optional<std::string> assay_id,
                                         std::vector<ProposedStatement> proposals,
                                         std::vector<StatementLabel> manual,
                                         SessionState state,
                                         std::vector<CurationEvent> history,
                                         std::optional<NodeId> contribution) {
  std::set<std::string> ids;
  for (const auto& p : proposals) {
    if (!ids.insert(p.proposal_id).second) {
      throw Error(ErrorCode::kParseError, "duplicate proposal id " + p.proposal_id);
    }
  }
  CurationSession s;
  s.id_ = std::move(id);
  s.assay_text_ = std::move(assay_text);
  s.assay_id_ = std::move(assay_id);
  s.proposals_ = std::move(proposals);
  s.manual_ = std::move(manual);
  s.state_ = state;
  s.history_ = std::move(history);
  s.contribution_ = contribution;
  return s;
}

std::vector<DecisionCommand> parse_decisions(std::istream& in) {
  using nlohmann::json;
  std::vector<DecisionCommand> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_label(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ParseError(line_no, "expected a JSON object");
    }
    DecisionCommand cmd;
    auto str = [&](const char* key) -> std::string {
      auto it = j.find(key);
      if (it == j.end() || !it->is_string()) {
        throw ParseError(line_no, std::string("missing string field '") + key + "'");
      }
      return it->get<std::string>();
    };
    if (j.value("finalize", false)) {
      cmd.kind = DecisionCommand::Kind::kFinalize;
      cmd.paper_title = str("paper_title");
    } else if (j.value("discard", false)) {
      cmd.kind = DecisionCommand::Kind::kDiscard;
    } else if (j.contains("proposal_id")) {
      cmd.kind = DecisionCommand::Kind::kDecide;
      cmd.proposal_id = str("proposal_id");
      auto d = parse_decision(str("decision"));
      if (!d || *d == Decision::kPending) {
        throw ParseError(line_no, "decision must be accepted or rejected");
      }
      cmd.decision = *d;
    } else if (j.contains("property") || j.contains("value")) {
      cmd.kind = DecisionCommand::Kind::kManual;
      cmd.property = str("property");
      cmd.value = str("value");
    } else {
      throw ParseError(line_no, "unrecognized decision record");
    }
    out.push_back(std::move(cmd));
  }
  return out;
}

}  // namespace assaykg

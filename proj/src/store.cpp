#include "assaykg/store.hpp"

#include <algorithm>
#include <set>

#include "assaykg/error.hpp"

namespace assaykg {

IngestReport ingest(Store& store, const std::vector<AnnotatedAssay>& assays) {
  IngestReport report;
  for (const auto& assay : assays) {
    auto it = std::find_if(store.corpus.begin(), store.corpus.end(),
                           [&](const AnnotatedAssay& a) { return a.id == assay.id; });
    if (it != store.corpus.end()) {
      *it = assay;
      ++report.replaced;
    } else {
      store.corpus.push_back(assay);
    }
    const auto before = store.graph.statement_count();
    const auto [paper, contribution] = to_graph(assay, store.graph);
    report.statements_added += store.graph.statement_count() - before;
    report.contributions.emplace_back(assay.id, contribution);
    ++report.assays;
  }
  return report;
}

std::string submit_assay(Store& store, std::optional<std::string> title,
                         std::string text) {
  if (normalize_label(text).empty()) {
    throw Error(ErrorCode::kEmptyText, "assay text is empty");
  }
  std::string id = "A" + std::to_string(store.next_assay++);
  store.inbox.emplace(id, InboxAssay{id, std::move(title), std::move(text), {}, {}});
  return id;
}

const InboxAssay& find_inbox_assay(const Store& store, const std::string& assay_id) {
  auto it = store.inbox.find(assay_id);
  if (it == store.inbox.end()) {
    throw Error(ErrorCode::kUnknownAssay, "unknown assay " + assay_id);
  }
  return it->second;
}

CurationSession& find_session(Store& store, const std::string& session_id) {
  auto it = store.sessions.find(session_id);
  if (it == store.sessions.end()) {
    throw Error(ErrorCode::kUnknownSession, "unknown session " + session_id);
  }
  return it->second;
}

const CurationSession& find_session(const Store& store, const std::string& session_id) {
  auto it = store.sessions.find(session_id);
  if (it == store.sessions.end()) {
    throw Error(ErrorCode::kUnknownSession, "unknown session " + session_id);
  }
  return it->second;
}

CurationSession& semantify(Store& store, const std::string& assay_id,
                           const LabelScorer& scorer, std::size_t top_k, Clock clock) {
  const std::string* text = nullptr;
  InboxAssay* inbox = nullptr;
  if (auto it = store.inbox.find(assay_id); it != store.inbox.end()) {
    inbox = &it->second;
    text = &inbox->text;
  } else {
    for (const auto& a : store.corpus) {
      if (a.id == assay_id) text = &a.text;
    }
  }
  if (!text) throw Error(ErrorCode::kUnknownAssay, "unknown assay " + assay_id);

  const auto predictions = predict(scorer, *text, top_k);
  std::string session_id = "S" + std::to_string(store.next_session);
  auto session = CurationSession::open(session_id, *text, predictions, std::move(clock));
  session.set_assay_id(assay_id);
  ++store.next_session;
  if (inbox) inbox->sessions.push_back(session_id);
  return store.sessions.emplace(session_id, std::move(session)).first->second;
}

FinalizeResult finalize_session(Store& store, const std::string& session_id,
                                std::string_view paper_title) {
  auto& session = find_session(store, session_id);
  auto result = session.finalize(store.graph, paper_title);
  if (session.assay_id()) {
    if (auto it = store.inbox.find(*session.assay_id()); it != store.inbox.end()) {
      it->second.contribution = result.contribution;
    }
  }
  return result;
}

FinalizeResult auto_accept(Store& store, const std::string& session_id,
                           std::string_view paper_title) {
  auto& session = find_session(store, session_id);
  std::vector<std::string> pending;
  for (const auto& p : session.proposals()) {
    if (p.decision == Decision::kPending) pending.push_back(p.proposal_id);
  }
  for (const auto& pid : pending) session.decide(pid, Decision::kAccepted);
  return finalize_session(store, session_id, paper_title);
}

std::optional<FinalizeResult> apply_decisions(
    Store& store, const std::string& session_id,
    const std::vector<DecisionCommand>& commands) {
  std::optional<FinalizeResult> finalized;
  for (const auto& cmd : commands) {
    auto& session = find_session(store, session_id);
    switch (cmd.kind) {
      case DecisionCommand::Kind::kDecide:
        session.decide(cmd.proposal_id, cmd.decision);
        break;
      case DecisionCommand::Kind::kManual:
        session.add_manual(cmd.property, cmd.value);
        break;
      case DecisionCommand::Kind::kDiscard:
        session.discard();
        break;
      case DecisionCommand::Kind::kFinalize:
        finalized = finalize_session(store, session_id, cmd.paper_title);
        break;
    }
  }
  return finalized;
}

std::optional<NodeId> resolve_contribution(const Store& store, const std::string& ref) {
  if (auto id = NodeId::parse(ref);
      id && id->kind() == NodeKind::kContribution && store.graph.find_contribution(*id)) {
    return id;
  }
  if (auto it = store.inbox.find(ref); it != store.inbox.end()) {
    return it->second.contribution;
  }
  if (auto paper = store.graph.find_paper_by_metadata(kAssayIdKey, ref)) {
    auto contributions = store.graph.contributions_of(*paper);
    if (!contributions.empty()) return contributions.front();
  }
  return std::nullopt;
}

CorpusStats graph_profile(const Graph& graph) {
  CorpusStats stats;
  std::set<std::string> types;
  std::set<std::string> formats;
  for (const auto& [id, contribution] : graph.contributions()) {
    std::set<std::string> keys;
    for (const auto& s : graph.statements_of(id)) {
      keys.insert(normalize_label(graph.find_predicate(s.predicate)->label) + " :: " +
                  normalize_label(graph.object_label(s.object)));
    }
    const std::size_t n = keys.size();
    ++stats.assay_count;
    stats.statements_total += n;
    stats.statements_min = std::min(stats.statements_min.value_or(n), n);
    stats.statements_max = std::max(stats.statements_max.value_or(n), n);
    for (auto& k : keys) ++stats.per_label_frequency[k];
    if (const auto* paper = graph.find_paper(contribution.paper)) {
      if (auto it = paper->metadata.find("assay_type"); it != paper->metadata.end()) {
        if (auto norm = normalize_label(it->second); !norm.empty()) types.insert(norm);
      }
      if (auto it = paper->metadata.find("assay_format"); it != paper->metadata.end()) {
        if (auto norm = normalize_label(it->second); !norm.empty()) formats.insert(norm);
      }
    }
  }
  if (stats.assay_count > 0) {
    stats.statements_mean = static_cast<double>(stats.statements_total) /
                            static_cast<double>(stats.assay_count);
  }
  stats.distinct_types = types.size();
  stats.distinct_formats = formats.size();
  return stats;
}

}  // namespace assaykg

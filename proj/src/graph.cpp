#include "assaykg/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "assaykg/error.hpp"

namespace assaykg {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool valid_integer(std::string_view v) {
  if (!v.empty() && (v.front() == '+' || v.front() == '-')) v.remove_prefix(1);
  return !v.empty() && std::all_of(v.begin(), v.end(), is_digit);
}

// [+-]? ( digits ( "." digits? )? | "." digits )
bool valid_decimal(std::string_view v) {
  if (!v.empty() && (v.front() == '+' || v.front() == '-')) v.remove_prefix(1);
  const auto dot = v.find('.');
  if (dot == std::string_view::npos) {
    return !v.empty() && std::all_of(v.begin(), v.end(), is_digit);
  }
  auto whole = v.substr(0, dot);
  auto frac = v.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;
  return std::all_of(whole.begin(), whole.end(), is_digit) &&
         std::all_of(frac.begin(), frac.end(), is_digit);
}

}  // namespace

std::string normalize_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool pending_space = false;
  for (char ch : label) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

bool is_absolute_uri(std::string_view uri) {
  const auto colon = uri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  const auto scheme = uri.substr(0, colon);
  if (!std::isalpha(static_cast<unsigned char>(scheme[0]))) return false;
  for (char c : scheme) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' &&
        c != '.') {
      return false;
    }
  }
  const auto rest = uri.substr(colon + 1);
  if (rest.empty()) return false;
  for (char ch : rest) {
    const auto c = static_cast<unsigned char>(ch);
    if (c <= 0x20 || c == 0x7f) return false;
    switch (c) {
      case '<': case '>': case '"': case '{': case '}':
      case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

std::string_view node_prefix(NodeKind kind) {
  switch (kind) {
    case NodeKind::kPaper: return "P";
    case NodeKind::kContribution: return "C";
    case NodeKind::kResource: return "R";
    case NodeKind::kPredicate: return "PR";
  }
  return "";
}

NodeId::NodeId(NodeKind kind, std::uint64_t number)
    : kind_(kind), number_(number) {}

std::optional<NodeId> NodeId::parse(std::string_view text) {
  NodeKind kind;
  std::string_view digits;
  if (text.starts_with("PR")) {
    kind = NodeKind::kPredicate;
    digits = text.substr(2);
  } else if (!text.empty()) {
    switch (text[0]) {
      case 'P': kind = NodeKind::kPaper; break;
      case 'C': kind = NodeKind::kContribution; break;
      case 'R': kind = NodeKind::kResource; break;
      default: return std::nullopt;
    }
    digits = text.substr(1);
  } else {
    return std::nullopt;
  }
  if (digits.empty() || digits[0] == '0' ||
      !std::all_of(digits.begin(), digits.end(), is_digit)) {
    return std::nullopt;
  }
  std::uint64_t number = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), number);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    return std::nullopt;
  }
  return NodeId(kind, number);
}

std::string NodeId::str() const {
  return std::string(node_prefix(kind_)) + std::to_string(number_);
}

std::string_view literal_type_name(LiteralType type) {
  switch (type) {
    case LiteralType::kString: return "string";
    case LiteralType::kInteger: return "integer";
    case LiteralType::kDecimal: return "decimal";
  }
  return "string";
}

std::optional<LiteralType> parse_literal_type(std::string_view name) {
  if (name == "string") return LiteralType::kString;
  if (name == "integer") return LiteralType::kInteger;
  if (name == "decimal") return LiteralType::kDecimal;
  return std::nullopt;
}

Literal Literal::make(std::string value, LiteralType type) {
  const bool ok = type == LiteralType::kString ||
                  (type == LiteralType::kInteger && valid_integer(value)) ||
                  (type == LiteralType::kDecimal && valid_decimal(value));
  if (!ok) {
    throw Error(ErrorCode::kInvalidLiteral,
                "'" + value + "' is not a valid " +
                    std::string(literal_type_name(type)));
  }
  return Literal{std::move(value), type};
}

// ---------------------------------------------------------------------------

NodeId Graph::create_paper(std::string_view title,
                           std::map<std::string, std::string> metadata) {
  if (normalize_label(title).empty()) {
    throw Error(ErrorCode::kEmptyTitle, "paper title is empty");
  }
  NodeId id(NodeKind::kPaper, counters_.paper++);
  papers_.emplace(id, Paper{id, std::string(title), std::move(metadata)});
  return id;
}

NodeId Graph::create_contribution(const NodeId& paper, std::string_view label) {
  if (!papers_.contains(paper)) {
    throw Error(ErrorCode::kUnknownNode, "unknown paper " + paper.str());
  }
  NodeId id(NodeKind::kContribution, counters_.contribution++);
  contributions_.emplace(id, Contribution{id, paper, std::string(label)});
  return id;
}

std::string Graph::resource_key(std::string_view label,
                                const std::optional<std::string>& uri) {
  std::string key = normalize_label(label);
  key.push_back('\n');
  if (uri) key += *uri;
  return key;
}

std::string Graph::statement_key(const Statement& s) {
  std::string key = s.subject.str();
  key.push_back('\x1f');
  key += s.predicate.str();
  key.push_back('\x1f');
  if (const auto* node = std::get_if<NodeId>(&s.object)) {
    key.push_back('N');
    key += node->str();
  } else {
    const auto& lit = std::get<Literal>(s.object);
    key.push_back('L');
    key += literal_type_name(lit.type);
    key.push_back('\x1f');
    key += lit.value;
  }
  return key;
}

NodeId Graph::ensure_predicate(std::string_view label,
                               const std::optional<std::string>& uri) {
  const std::string norm = normalize_label(label);
  if (norm.empty()) throw Error(ErrorCode::kEmptyLabel, "predicate label is empty");
  if (uri && !is_absolute_uri(*uri)) {
    throw Error(ErrorCode::kInvalidUri, "not an absolute URI: " + *uri);
  }
  if (uri) {
    if (auto it = predicate_by_uri_.find(*uri); it != predicate_by_uri_.end()) {
      return it->second;
    }
  }
  if (auto it = predicate_by_label_.find(norm); it != predicate_by_label_.end()) {
    auto& pred = predicates_.at(it->second);
    if (uri && !pred.uri) {
      pred.uri = uri;
      predicate_by_uri_.emplace(*uri, pred.id);
    }
    return pred.id;
  }
  NodeId id(NodeKind::kPredicate, counters_.predicate++);
  predicates_.emplace(id, Predicate{id, std::string(label), uri});
  predicate_by_label_.emplace(norm, id);
  if (uri) predicate_by_uri_.emplace(*uri, id);
  return id;
}

NodeId Graph::ensure_resource(std::string_view label,
                              const std::optional<std::string>& uri) {
  if (normalize_label(label).empty()) {
    throw Error(ErrorCode::kEmptyLabel, "resource label is empty");
  }
  if (uri && !is_absolute_uri(*uri)) {
    throw Error(ErrorCode::kInvalidUri, "not an absolute URI: " + *uri);
  }
  const auto key = resource_key(label, uri);
  if (auto it = resource_index_.find(key); it != resource_index_.end()) {
    return it->second;
  }
  NodeId id(NodeKind::kResource, counters_.resource++);
  resources_.emplace(id, Resource{id, std::string(label), uri});
  resource_index_.emplace(key, id);
  if (uri) resource_by_uri_.emplace(*uri, id);
  return id;
}

void Graph::require_contribution(const NodeId& id) const {
  if (!contributions_.contains(id)) {
    throw Error(ErrorCode::kUnknownContribution,
                "unknown contribution " + id.str());
  }
}

bool Graph::node_exists(const NodeId& id) const {
  switch (id.kind()) {
    case NodeKind::kPaper: return papers_.contains(id);
    case NodeKind::kContribution: return contributions_.contains(id);
    case NodeKind::kResource: return resources_.contains(id);
    case NodeKind::kPredicate: return predicates_.contains(id);
  }
  return false;
}

Statement Graph::add_statement(const NodeId& contribution,
                               std::string_view predicate_label,
                               const std::optional<std::string>& predicate_uri,
                               std::string_view object_label,
                               const std::optional<std::string>& object_uri) {
  require_contribution(contribution);
  if (normalize_label(predicate_label).empty() ||
      normalize_label(object_label).empty()) {
    throw Error(ErrorCode::kEmptyLabel, "statement labels must be nonempty");
  }
  // Validate both URIs before creating anything so a failure leaves the
  // graph untouched.
  for (const auto* uri : {&predicate_uri, &object_uri}) {
    if (*uri && !is_absolute_uri(**uri)) {
      throw Error(ErrorCode::kInvalidUri, "not an absolute URI: " + **uri);
    }
  }
  const auto pred = ensure_predicate(predicate_label, predicate_uri);
  const auto obj = ensure_resource(object_label, object_uri);
  return add_triple(Statement{contribution, pred, obj});
}

Statement Graph::add_literal_statement(
    const NodeId& contribution, std::string_view predicate_label,
    const std::optional<std::string>& predicate_uri, Literal literal) {
  require_contribution(contribution);
  auto checked = Literal::make(std::move(literal.value), literal.type);
  const auto pred = ensure_predicate(predicate_label, predicate_uri);
  return add_triple(Statement{contribution, pred, std::move(checked)});
}

Statement Graph::add_triple(const Statement& statement) {
  const auto sk = statement.subject.kind();
  if (sk != NodeKind::kContribution && sk != NodeKind::kResource) {
    throw Error(ErrorCode::kInvalidArgument,
                "statement subject must be a contribution or resource");
  }
  if (!node_exists(statement.subject)) {
    if (sk == NodeKind::kContribution) require_contribution(statement.subject);
    throw Error(ErrorCode::kUnknownNode,
                "unknown subject " + statement.subject.str());
  }
  if (statement.predicate.kind() != NodeKind::kPredicate ||
      !node_exists(statement.predicate)) {
    throw Error(ErrorCode::kUnknownNode,
                "unknown predicate " + statement.predicate.str());
  }
  if (const auto* node = std::get_if<NodeId>(&statement.object)) {
    const bool kind_ok = node->kind() == NodeKind::kResource ||
                         node->kind() == NodeKind::kContribution;
    if (!kind_ok || !node_exists(*node)) {
      throw Error(ErrorCode::kUnknownNode, "unknown object " + node->str());
    }
  }
  auto key = statement_key(statement);
  if (statement_keys_.contains(key)) {
    throw Error(ErrorCode::kDuplicateStatement, "statement already exists");
  }
  statement_keys_.insert(std::move(key));
  statements_.push_back(statement);
  by_subject_[statement.subject].push_back(statement);
  return statement;
}

bool Graph::contains(const Statement& statement) const {
  return statement_keys_.contains(statement_key(statement));
}

bool Graph::remove_statement(const Statement& statement) {
  if (statement_keys_.erase(statement_key(statement)) == 0) return false;
  std::erase(statements_, statement);
  auto it = by_subject_.find(statement.subject);
  std::erase(it->second, statement);
  if (it->second.empty()) by_subject_.erase(it);
  return true;
}

std::size_t Graph::compact() {
  std::unordered_set<NodeId, NodeIdHash> used;
  for (const auto& s : statements_) {
    used.insert(s.subject);
    used.insert(s.predicate);
    if (const auto* node = std::get_if<NodeId>(&s.object)) used.insert(*node);
  }
  std::size_t removed = 0;
  for (auto it = resources_.begin(); it != resources_.end();) {
    if (used.contains(it->first)) {
      ++it;
      continue;
    }
    resource_index_.erase(resource_key(it->second.label, it->second.uri));
    it = resources_.erase(it);
    ++removed;
  }
  for (auto it = predicates_.begin(); it != predicates_.end();) {
    if (used.contains(it->first)) {
      ++it;
      continue;
    }
    predicate_by_label_.erase(normalize_label(it->second.label));
    if (it->second.uri) predicate_by_uri_.erase(*it->second.uri);
    it = predicates_.erase(it);
    ++removed;
  }
  reindex_resource_uris();
  return removed;
}

std::vector<Statement> Graph::statements_of(const NodeId& contribution) const {
  require_contribution(contribution);
  auto it = by_subject_.find(contribution);
  if (it == by_subject_.end()) return {};
  return it->second;
}

const Paper* Graph::find_paper(const NodeId& id) const {
  auto it = papers_.find(id);
  return it == papers_.end() ? nullptr : &it->second;
}

const Contribution* Graph::find_contribution(const NodeId& id) const {
  auto it = contributions_.find(id);
  return it == contributions_.end() ? nullptr : &it->second;
}

const Resource* Graph::find_resource(const NodeId& id) const {
  auto it = resources_.find(id);
  return it == resources_.end() ? nullptr : &it->second;
}

const Predicate* Graph::find_predicate(const NodeId& id) const {
  auto it = predicates_.find(id);
  return it == predicates_.end() ? nullptr : &it->second;
}

void Graph::reindex_resource_uris() {
  resource_by_uri_.clear();
  for (const auto& [id, r] : resources_) {
    if (r.uri) resource_by_uri_.emplace(*r.uri, id);
  }
}

std::optional<NodeId> Graph::find_resource_by_uri(std::string_view uri) const {
  auto it = resource_by_uri_.find(std::string(uri));
  if (it == resource_by_uri_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> Graph::find_predicate_by_uri(std::string_view uri) const {
  auto it = predicate_by_uri_.find(std::string(uri));
  if (it == predicate_by_uri_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> Graph::find_paper_by_metadata(
    std::string_view key, std::string_view value) const {
  for (const auto& [id, paper] : papers_) {
    auto it = paper.metadata.find(std::string(key));
    if (it != paper.metadata.end() && it->second == value) return id;
  }
  return std::nullopt;
}

std::vector<NodeId> Graph::contributions_of(const NodeId& paper) const {
  std::vector<NodeId> out;
  for (const auto& [id, c] : contributions_) {
    if (c.paper == paper) out.push_back(id);
  }
  return out;
}

std::string Graph::object_label(const Object& object) const {
  if (const auto* lit = std::get_if<Literal>(&object)) return lit->value;
  const auto& id = std::get<NodeId>(object);
  if (const auto* r = find_resource(id)) return r->label;
  if (const auto* c = find_contribution(id)) return c->label;
  return id.str();
}

bool Graph::check_integrity() const {
  std::unordered_set<std::string> keys;
  for (const auto& s : statements_) {
    if (!node_exists(s.subject) || !node_exists(s.predicate)) return false;
    if (const auto* node = std::get_if<NodeId>(&s.object)) {
      if (!node_exists(*node)) return false;
    }
    if (!keys.insert(statement_key(s)).second) return false;
  }
  std::unordered_set<std::string> resource_keys;
  for (const auto& [id, r] : resources_) {
    if (!resource_keys.insert(resource_key(r.label, r.uri)).second) return false;
  }
  std::unordered_set<std::string> predicate_labels;
  for (const auto& [id, p] : predicates_) {
    if (!predicate_labels.insert(normalize_label(p.label)).second) return false;
  }
  for (const auto& [id, c] : contributions_) {
    if (!papers_.contains(c.paper)) return false;
  }
  return keys.size() == statement_keys_.size();
}

Graph Graph::restore(std::vector<Paper> papers,
                     std::vector<Contribution> contributions,
                     std::vector<Predicate> predicates,
                     std::vector<Resource> resources,
                     std::vector<Statement> statements, IdCounters counters) {
  Graph g;
  auto check_counter = [](const NodeId& id, NodeKind kind, std::uint64_t next) {
    if (id.kind() != kind || id.number() >= next) {
      throw Error(ErrorCode::kParseError,
                  "node id " + id.str() + " inconsistent with id counters");
    }
  };
  for (auto& p : papers) {
    check_counter(p.id, NodeKind::kPaper, counters.paper);
    g.papers_.emplace(p.id, std::move(p));
  }
  for (auto& c : contributions) {
    check_counter(c.id, NodeKind::kContribution, counters.contribution);
    if (!g.papers_.contains(c.paper)) {
      throw Error(ErrorCode::kParseError,
                  "contribution " + c.id.str() + " references missing paper");
    }
    g.contributions_.emplace(c.id, std::move(c));
  }
  for (auto& p : predicates) {
    check_counter(p.id, NodeKind::kPredicate, counters.predicate);
    if (!g.predicate_by_label_.emplace(normalize_label(p.label), p.id).second) {
      throw Error(ErrorCode::kParseError, "duplicate predicate label");
    }
    if (p.uri) g.predicate_by_uri_.emplace(*p.uri, p.id);
    g.predicates_.emplace(p.id, std::move(p));
  }
  for (auto& r : resources) {
    check_counter(r.id, NodeKind::kResource, counters.resource);
    if (!g.resource_index_.emplace(resource_key(r.label, r.uri), r.id).second) {
      throw Error(ErrorCode::kParseError, "duplicate resource");
    }
    g.resources_.emplace(r.id, std::move(r));
  }
  g.reindex_resource_uris();
  g.counters_ = counters;
  for (const auto& s : statements) {
    try {
      g.add_triple(s);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError,
                  std::string("invalid stored statement: ") + e.what());
    }
  }
  return g;
}

}  // namespace assaykg

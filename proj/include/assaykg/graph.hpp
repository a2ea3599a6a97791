#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace assaykg {

// Lowercase ASCII, trim, collapse internal whitespace runs to one space.
// Bytes >= 0x80 pass through untouched so UTF-8 labels survive.
std::string normalize_label(std::string_view label);

// Syntactic absolute-URI check: scheme ":" followed by a nonempty remainder
// free of whitespace and the characters N-Triples forbids inside IRIs.
bool is_absolute_uri(std::string_view uri);

enum class NodeKind { kPaper, kContribution, kResource, kPredicate };

std::string_view node_prefix(NodeKind kind);

class NodeId {
 public:
  NodeId() = default;
  NodeId(NodeKind kind, std::uint64_t number);

  // Accepts "P12", "C3", "R7", "PR4". Anything else yields nullopt.
  static std::optional<NodeId> parse(std::string_view text);

  NodeKind kind() const { return kind_; }
  std::uint64_t number() const { return number_; }
  std::string str() const;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  // Same kind orders numerically, so C2 < C10.
  friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    return a.number_ <=> b.number_;
  }

 private:
  NodeKind kind_ = NodeKind::kResource;
  std::uint64_t number_ = 0;
};

struct NodeIdHash {
  std::size_t operator()(const NodeId& id) const noexcept {
    return std::hash<std::uint64_t>()(id.number() * 4 +
                                      static_cast<std::uint64_t>(id.kind()));
  }
};

enum class LiteralType { kString, kInteger, kDecimal };

std::string_view literal_type_name(LiteralType type);
std::optional<LiteralType> parse_literal_type(std::string_view name);

struct Literal {
  std::string value;
  LiteralType type = LiteralType::kString;

  // Throws Error(kInvalidLiteral) when value does not parse under type.
  static Literal make(std::string value, LiteralType type);

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Object = std::variant<NodeId, Literal>;

struct Statement {
  NodeId subject;
  NodeId predicate;
  Object object;

  friend bool operator==(const Statement&, const Statement&) = default;
};

struct Paper {
  NodeId id;
  std::string title;
  std::map<std::string, std::string> metadata;
};

struct Contribution {
  NodeId id;
  NodeId paper;
  std::string label;
};

struct Resource {
  NodeId id;
  std::string label;
  std::optional<std::string> uri;
};

struct Predicate {
  NodeId id;
  std::string label;
  std::optional<std::string> uri;
};

// Next number handed out per prefix. Numbers are never reused.
struct IdCounters {
  std::uint64_t paper = 1;
  std::uint64_t contribution = 1;
  std::uint64_t resource = 1;
  std::uint64_t predicate = 1;

  friend bool operator==(const IdCounters&, const IdCounters&) = default;
};

// In-memory knowledge graph of papers, contributions and their statements.
//
// Not internally synchronized. Callers that share a graph across threads
// wrap it in a reader/writer lock (see Store); statements returned by value
// are independent snapshots.
class Graph {
 public:
  NodeId create_paper(std::string_view title,
                      std::map<std::string, std::string> metadata = {});
  NodeId create_contribution(const NodeId& paper, std::string_view label);

  // Creates or reuses the predicate and the object resource, then stores the
  // triple. Throws kDuplicateStatement (graph unchanged) if already present.
  Statement add_statement(const NodeId& contribution,
                          std::string_view predicate_label,
                          const std::optional<std::string>& predicate_uri,
                          std::string_view object_label,
                          const std::optional<std::string>& object_uri);

  Statement add_literal_statement(const NodeId& contribution,
                                  std::string_view predicate_label,
                                  const std::optional<std::string>& predicate_uri,
                                  Literal literal);

  // Stores a fully resolved triple. Subject must be a contribution or
  // resource, object node (if any) a resource or contribution.
  Statement add_triple(const Statement& statement);

  // Predicates unify on URI first, then on normalized label. A label match
  // without a URI adopts the new URI.
  NodeId ensure_predicate(std::string_view label,
                          const std::optional<std::string>& uri);
  // Resources unify on (normalized label, uri).
  NodeId ensure_resource(std::string_view label,
                         const std::optional<std::string>& uri);

  bool contains(const Statement& statement) const;
  bool remove_statement(const Statement& statement);

  // Drops resources and predicates no statement references. Returns the
  // number of nodes removed. Id counters are untouched.
  std::size_t compact();

  std::vector<Statement> statements_of(const NodeId& contribution) const;
  const std::vector<Statement>& statements() const { return statements_; }
  std::size_t statement_count() const { return statements_.size(); }

  const Paper* find_paper(const NodeId& id) const;
  const Contribution* find_contribution(const NodeId& id) const;
  const Resource* find_resource(const NodeId& id) const;
  const Predicate* find_predicate(const NodeId& id) const;

  // Lowest-numbered node carrying the URI.
  std::optional<NodeId> find_resource_by_uri(std::string_view uri) const;
  std::optional<NodeId> find_predicate_by_uri(std::string_view uri) const;

  std::optional<NodeId> find_paper_by_metadata(std::string_view key,
                                               std::string_view value) const;
  std::vector<NodeId> contributions_of(const NodeId& paper) const;

  const std::map<NodeId, Paper>& papers() const { return papers_; }
  const std::map<NodeId, Contribution>& contributions() const {
    return contributions_;
  }
  const std::map<NodeId, Resource>& resources() const { return resources_; }
  const std::map<NodeId, Predicate>& predicates() const { return predicates_; }
  const IdCounters& counters() const { return counters_; }

  // Display label of an object: resource/contribution label or literal value.
  std::string object_label(const Object& object) const;

  // Referential integrity, statement uniqueness and dedup soundness.
  bool check_integrity() const;

  // Rebuilds a graph from persisted parts; validates integrity and throws
  // Error(kParseError) on inconsistent input.
  static Graph restore(std::vector<Paper> papers,
                       std::vector<Contribution> contributions,
                       std::vector<Predicate> predicates,
                       std::vector<Resource> resources,
                       std::vector<Statement> statements, IdCounters counters);

 private:
  void require_contribution(const NodeId& id) const;
  bool node_exists(const NodeId& id) const;
  static std::string resource_key(std::string_view label,
                                  const std::optional<std::string>& uri);
  static std::string statement_key(const Statement& statement);

  std::map<NodeId, Paper> papers_;
  std::map<NodeId, Contribution> contributions_;
  std::map<NodeId, Resource> resources_;
  std::map<NodeId, Predicate> predicates_;

  std::vector<Statement> statements_;
  std::unordered_set<std::string> statement_keys_;
  std::unordered_map<NodeId, std::vector<Statement>, NodeIdHash> by_subject_;

  void reindex_resource_uris();

  std::unordered_map<std::string, NodeId> resource_index_;
  std::unordered_map<std::string, NodeId> resource_by_uri_;
  std::unordered_map<std::string, NodeId> predicate_by_label_;
  std::unordered_map<std::string, NodeId> predicate_by_uri_;

  IdCounters counters_;
};

}  // namespace assaykg

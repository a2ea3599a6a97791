#include "assaykg/ntriples.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "assaykg/error.hpp"

namespace assaykg {

void require_base_uri(std::string_view base_uri) {
  if (!is_absolute_uri(base_uri) || !base_uri.ends_with('/')) {
    throw Error(ErrorCode::kInvalidBaseUri,
                "base URI must be absolute and end with '/': " + std::string(base_uri));
  }
}

std::string escape_ntriples_string(std::string_view value) {
  std::string out;
  out.reserve(value.size() + 2);
  for (char c : value) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace {

std::string node_iri(const Graph& graph, const NodeId& id, std::string_view base) {
  if (const auto* r = graph.find_resource(id); r && r->uri) return *r->uri;
  if (const auto* p = graph.find_predicate(id); p && p->uri) return *p->uri;
  const std::string_view segment =
      id.kind() == NodeKind::kPredicate ? "predicate/" : "resource/";
  return std::string(base) + std::string(segment) + id.str();
}

std::string literal_term(const Literal& lit) {
  std::string out = "\"" + escape_ntriples_string(lit.value) + "\"";
  switch (lit.type) {
    case LiteralType::kString: break;
    case LiteralType::kInteger: out += "^^<" + std::string(kXsdInteger) + ">"; break;
    case LiteralType::kDecimal: out += "^^<" + std::string(kXsdDecimal) + ">"; break;
  }
  return out;
}

}  // namespace

std::vector<std::string> export_ntriples_lines(const Graph& graph,
                                               std::string_view base_uri) {
  require_base_uri(base_uri);
  std::vector<std::string> lines;
  lines.reserve(graph.statement_count());
  for (const auto& s : graph.statements()) {
    std::string line = "<" + node_iri(graph, s.subject, base_uri) + "> <" +
                       node_iri(graph, s.predicate, base_uri) + "> ";
    if (const auto* node = std::get_if<NodeId>(&s.object)) {
      line += "<" + node_iri(graph, *node, base_uri) + ">";
    } else {
      line += literal_term(std::get<Literal>(s.object));
    }
    line += " .";
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return lines;
}

std::string export_ntriples(const Graph& graph, std::string_view base_uri) {
  std::string out;
  for (const auto& line : export_ntriples_lines(graph, base_uri)) {
    out += line;
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : s_(line), line_no_(line_no) {}

  std::optional<NTriple> parse() {
    skip_ws();
    if (done() || peek() == '#') return std::nullopt;
    NTriple t;
    t.subject = term();
    if (t.subject.kind == NTriplesTerm::Kind::kLiteral) fail("subject cannot be a literal");
    require_ws();
    t.predicate = term();
    if (t.predicate.kind != NTriplesTerm::Kind::kIri) fail("predicate must be an IRI");
    require_ws();
    t.object = term();
    skip_ws();
    if (done() || peek() != '.') fail("expected '.'");
    ++pos_;
    skip_ws();
    if (!done() && peek() != '#') fail("unexpected trailing content");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_no_, msg + " at column " + std::to_string(pos_ + 1));
  }
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  void require_ws() {
    const auto before = pos_;
    skip_ws();
    // "<a><b>" is legal N-Triples; only terms that end ambiguously need space.
    if (pos_ == before && !done() && s_[pos_ - 1] != '>' && s_[pos_ - 1] != '"') {
      fail("expected whitespace");
    }
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  // After a backslash: \uXXXX or \UXXXXXXXX.
  std::uint32_t uchar() {
    const char kind = peek();
    const std::size_t len = kind == 'u' ? 4 : 8;
    ++pos_;
    if (pos_ + len > s_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + pos_ + len, cp, 16);
    if (ec != std::errc() || ptr != s_.data() + pos_ + len) fail("bad unicode escape");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid code point");
    pos_ += len;
    return cp;
  }

  std::string iri() {
    ++pos_;  // '<'
    std::string out;
    while (true) {
      if (done()) fail("unterminated IRI");
      const auto c = static_cast<unsigned char>(peek());
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        ++pos_;
        if (done() || (peek() != 'u' && peek() != 'U')) fail("bad escape in IRI");
        append_utf8(out, uchar());
        continue;
      }
      if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`') {
        fail("illegal character in IRI");
      }
      out.push_back(static_cast<char>(c));
      ++pos_;
    }
    if (!is_absolute_uri(out)) fail("IRI is not absolute");
    return out;
  }

  NTriplesTerm term() {
    if (done()) fail("unexpected end of line");
    NTriplesTerm t;
    if (peek() == '<') {
      t.kind = NTriplesTerm::Kind::kIri;
      t.value = iri();
    } else if (s_.substr(pos_, 2) == "_:") {
      t.kind = NTriplesTerm::Kind::kBlank;
      pos_ += 2;
      const auto start = pos_;
      while (!done() && peek() != ' ' && peek() != '\t' && peek() != '.') ++pos_;
      // A label may contain '.', but not end with it.
      while (!done() && peek() == '.' && pos_ + 1 < s_.size() && s_[pos_ + 1] != ' ' &&
             s_[pos_ + 1] != '\t') {
        ++pos_;
        while (!done() && peek() != ' ' && peek() != '\t' && peek() != '.') ++pos_;
      }
      t.value = std::string(s_.substr(start, pos_ - start));
      if (t.value.empty()) fail("empty blank node label");
    } else if (peek() == '"') {
      t.kind = NTriplesTerm::Kind::kLiteral;
      ++pos_;
      while (true) {
        if (done()) fail("unterminated string literal");
        const char c = peek();
        if (c == '"') {
          ++pos_;
          break;
        }
        if (c == '\n' || c == '\r') fail("raw line break in literal");
        if (c == '\\') {
          ++pos_;
          if (done()) fail("dangling escape");
          switch (peek()) {
            case 't': t.value.push_back('\t'); ++pos_; break;
            case 'b': t.value.push_back('\b'); ++pos_; break;
            case 'n': t.value.push_back('\n'); ++pos_; break;
            case 'r': t.value.push_back('\r'); ++pos_; break;
            case 'f': t.value.push_back('\f'); ++pos_; break;
            case '"': t.value.push_back('"'); ++pos_; break;
            case '\'': t.value.push_back('\''); ++pos_; break;
            case '\\': t.value.push_back('\\'); ++pos_; break;
            case 'u':
            case 'U': append_utf8(t.value, uchar()); break;
            default: fail("unknown escape");
          }
          continue;
        }
        t.value.push_back(c);
        ++pos_;
      }
      if (s_.substr(pos_, 2) == "^^") {
        pos_ += 2;
        if (done() || peek() != '<') fail("expected datatype IRI");
        t.datatype = iri();
      } else if (!done() && peek() == '@') {
        ++pos_;
        const auto start = pos_;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
          ++pos_;
        }
        t.language = std::string(s_.substr(start, pos_ - start));
        if (t.language.empty() ||
            !std::isalpha(static_cast<unsigned char>(t.language[0]))) {
          fail("bad language tag");
        }
      }
    } else {
      fail("expected IRI, blank node or literal");
    }
    return t;
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

// Resolves parsed terms to graph nodes, creating nodes as needed.
class Importer {
 public:
  Importer(Graph& graph, std::string_view base, ImportReport& report)
      : graph_(graph),
        resource_prefix_(std::string(base) + "resource/"),
        predicate_prefix_(std::string(base) + "predicate/"),
        report_(report) {}

  void apply(const NTriple& t, std::size_t line_no) {
    if (t.subject.kind == NTriplesTerm::Kind::kBlank ||
        t.object.kind == NTriplesTerm::Kind::kBlank) {
      throw ParseError(line_no, "blank nodes are not supported");
    }
    Statement s;
    s.subject = node(t.subject.value, line_no);
    s.predicate = predicate(t.predicate.value);
    if (t.object.kind == NTriplesTerm::Kind::kIri) {
      s.object = node(t.object.value, line_no);
    } else {
      s.object = literal(t.object, line_no);
    }
    if (graph_.contains(s)) {
      ++report_.duplicate_statements;
      return;
    }
    graph_.add_triple(s);
    ++report_.new_statements;
  }

 private:
  NodeId node(const std::string& iri, std::size_t line_no) {
    if (iri.starts_with(resource_prefix_)) {
      if (auto id = NodeId::parse(std::string_view(iri).substr(resource_prefix_.size()))) {
        if (id->kind() == NodeKind::kContribution && graph_.find_contribution(*id)) return *id;
        // Only a resource that exports under this very IRI; one carrying its
        // own URI merely shares the id with whatever minted this IRI.
        if (id->kind() == NodeKind::kResource) {
          if (const auto* r = graph_.find_resource(*id); r && !r->uri) return *id;
        }
        if (id->kind() == NodeKind::kPaper || id->kind() == NodeKind::kPredicate) {
          throw ParseError(line_no, "IRI names a node that cannot appear in a statement");
        }
      }
    }
    if (auto id = graph_.find_resource_by_uri(iri)) return *id;
    const auto id = graph_.ensure_resource(iri, iri);
    report_.created_resources.push_back(id);
    return id;
  }

  NodeId predicate(const std::string& iri) {
    if (iri.starts_with(predicate_prefix_)) {
      if (auto id = NodeId::parse(std::string_view(iri).substr(predicate_prefix_.size()));
          id && id->kind() == NodeKind::kPredicate) {
        if (const auto* p = graph_.find_predicate(*id); p && !p->uri) return *id;
      }
    }
    if (auto id = graph_.find_predicate_by_uri(iri)) return *id;
    const auto before = graph_.counters().predicate;
    const auto id = graph_.ensure_predicate(iri, iri);
    if (graph_.counters().predicate != before) report_.created_predicates.push_back(id);
    return id;
  }

  Literal literal(const NTriplesTerm& t, std::size_t line_no) {
    LiteralType type = LiteralType::kString;
    if (t.datatype == kXsdInteger) {
      type = LiteralType::kInteger;
    } else if (t.datatype == kXsdDecimal) {
      type = LiteralType::kDecimal;
    } else if (!t.datatype.empty() && t.datatype != kXsdString) {
      report_.warnings.push_back("line " + std::to_string(line_no) + ": datatype <" +
                                 t.datatype + "> stored as string");
    }
    if (!t.language.empty()) {
      report_.warnings.push_back("line " + std::to_string(line_no) +
                                 ": language tag @" + t.language + " dropped");
    }
    try {
      return Literal::make(t.value, type);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }

  Graph& graph_;
  std::string resource_prefix_;
  std::string predicate_prefix_;
  ImportReport& report_;
};

}  // namespace

std::optional<NTriple> parse_ntriples_line(std::string_view line, std::size_t line_no) {
  return LineParser(line, line_no).parse();
}

ImportReport import_ntriples(Graph& graph, std::istream& in, std::string_view base_uri,
                             const ImportOptions& options) {
  require_base_uri(base_uri);
  ImportReport report;
  Graph working;
  if (!options.partial_apply) working = graph;
  Graph& target = options.partial_apply ? graph : working;
  Importer importer(target, base_uri, report);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++report.lines;
    try {
      auto triple = parse_ntriples_line(line, line_no);
      if (!triple) continue;
      ++report.triples;
      importer.apply(*triple, line_no);
    } catch (const ParseError& e) {
      if (!options.partial_apply) throw;
      report.error_line = e.line();
      report.error = e.what();
      return report;
    } catch (const Error& e) {
      if (!options.partial_apply) throw ParseError(line_no, e.what());
      report.error_line = line_no;
      report.error = e.what();
      return report;
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failure while importing");
  if (!options.partial_apply) graph = std::move(working);
  return report;
}

}  // namespace assaykg

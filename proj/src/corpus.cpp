#include "assaykg/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "assaykg/error.hpp"

namespace assaykg {

using nlohmann::json;
using nlohmann::ordered_json;

Vocabulary::Vocabulary(const std::vector<std::string>& labels) {
  for (const auto& label : labels) {
    auto norm = normalize_label(label);
    if (!norm.empty()) entries_.insert(std::move(norm));
  }
}

bool Vocabulary::contains(std::string_view label) const {
  return entries_.contains(normalize_label(label));
}

const Vocabulary& default_type_vocabulary() {
  static const Vocabulary vocab({
      "protein-protein interaction", "hydrolase activity", "kinase activity",
      "protein-small molecule interaction", "viability",
      "beta lactamase reporter gene", "cytochrome P450 enzyme activity",
      "luciferase enzyme activity", "luciferase reporter gene",
      "oxidoreductase activity", "protein unfolding", "chaperone activity",
      "lyase activity", "transporter", "plasma membrane potential",
      "dye redistribution", "calcium redistribution", "apoptosis",
      "beta galactosidase reporter gene", "phosphatase activity",
      "cAMP redistribution", "IP1 redistribution", "cell morphology",
      "phosphorylation", "transferase activity", "isomerase activity",
      "protein redistribution", "radioligand binding", "signal transduction",
      "ion channel", "platelet activation",
      "fluorescent protein reporter gene", "protein-DNA interaction",
      "protease activity", "cell permeability", "protein stability",
      "protein-turnover", "localization", "organism behavior", "cytotoxicity",
      "cell growth",
  });
  return vocab;
}

const Vocabulary& default_format_vocabulary() {
  static const Vocabulary vocab({
      "cell-based format", "biochemical format", "tissue-based format",
      "organism-based format", "cell-free format", "subcellular format",
      "single protein format", "protein complex format",
      "physicochemical format", "cell membrane format",
      "whole-cell lysate format",
  });
  return vocab;
}

namespace {

const std::unordered_set<std::string> kTopLevelKeys = {
    "id", "title", "text", "statements", "assay_type", "assay_format"};
const std::unordered_set<std::string> kStatementKeys = {
    "property", "value", "property_uri", "value_uri"};

std::string pair_key(std::string_view property, std::string_view value) {
  return normalize_label(property) + " :: " + normalize_label(value);
}

bool is_blank(std::string_view line) {
  return normalize_label(line).empty();
}

// Reads an optional string member. Null counts as absent; any other
// non-string is reported and ignored.
std::optional<std::string> optional_string(const json& obj, const char* key,
                                           std::vector<std::string>& problems) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    problems.push_back(std::string("field '") + key + "' is not a string; ignored");
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<AnnotatedAssay> parse_record(const std::string& line,
                                           const CorpusOptions& options,
                                           std::vector<std::string>& problems) {
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded()) {
    problems.push_back("malformed JSON; record skipped");
    return std::nullopt;
  }
  if (!record.is_object()) {
    problems.push_back("record is not a JSON object; skipped");
    return std::nullopt;
  }
  for (const auto& [key, _] : record.items()) {
    if (!kTopLevelKeys.contains(key)) {
      problems.push_back("unknown key '" + key + "' ignored");
    }
  }

  AnnotatedAssay assay;
  auto id = record.find("id");
  if (id == record.end() || !id->is_string() ||
      is_blank(id->get_ref<const std::string&>())) {
    problems.push_back("missing or empty \"id\"; record skipped");
    return std::nullopt;
  }
  assay.id = id->get<std::string>();

  auto text = record.find("text");
  if (text == record.end() || !text->is_string()) {
    problems.push_back("missing \"text\"; record skipped");
    return std::nullopt;
  }
  assay.text = text->get<std::string>();
  if (is_blank(assay.text)) {
    problems.push_back("empty \"text\"; record skipped");
    return std::nullopt;
  }

  auto statements = record.find("statements");
  if (statements == record.end() || !statements->is_array()) {
    problems.push_back("missing \"statements\" array; record skipped");
    return std::nullopt;
  }

  assay.title = optional_string(record, "title", problems);
  assay.assay_type = optional_string(record, "assay_type", problems);
  assay.assay_format = optional_string(record, "assay_format", problems);
  if (assay.assay_type && options.types &&
      !options.types->contains(*assay.assay_type)) {
    problems.push_back("assay_type '" + *assay.assay_type +
                       "' not in type vocabulary");
  }
  if (assay.assay_format && options.formats &&
      !options.formats->contains(*assay.assay_format)) {
    problems.push_back("assay_format '" + *assay.assay_format +
                       "' not in format vocabulary");
  }

  std::unordered_set<std::string> seen;
  std::size_t index = 0;
  for (const auto& entry : *statements) {
    const std::string where = "statement " + std::to_string(index++);
    if (!entry.is_object()) {
      problems.push_back(where + " is not an object; skipped");
      continue;
    }
    auto prop = entry.find("property");
    auto value = entry.find("value");
    if (prop == entry.end() || value == entry.end() || !prop->is_string() ||
        !value->is_string() || is_blank(prop->get_ref<const std::string&>()) ||
        is_blank(value->get_ref<const std::string&>())) {
      problems.push_back(where + " lacks a nonempty property/value; skipped");
      continue;
    }
    for (const auto& [key, _] : entry.items()) {
      if (!kStatementKeys.contains(key)) {
        problems.push_back(where + ": unknown key '" + key + "' ignored");
      }
    }
    GoldStatement st;
    st.property = prop->get<std::string>();
    st.value = value->get<std::string>();
    std::vector<std::string> uri_problems;
    st.property_uri = optional_string(entry, "property_uri", uri_problems);
    st.value_uri = optional_string(entry, "value_uri", uri_problems);
    for (const auto* uri : {&st.property_uri, &st.value_uri}) {
      if (*uri && !is_absolute_uri(**uri)) {
        uri_problems.push_back("'" + **uri + "' is not an absolute URI");
      }
    }
    if (!uri_problems.empty()) {
      for (const auto& p : uri_problems) problems.push_back(where + ": " + p);
      problems.push_back(where + " skipped");
      continue;
    }
    if (!seen.insert(pair_key(st.property, st.value)).second) {
      problems.push_back(where + " duplicates (" + st.property + ", " +
                         st.value + "); collapsed");
      continue;
    }
    assay.statements.push_back(std::move(st));
  }
  return assay;
}

}  // namespace

CorpusParseResult parse_corpus(std::istream& in, const CorpusOptions& options) {
  if (!in) throw Error(ErrorCode::kUnreadableSource, "corpus stream not readable");
  CorpusParseResult result;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::vector<std::string> problems;
    auto assay = parse_record(line, options, problems);
    if (assay && !ids.insert(assay->id).second) {
      problems.push_back("duplicate assay id '" + assay->id + "'; record skipped");
      assay.reset();
    }
    for (auto& p : problems) result.warnings.push_back({line_no, std::move(p)});
    if (assay) result.assays.push_back(std::move(*assay));
  }
  if (in.bad()) {
    throw Error(ErrorCode::kUnreadableSource,
                "read failure after line " + std::to_string(line_no));
  }
  return result;
}

CorpusParseResult parse_corpus_file(const std::string& path,
                                    const CorpusOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableSource, "cannot open " + path);
  return parse_corpus(in, options);
}

std::string serialize_assay(const AnnotatedAssay& assay) {
  ordered_json record;
  record["id"] = assay.id;
  if (assay.title) record["title"] = *assay.title;
  record["text"] = assay.text;
  auto statements = ordered_json::array();
  for (const auto& st : assay.statements) {
    ordered_json entry;
    entry["property"] = st.property;
    entry["value"] = st.value;
    if (st.property_uri) entry["property_uri"] = *st.property_uri;
    if (st.value_uri) entry["value_uri"] = *st.value_uri;
    statements.push_back(std::move(entry));
  }
  record["statements"] = std::move(statements);
  if (assay.assay_type) record["assay_type"] = *assay.assay_type;
  if (assay.assay_format) record["assay_format"] = *assay.assay_format;
  return record.dump();
}

std::string serialize_corpus(const std::vector<AnnotatedAssay>& corpus) {
  std::string out;
  for (const auto& assay : corpus) {
    out += serialize_assay(assay);
    out.push_back('\n');
  }
  return out;
}

CorpusStats compute_stats(const std::vector<AnnotatedAssay>& corpus) {
  CorpusStats stats;
  stats.assay_count = corpus.size();
  std::set<std::string> types;
  std::set<std::string> formats;
  for (const auto& assay : corpus) {
    std::set<std::string> keys;
    for (const auto& st : assay.statements) {
      keys.insert(pair_key(st.property, st.value));
    }
    const std::size_t n = keys.size();
    stats.statements_total += n;
    stats.statements_min = std::min(stats.statements_min.value_or(n), n);
    stats.statements_max = std::max(stats.statements_max.value_or(n), n);
    for (auto& key : keys) ++stats.per_label_frequency[key];
    if (assay.assay_type && !is_blank(*assay.assay_type)) {
      types.insert(normalize_label(*assay.assay_type));
    }
    if (assay.assay_format && !is_blank(*assay.assay_format)) {
      formats.insert(normalize_label(*assay.assay_format));
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

std::pair<NodeId, NodeId> to_graph(const AnnotatedAssay& assay, Graph& graph) {
  NodeId paper;
  NodeId contribution;
  if (auto existing = graph.find_paper_by_metadata(kAssayIdKey, assay.id)) {
    paper = *existing;
    auto contributions = graph.contributions_of(paper);
    contribution = contributions.empty()
                       ? graph.create_contribution(paper, assay.id)
                       : contributions.front();
  } else {
    std::map<std::string, std::string> metadata{{std::string(kAssayIdKey), assay.id}};
    if (assay.assay_type) metadata["assay_type"] = *assay.assay_type;
    if (assay.assay_format) metadata["assay_format"] = *assay.assay_format;
    const bool has_title = assay.title && !is_blank(*assay.title);
    paper = graph.create_paper(has_title ? *assay.title : assay.id,
                               std::move(metadata));
    contribution = graph.create_contribution(paper, assay.id);
  }
  for (const auto& st : assay.statements) {
    try {
      graph.add_statement(contribution, st.property, st.property_uri, st.value,
                          st.value_uri);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDuplicateStatement) throw;
    }
  }
  return {paper, contribution};
}

}  // namespace assaykg

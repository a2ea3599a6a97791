#pragma once

// Brute-force reference computations, written without reusing the library's
// helpers so that agreement means something.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "assaykg/compare.hpp"
#include "assaykg/corpus.hpp"
#include "assaykg/graph.hpp"

namespace oracle {

std::string normalize(std::string_view s);

assaykg::CorpusStats recount(const std::vector<assaykg::AnnotatedAssay>& corpus);

// Rows grouped by normalized property label; valid when each label carries
// at most one URI.
assaykg::ComparisonTable comparison(const assaykg::Graph& graph,
                                    const std::vector<assaykg::NodeId>& contributions);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// "property :: value" keys of one contribution, recomputed from the raw
// statement list.
std::set<std::string> statement_keys(const assaykg::Graph& graph,
                                     const assaykg::NodeId& contribution);

std::vector<assaykg::SimilarityResult> exhaustive_similar(const assaykg::Graph& graph,
                                                          const assaykg::NodeId& query,
                                                          std::size_t k);

// W3C N-Triples line shape, IRIs and literals only.
bool valid_ntriples_line(const std::string& line);

}  // namespace oracle

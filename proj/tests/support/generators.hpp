#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "assaykg/corpus.hpp"
#include "assaykg/graph.hpp"
#include "assaykg/semantifier.hpp"

namespace testgen {

std::string fixture(const std::string& name);

// Fresh empty directory under the system temp dir.
std::string temp_dir(const std::string& tag);

// Up to max_assays assays with messy labels: case and whitespace variants,
// repeated pairs, optional types and formats.
std::vector<assaykg::AnnotatedAssay> random_corpus(std::mt19937_64& rng,
                                                   std::size_t max_assays);

// Every label owns a marker token that appears in exactly the texts of its
// positive assays; the rest of each text is drawn from a shared filler pool.
std::vector<assaykg::AnnotatedAssay> separable_corpus(std::size_t assays,
                                                      std::size_t labels,
                                                      std::size_t labels_per_assay,
                                                      std::uint64_t seed,
                                                      std::size_t filler_words = 15,
                                                      std::size_t marker_repeats = 1);

struct RandomGraph {
  assaykg::Graph graph;
  std::vector<assaykg::NodeId> contributions;
};

// One URI per property label so predicate grouping reduces to the label.
RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_contributions,
                         std::size_t max_properties);

std::vector<assaykg::Prediction> random_predictions(std::mt19937_64& rng,
                                                    std::size_t max_count);

assaykg::StatementLabel label(const std::string& property, const std::string& value);

}  // namespace testgen

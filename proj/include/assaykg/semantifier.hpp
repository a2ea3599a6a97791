#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "assaykg/corpus.hpp"
#include "assaykg/kernels.hpp"

namespace assaykg {

// Lowercased alphanumeric runs of length >= 2, followed by the bigrams of
// adjacent surviving tokens joined with '_'.
std::vector<std::string> tokenize(std::string_view text);

inline constexpr std::string_view kLabelSeparator = " :: ";

// One predictable statement: a normalized (property, value) pair. The
// contribution is the implicit subject.
class StatementLabel {
 public:
  // Normalizes both parts. Throws kEmptyLabel on an empty part and
  // kInvalidArgument if a part contains the key separator.
  static StatementLabel make(std::string_view property, std::string_view value);
  // Inverse of key(); nullopt if the key does not split cleanly.
  static std::optional<StatementLabel> from_key(std::string_view key);

  const std::string& property() const { return property_; }
  const std::string& value() const { return value_; }
  std::string key() const;

  friend bool operator==(const StatementLabel&, const StatementLabel&) = default;
  friend auto operator<=>(const StatementLabel&, const StatementLabel&) = default;

 private:
  StatementLabel(std::string property, std::string value)
      : property_(std::move(property)), value_(std::move(value)) {}

  std::string property_;
  std::string value_;
};

// Properties never learned or predicted: title, identifiers, dates and
// unit/value bookkeeping.
const std::set<std::string>& default_omitted_properties();

class LabelSpace {
 public:
  LabelSpace() = default;
  // Throws kInvalidArgument on a duplicate label or one whose property is
  // omitted.
  LabelSpace(std::vector<StatementLabel> labels,
             std::set<std::string> omitted_properties);

  const std::vector<StatementLabel>& labels() const { return labels_; }
  const std::set<std::string>& omitted_properties() const { return omitted_; }
  std::size_t size() const { return labels_.size(); }
  bool is_omitted(std::string_view property) const;
  std::optional<std::size_t> index_of(const StatementLabel& label) const;

 private:
  std::vector<StatementLabel> labels_;
  std::set<std::string> omitted_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Gold labels of one assay after dropping omitted properties and pairs that
// cannot form a label. First-seen order, no duplicates.
std::vector<StatementLabel> gold_labels(const AnnotatedAssay& assay,
                                        const std::set<std::string>& omitted);

LabelSpace build_label_space(const std::vector<AnnotatedAssay>& corpus,
                             const std::set<std::string>& omitted_properties,
                             std::size_t min_frequency);

struct TrainConfig {
  std::uint64_t seed = 0;
  // Fraction of the corpus held out to calibrate thresholds, in [0, 1).
  double calibration_split = 0.2;
  double default_threshold = 0.30;
  // Labels with fewer calibration positives keep default_threshold.
  std::size_t min_calibration_positives = 3;
  std::string timestamp;
};

struct TrainingMetadata {
  std::size_t corpus_size = 0;
  std::size_t training_size = 0;
  std::size_t calibration_size = 0;
  std::uint64_t seed = 0;
  double calibration_split = 0.0;
  std::string timestamp;

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

struct Prediction {
  StatementLabel label;
  double score = 0.0;
  bool accepted_by_threshold = false;
};

// Text -> per-label score backbone. Scores lie in [0, 1]; nullopt means the
// text carries no usable signal.
class LabelScorer {
 public:
  virtual ~LabelScorer() = default;
  virtual const LabelSpace& label_space() const = 0;
  virtual double threshold(std::size_t label) const = 0;
  virtual std::optional<std::vector<double>> score(std::string_view text) const = 0;
};

// TF-IDF document vectors scored against per-label L2-normalized centroids.
class TrainedModel final : public LabelScorer {
 public:
  TrainedModel(LabelSpace label_space, std::vector<std::string> vocabulary,
               std::vector<std::uint32_t> document_frequency,
               std::size_t document_count,
               std::vector<kernels::SparseVector> centroids,
               std::vector<double> thresholds, TrainingMetadata metadata);

  const LabelSpace& label_space() const override { return label_space_; }
  double threshold(std::size_t label) const override { return thresholds_[label]; }
  // (1 + cos) / 2 against every centroid.
  std::optional<std::vector<double>> score(std::string_view text) const override;

  // L2-normalized TF-IDF vector; empty when no token is in the vocabulary.
  kernels::SparseVector vectorize(std::string_view text) const;

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<std::uint32_t>& document_frequency() const {
    return document_frequency_;
  }
  std::size_t document_count() const { return document_count_; }
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<kernels::SparseVector>& centroids() const { return centroids_; }
  const std::vector<double>& thresholds() const { return thresholds_; }
  const TrainingMetadata& metadata() const { return metadata_; }

  // Equality of everything learned (label space, vocabulary, centroids,
  // thresholds); metadata is ignored.
  bool same_parameters(const TrainedModel& other) const;

 private:
  LabelSpace label_space_;
  std::vector<std::string> vocabulary_;
  std::vector<std::uint32_t> document_frequency_;
  std::size_t document_count_;
  std::vector<kernels::SparseVector> centroids_;
  std::vector<double> thresholds_;
  TrainingMetadata metadata_;

  std::unordered_map<std::string, std::uint32_t> token_index_;
  std::vector<double> idf_;
};

struct TrainOutput {
  TrainedModel model;
  std::vector<std::string> warnings;
};

TrainOutput train(const std::vector<AnnotatedAssay>& corpus,
                  const LabelSpace& label_space, const TrainConfig& config);

// Top-k labels by score (ties keep label-space order), each flagged against
// its threshold. Throws kEmptyText on blank text and kInvalidArgument when
// top_k is 0; returns nothing when the text has no in-vocabulary token.
std::vector<Prediction> predict(const LabelScorer& scorer, std::string_view text,
                                std::size_t top_k);

// predict() over many texts; documents are scored in parallel.
std::vector<std::vector<Prediction>> predict_batch(
    const LabelScorer& scorer, const std::vector<std::string>& texts,
    std::size_t top_k);

struct SetMetrics {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision is 0 with no predictions; recall is 0 with no gold labels.
SetMetrics set_metrics(std::size_t true_positives, std::size_t predicted,
                       std::size_t gold);

struct AssayOutcome {
  std::string assay_id;
  std::vector<std::string> gold_keys;
  std::vector<std::string> accepted_keys;
};

struct AssayEvaluation {
  std::string assay_id;
  SetMetrics metrics;
  std::vector<std::string> matched;
  // Accepted predictions absent from gold: candidates for human review.
  std::vector<std::string> unmatched_accepted;
  std::vector<std::string> missed_gold;
};

struct EvaluationReport {
  SetMetrics micro;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::size_t macro_assays = 0;
  std::vector<AssayEvaluation> assays;
};

EvaluationReport evaluate_outcomes(const std::vector<AssayOutcome>& outcomes);

EvaluationReport evaluate(const LabelScorer& scorer,
                          const std::vector<AnnotatedAssay>& gold_corpus);

struct HoldoutResult {
  EvaluationReport report;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t label_count = 0;
  std::vector<std::string> warnings;
};

// Seeded train/test split, label space built on the training part only.
HoldoutResult evaluate_holdout(const std::vector<AnnotatedAssay>& corpus,
                               double test_split, std::size_t min_frequency,
                               const TrainConfig& config);

inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// Seeded Fisher-Yates permutation of 0..n-1 (mt19937_64, portable).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace assaykg

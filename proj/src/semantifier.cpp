#include "assaykg/semantifier.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "assaykg/error.hpp"

namespace assaykg {

using nlohmann::json;

namespace {

bool is_token_byte(unsigned char c) {
  return c >= 0x80 || std::isalnum(c);
}

bool is_blank(std::string_view text) { return normalize_label(text).empty(); }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> unigrams;
  std::string current;
  auto flush = [&] {
    if (current.size() > 1) unigrams.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else {
      flush();
    }
  }
  flush();
  std::vector<std::string> tokens = unigrams;
  for (std::size_t i = 0; i + 1 < unigrams.size(); ++i) {
    tokens.push_back(unigrams[i] + "_" + unigrams[i + 1]);
  }
  return tokens;
}

// ---------------------------------------------------------------------------

StatementLabel StatementLabel::make(std::string_view property,
                                    std::string_view value) {
  auto p = normalize_label(property);
  auto v = normalize_label(value);
  if (p.empty() || v.empty()) {
    throw Error(ErrorCode::kEmptyLabel, "statement label parts must be nonempty");
  }
  if (p.find(kLabelSeparator) != std::string::npos ||
      v.find(kLabelSeparator) != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "label part contains the reserved separator \" :: \"");
  }
  return StatementLabel(std::move(p), std::move(v));
}

std::optional<StatementLabel> StatementLabel::from_key(std::string_view key) {
  const auto pos = key.find(kLabelSeparator);
  if (pos == std::string_view::npos) return std::nullopt;
  try {
    auto label = make(key.substr(0, pos), key.substr(pos + kLabelSeparator.size()));
    if (label.key() != key) return std::nullopt;
    return label;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string StatementLabel::key() const {
  std::string out = property_;
  out += kLabelSeparator;
  out += value_;
  return out;
}

const std::set<std::string>& default_omitted_properties() {
  static const std::set<std::string> omitted = {
      "has title", "pubchem aid", "deposit date", "has incubation time value",
      "has concentration unit"};
  return omitted;
}

LabelSpace::LabelSpace(std::vector<StatementLabel> labels,
                       std::set<std::string> omitted_properties)
    : labels_(std::move(labels)) {
  for (const auto& p : omitted_properties) omitted_.insert(normalize_label(p));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (omitted_.contains(labels_[i].property())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label '" + labels_[i].key() + "' uses an omitted property");
    }
    if (!index_.emplace(labels_[i].key(), i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate label '" + labels_[i].key() + "'");
    }
  }
}

bool LabelSpace::is_omitted(std::string_view property) const {
  return omitted_.contains(normalize_label(property));
}

std::optional<std::size_t> LabelSpace::index_of(const StatementLabel& label) const {
  auto it = index_.find(label.key());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<StatementLabel> gold_labels(const AnnotatedAssay& assay,
                                        const std::set<std::string>& omitted) {
  std::vector<StatementLabel> out;
  std::set<std::string> seen;
  for (const auto& st : assay.statements) {
    if (omitted.contains(normalize_label(st.property))) continue;
    try {
      auto label = StatementLabel::make(st.property, st.value);
      if (seen.insert(label.key()).second) out.push_back(std::move(label));
    } catch (const Error&) {
      // Pairs that cannot form a label are not learnable targets.
    }
  }
  return out;
}

LabelSpace build_label_space(const std::vector<AnnotatedAssay>& corpus,
                             const std::set<std::string>& omitted_properties,
                             std::size_t min_frequency) {
  if (min_frequency < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_frequency must be >= 1");
  }
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
  std::set<std::string> omitted;
  for (const auto& p : omitted_properties) omitted.insert(normalize_label(p));

  std::vector<StatementLabel> order;
  std::unordered_map<std::string, std::size_t> frequency;
  for (const auto& assay : corpus) {
    for (auto& label : gold_labels(assay, omitted)) {
      if (frequency[label.key()]++ == 0) order.push_back(std::move(label));
    }
  }
  std::vector<StatementLabel> kept;
  for (auto& label : order) {
    if (frequency[label.key()] >= min_frequency) kept.push_back(std::move(label));
  }
  return LabelSpace(std::move(kept), std::move(omitted));
}

// ---------------------------------------------------------------------------

TrainedModel::TrainedModel(LabelSpace label_space,
                           std::vector<std::string> vocabulary,
                           std::vector<std::uint32_t> document_frequency,
                           std::size_t document_count,
                           std::vector<kernels::SparseVector> centroids,
                           std::vector<double> thresholds,
                           TrainingMetadata metadata)
    : label_space_(std::move(label_space)),
      vocabulary_(std::move(vocabulary)),
      document_frequency_(std::move(document_frequency)),
      document_count_(document_count),
      centroids_(std::move(centroids)),
      thresholds_(std::move(thresholds)),
      metadata_(std::move(metadata)) {
  if (vocabulary_.size() != document_frequency_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary/df size mismatch");
  }
  if (centroids_.size() != label_space_.size() ||
      thresholds_.size() != label_space_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "every label needs one centroid and one threshold");
  }
  for (double t : thresholds_) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "threshold outside (0, 1]");
    }
  }
  for (const auto& c : centroids_) {
    if (c.indices.size() != c.values.size()) {
      throw Error(ErrorCode::kInvalidArgument, "malformed centroid");
    }
    for (std::size_t i = 0; i < c.indices.size(); ++i) {
      if (c.indices[i] >= vocabulary_.size() ||
          (i > 0 && c.indices[i] <= c.indices[i - 1])) {
        throw Error(ErrorCode::kInvalidArgument, "centroid index out of order");
      }
    }
  }
  idf_.reserve(vocabulary_.size());
  const double n = static_cast<double>(document_count_);
  for (std::uint32_t i = 0; i < vocabulary_.size(); ++i) {
    if (!token_index_.emplace(vocabulary_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary token");
    }
    const double df = document_frequency_[i];
    idf_.push_back(std::log((n + 1.0) / (df + 1.0)) + 1.0);
  }
}

kernels::SparseVector TrainedModel::vectorize(std::string_view text) const {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& token : tokenize(text)) {
    if (auto it = token_index_.find(token); it != token_index_.end()) {
      ++counts[it->second];
    }
  }
  kernels::SparseVector v;
  v.indices.reserve(counts.size());
  v.values.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    v.indices.push_back(index);
    v.values.push_back(static_cast<double>(count) * idf_[index]);
  }
  kernels::l2_normalize(v);
  return v;
}

std::optional<std::vector<double>> TrainedModel::score(std::string_view text) const {
  const auto doc = vectorize(text);
  if (doc.empty()) return std::nullopt;
  std::vector<double> scores(centroids_.size());
  kernels::dot_scores_serial(doc, centroids_, scores);
  for (double& s : scores) s = std::clamp((1.0 + s) / 2.0, 0.0, 1.0);
  return scores;
}

bool TrainedModel::same_parameters(const TrainedModel& other) const {
  return label_space_.labels() == other.label_space_.labels() &&
         label_space_.omitted_properties() ==
             other.label_space_.omitted_properties() &&
         vocabulary_ == other.vocabulary_ &&
         document_frequency_ == other.document_frequency_ &&
         document_count_ == other.document_count_ &&
         centroids_ == other.centroids_ && thresholds_ == other.thresholds_;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(engine() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

namespace {

// Highest-F1 threshold over the calibration scores of one label. Ties go to
// the lower threshold; the result sits halfway to the next lower score so
// unseen documents near the boundary are not lost to rounding.
std::optional<double> calibrate_threshold(const std::vector<double>& scores,
                                          const std::vector<bool>& positive,
                                          std::size_t positives) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  double best_f1 = 0.0;
  std::optional<double> best;
  double below_best = -1.0;  // next lower score, -1 when none
  std::size_t predicted = 0;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    if (t < 0.0) break;  // no signal: never accepted
    while (i < order.size() && scores[order[i]] == t) {
      ++predicted;
      if (positive[order[i]]) ++tp;
      ++i;
    }
    const double f1 = 2.0 * static_cast<double>(tp) /
                      static_cast<double>(predicted + positives);
    if (f1 > 0.0 && f1 >= best_f1) {
      best_f1 = f1;
      best = t;
      below_best = i < order.size() ? scores[order[i]] : -1.0;
    }
  }
  if (!best) return std::nullopt;
  return below_best >= 0.0 ? (*best + below_best) / 2.0 : *best;
}

}  // namespace

TrainOutput train(const std::vector<AnnotatedAssay>& corpus,
                  const LabelSpace& label_space, const TrainConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
  for (const auto& assay : corpus) {
    if (is_blank(assay.text)) {
      throw Error(ErrorCode::kEmptyText, "assay '" + assay.id + "' has empty text");
    }
  }
  if (!(config.calibration_split >= 0.0 && config.calibration_split < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "calibration_split must be in [0, 1)");
  }
  if (!(config.default_threshold > 0.0 && config.default_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "default_threshold must be in (0, 1]");
  }

  const std::size_t n = corpus.size();
  const auto perm = seeded_permutation(n, config.seed);
  std::size_t n_cal = static_cast<std::size_t>(
      std::floor(config.calibration_split * static_cast<double>(n)));
  n_cal = std::min(n_cal, n - 1);
  std::vector<std::size_t> cal_idx(perm.begin(), perm.begin() + n_cal);
  std::vector<std::size_t> train_idx(perm.begin() + n_cal, perm.end());
  std::sort(cal_idx.begin(), cal_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  // Label membership per assay.
  std::vector<std::vector<std::size_t>> assay_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& label : gold_labels(corpus[i], label_space.omitted_properties())) {
      if (auto idx = label_space.index_of(label)) assay_labels[i].push_back(*idx);
    }
  }

  // Vocabulary and document frequencies over the training texts.
  std::map<std::string, std::uint32_t> df;
  std::vector<std::vector<std::string>> train_tokens;
  train_tokens.reserve(train_idx.size());
  for (std::size_t i : train_idx) {
    auto tokens = tokenize(corpus[i].text);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
    train_tokens.push_back(std::move(tokens));
  }
  std::vector<std::string> vocabulary;
  std::vector<std::uint32_t> frequencies;
  for (auto& [token, count] : df) {
    vocabulary.push_back(token);
    frequencies.push_back(count);
  }

  // A provisional model carries the vocabulary so vectorize() can be shared.
  const TrainedModel vectorizer(LabelSpace({}, label_space.omitted_properties()),
                                vocabulary, frequencies, train_idx.size(), {}, {},
                                {});
  std::vector<kernels::SparseVector> train_vectors;
  train_vectors.reserve(train_idx.size());
  for (std::size_t i : train_idx) train_vectors.push_back(vectorizer.vectorize(corpus[i].text));

  TrainOutput out{vectorizer, {}};
  std::vector<std::map<std::uint32_t, double>> sums(label_space.size());
  std::vector<std::size_t> positive_count(label_space.size(), 0);
  for (std::size_t k = 0; k < train_idx.size(); ++k) {
    for (std::size_t label : assay_labels[train_idx[k]]) {
      ++positive_count[label];
      const auto& v = train_vectors[k];
      for (std::size_t j = 0; j < v.indices.size(); ++j) {
        sums[label][v.indices[j]] += v.values[j];
      }
    }
  }

  std::vector<StatementLabel> kept_labels;
  std::vector<std::size_t> kept_source;
  std::vector<kernels::SparseVector> centroids;
  for (std::size_t l = 0; l < label_space.size(); ++l) {
    kernels::SparseVector c;
    for (const auto& [index, value] : sums[l]) {
      c.indices.push_back(index);
      c.values.push_back(value);
    }
    kernels::l2_normalize(c);
    if (positive_count[l] == 0 || c.empty()) {
      out.warnings.push_back("DegenerateLabel: '" + label_space.labels()[l].key() +
                             "' has no training positives; dropped");
      continue;
    }
    kept_labels.push_back(label_space.labels()[l]);
    kept_source.push_back(l);
    centroids.push_back(std::move(c));
  }

  std::vector<double> thresholds(centroids.size(), config.default_threshold);
  if (!cal_idx.empty() && !centroids.empty()) {
    std::vector<kernels::SparseVector> cal_vectors;
    for (std::size_t i : cal_idx) cal_vectors.push_back(vectorizer.vectorize(corpus[i].text));
    const auto dots = kernels::dot_matrix_parallel(cal_vectors, centroids);
    const std::size_t cols = centroids.size();
    for (std::size_t c = 0; c < cols; ++c) {
      std::vector<double> scores(cal_idx.size());
      std::vector<bool> positive(cal_idx.size(), false);
      std::size_t positives = 0;
      for (std::size_t r = 0; r < cal_idx.size(); ++r) {
        scores[r] = cal_vectors[r].empty() ? -1.0 : (1.0 + dots[r * cols + c]) / 2.0;
        const auto& labels = assay_labels[cal_idx[r]];
        if (std::find(labels.begin(), labels.end(), kept_source[c]) != labels.end()) {
          positive[r] = true;
          ++positives;
        }
      }
      if (positives < config.min_calibration_positives) continue;
      if (auto t = calibrate_threshold(scores, positive, positives)) {
        thresholds[c] = std::clamp(*t, 1e-9, 1.0);
      }
    }
  }

  TrainingMetadata metadata{n, train_idx.size(), cal_idx.size(), config.seed,
                            config.calibration_split, config.timestamp};
  out.model = TrainedModel(LabelSpace(std::move(kept_labels), label_space.omitted_properties()),
                           std::move(vocabulary), std::move(frequencies),
                           train_idx.size(), std::move(centroids),
                           std::move(thresholds), std::move(metadata));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Prediction> predict(const LabelScorer& scorer, std::string_view text,
                                std::size_t top_k) {
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  if (is_blank(text)) throw Error(ErrorCode::kEmptyText, "text is empty");
  const auto scores = scorer.score(text);
  if (!scores) return {};
  const auto& labels = scorer.label_space().labels();
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (*scores)[a] > (*scores)[b];
  });
  order.resize(std::min(top_k, order.size()));
  std::vector<Prediction> out;
  out.reserve(order.size());
  for (std::size_t i : order) {
    const double s = (*scores)[i];
    out.push_back(Prediction{labels[i], s, s >= scorer.threshold(i)});
  }
  return out;
}

std::vector<std::vector<Prediction>> predict_batch(
    const LabelScorer& scorer, const std::vector<std::string>& texts,
    std::size_t top_k) {
  std::vector<std::vector<Prediction>> out(texts.size());
  std::vector<std::exception_ptr> errors(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = predict(scorer, texts[i], top_k);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SetMetrics set_metrics(std::size_t true_positives, std::size_t predicted,
                       std::size_t gold) {
  SetMetrics m{true_positives, predicted, gold, 0.0, 0.0, 0.0};
  if (predicted > 0) m.precision = static_cast<double>(true_positives) / predicted;
  if (gold > 0) m.recall = static_cast<double>(true_positives) / gold;
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

EvaluationReport evaluate_outcomes(const std::vector<AssayOutcome>& outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::kEmptyCorpus, "nothing to evaluate");
  EvaluationReport report;
  std::size_t tp = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  for (const auto& outcome : outcomes) {
    AssayEvaluation detail;
    detail.assay_id = outcome.assay_id;
    std::vector<std::string> gold_keys;
    std::set<std::string> gold_set;
    for (const auto& k : outcome.gold_keys) {
      if (gold_set.insert(k).second) gold_keys.push_back(k);
    }
    std::set<std::string> accepted_set;
    for (const auto& k : outcome.accepted_keys) {
      if (!accepted_set.insert(k).second) continue;
      (gold_set.contains(k) ? detail.matched : detail.unmatched_accepted).push_back(k);
    }
    for (const auto& k : gold_keys) {
      if (!accepted_set.contains(k)) detail.missed_gold.push_back(k);
    }
    detail.metrics =
        set_metrics(detail.matched.size(), accepted_set.size(), gold_set.size());
    tp += detail.metrics.true_positives;
    predicted += detail.metrics.predicted;
    gold += detail.metrics.gold;
    if (detail.metrics.gold > 0) {
      report.macro_precision += detail.metrics.precision;
      report.macro_recall += detail.metrics.recall;
      report.macro_f1 += detail.metrics.f1;
      ++report.macro_assays;
    }
    report.assays.push_back(std::move(detail));
  }
  report.micro = set_metrics(tp, predicted, gold);
  if (report.macro_assays > 0) {
    const double m = static_cast<double>(report.macro_assays);
    report.macro_precision /= m;
    report.macro_recall /= m;
    report.macro_f1 /= m;
  }
  return report;
}

EvaluationReport evaluate(const LabelScorer& scorer,
                          const std::vector<AnnotatedAssay>& gold_corpus) {
  if (gold_corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "gold corpus is empty");
  const auto& space = scorer.label_space();
  std::vector<std::vector<Prediction>> predictions(gold_corpus.size());
  if (space.size() > 0) {
    std::vector<std::string> texts;
    texts.reserve(gold_corpus.size());
    for (const auto& a : gold_corpus) texts.push_back(a.text);
    predictions = predict_batch(scorer, texts, space.size());
  }
  std::vector<AssayOutcome> outcomes;
  outcomes.reserve(gold_corpus.size());
  for (std::size_t i = 0; i < gold_corpus.size(); ++i) {
    AssayOutcome o;
    o.assay_id = gold_corpus[i].id;
    for (const auto& label : gold_labels(gold_corpus[i], space.omitted_properties())) {
      o.gold_keys.push_back(label.key());
    }
    for (const auto& p : predictions[i]) {
      if (p.accepted_by_threshold) o.accepted_keys.push_back(p.label.key());
    }
    outcomes.push_back(std::move(o));
  }
  return evaluate_outcomes(outcomes);
}

HoldoutResult evaluate_holdout(const std::vector<AnnotatedAssay>& corpus,
                               double test_split, std::size_t min_frequency,
                               const TrainConfig& config) {
  if (corpus.size() < 2) {
    throw Error(ErrorCode::kEmptyCorpus, "holdout needs at least two assays");
  }
  if (!(test_split > 0.0 && test_split < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split must be in (0, 1)");
  }
  const auto perm = seeded_permutation(corpus.size(), config.seed);
  std::size_t n_test = static_cast<std::size_t>(
      std::floor(test_split * static_cast<double>(corpus.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, corpus.size() - 1);
  std::vector<std::size_t> test_idx(perm.begin(), perm.begin() + n_test);
  std::vector<std::size_t> train_idx(perm.begin() + n_test, perm.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::vector<AnnotatedAssay> train_set;
  std::vector<AnnotatedAssay> test_set;
  for (std::size_t i : train_idx) train_set.push_back(corpus[i]);
  for (std::size_t i : test_idx) test_set.push_back(corpus[i]);

  const auto space =
      build_label_space(train_set, default_omitted_properties(), min_frequency);
  auto trained = train(train_set, space, config);
  HoldoutResult result;
  result.report = evaluate(trained.model, test_set);
  result.train_size = train_set.size();
  result.test_size = test_set.size();
  result.label_count = trained.model.label_space().size();
  result.warnings = std::move(trained.warnings);
  return result;
}

// ---------------------------------------------------------------------------

std::string serialize_model(const TrainedModel& model) {
  json doc;
  doc["format"] = "assaykg-model";
  doc["format_version"] = kModelFormatVersion;
  auto labels = json::array();
  for (const auto& l : model.label_space().labels()) {
    labels.push_back({l.property(), l.value()});
  }
  doc["labels"] = std::move(labels);
  doc["omitted_properties"] = model.label_space().omitted_properties();
  auto vocab = json::array();
  for (std::size_t i = 0; i < model.vocabulary().size(); ++i) {
    vocab.push_back({model.vocabulary()[i], model.document_frequency()[i]});
  }
  doc["vocabulary"] = std::move(vocab);
  doc["document_count"] = model.document_count();
  auto centroids = json::array();
  for (const auto& c : model.centroids()) {
    centroids.push_back({{"indices", c.indices}, {"values", c.values}});
  }
  doc["centroids"] = std::move(centroids);
  doc["thresholds"] = model.thresholds();
  const auto& m = model.metadata();
  doc["metadata"] = {{"corpus_size", m.corpus_size},
                     {"training_size", m.training_size},
                     {"calibration_size", m.calibration_size},
                     {"seed", m.seed},
                     {"calibration_split", m.calibration_split},
                     {"timestamp", m.timestamp}};
  return doc.dump(1) + "\n";
}

TrainedModel deserialize_model(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kParseError, "model file is not valid JSON");
  }
  if (doc.value("format", "") != "assaykg-model") {
    throw Error(ErrorCode::kParseError, "not an assaykg model file");
  }
  if (!doc.contains("format_version") || doc["format_version"] != kModelFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported model format version " + doc.value("format_version", json()).dump());
  }
  try {
    std::vector<StatementLabel> labels;
    for (const auto& l : doc.at("labels")) {
      labels.push_back(StatementLabel::make(l.at(0).get<std::string>(),
                                            l.at(1).get<std::string>()));
    }
    LabelSpace space(std::move(labels),
                     doc.at("omitted_properties").get<std::set<std::string>>());
    std::vector<std::string> vocab;
    std::vector<std::uint32_t> df;
    for (const auto& v : doc.at("vocabulary")) {
      vocab.push_back(v.at(0).get<std::string>());
      df.push_back(v.at(1).get<std::uint32_t>());
    }
    std::vector<kernels::SparseVector> centroids;
    for (const auto& c : doc.at("centroids")) {
      centroids.push_back({c.at("indices").get<std::vector<std::uint32_t>>(),
                           c.at("values").get<std::vector<double>>()});
    }
    const auto& m = doc.at("metadata");
    TrainingMetadata meta{m.at("corpus_size").get<std::size_t>(),
                          m.at("training_size").get<std::size_t>(),
                          m.at("calibration_size").get<std::size_t>(),
                          m.at("seed").get<std::uint64_t>(),
                          m.at("calibration_split").get<double>(),
                          m.at("timestamp").get<std::string>()};
    return TrainedModel(std::move(space), std::move(vocab), std::move(df),
                        doc.at("document_count").get<std::size_t>(),
                        std::move(centroids),
                        doc.at("thresholds").get<std::vector<double>>(),
                        std::move(meta));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed model: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, std::string("invalid model: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
  out << serialize_model(model);
  if (!out.flush()) throw Error(ErrorCode::kIoFailure, "write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

}  // namespace assaykg

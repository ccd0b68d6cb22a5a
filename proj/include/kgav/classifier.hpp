#pragma once

// Scoring (question, answer-text) pairs as correct/incorrect.
//
// BaselineModel is a hashed n-gram logistic regression trained by SGD; it
// stands in for a fine-tuned transformer, which is reachable through
// RemoteScorer instead. Both sit behind the Scorer interface so evaluation
// does not care which one produced a score.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgav/dataset.hpp"

namespace kgav::classifier {

using dataset::Label;
using dataset::LabeledQAPair;

inline constexpr std::uint32_t kDefaultDimension = 1u << 18;
inline constexpr double kDefaultThreshold = 0.5;

struct QAInput {
  std::string question;
  std::string answer;
};

struct PairScore {
  double score = 0.0;  ///< probability that the answer is correct
  Label label = Label::incorrect;
};

/// label == correct iff score >= threshold.
PairScore apply_threshold(double score, double threshold = kDefaultThreshold);

class Scorer {
 public:
  virtual ~Scorer() = default;
  /// One score in [0,1] per input, same order.
  virtual std::vector<double> score_batch(std::span<const QAInput> inputs) const = 0;
  virtual std::string describe() const = 0;

  double score(std::string_view question, std::string_view answer) const;
};

// ---- features ----------------------------------------------------------

/// Sorted by index, no duplicate indices, L2-normalised.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::size_t nonzero() const noexcept { return entries.size(); }
};

/// Lowercased word unigrams and bigrams plus character trigrams of each
/// side ("q:", "a:"), word crosses between the sides ("qa:"), and shared-word
/// indicators, signed-hashed into `dimension` buckets (a power of two).
SparseVector featurize(std::string_view question, std::string_view answer,
                       std::uint32_t dimension = kDefaultDimension);

/// Raw feature strings before hashing; exposed for inspection and tests.
std::vector<std::string> feature_strings(std::string_view question, std::string_view answer);

std::vector<std::string> tokenize(std::string_view text);

// ---- baseline model ----------------------------------------------------

struct Hyperparams {
  int epochs = 5;
  double learning_rate = 0.5;
  double l2 = 1e-6;
  std::uint32_t dimension = kDefaultDimension;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  double l2 = 0.0;
  std::size_t examples = 0;
  std::vector<double> epoch_loss;
  /// JSON text of the run configuration that produced the model; may be empty.
  std::string run_config;
};

class BaselineModel final : public Scorer {
 public:
  /// All-zero weights: every pair scores 0.5.
  explicit BaselineModel(std::uint32_t dimension = kDefaultDimension);

  double score_features(const SparseVector& x) const;
  double predict_score(std::string_view question, std::string_view answer) const;
  std::vector<double> score_batch(std::span<const QAInput> inputs) const override;
  std::string describe() const override { return "baseline"; }

  std::uint32_t dimension() const noexcept { return dimension_; }
  std::vector<double>& weights() noexcept { return weights_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double& bias() noexcept { return bias_; }
  double bias() const noexcept { return bias_; }
  double threshold() const noexcept { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }
  TrainingMeta& meta() noexcept { return meta_; }
  const TrainingMeta& meta() const noexcept { return meta_; }

  /// Versioned blob: magic, format version, JSON header (dimension,
  /// threshold, bias, training meta), then little-endian f64 weights.
  void save(const std::filesystem::path& path) const;
  static BaselineModel load(const std::filesystem::path& path);

 private:
  std::uint32_t dimension_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  double threshold_ = kDefaultThreshold;
  TrainingMeta meta_;
};

/// Logistic loss, plain SGD, one seeded shuffle per epoch. Throws
/// DegenerateData unless both labels are present.
BaselineModel train(const std::vector<LabeledQAPair>& pairs, const Hyperparams& hp,
                    std::uint64_t seed);

PairScore predict(const Scorer& scorer, std::string_view question, std::string_view answer,
                  double threshold = kDefaultThreshold);

// ---- remote scorer -----------------------------------------------------

struct RemoteConfig {
  std::string url;  ///< service base URL; requests go to {url}/classify
  double timeout_seconds = 60.0;
  std::string model_id;  ///< optional, forwarded in each request
  std::size_t batch_size = 256;
};

/// Client of the pair-classification service. Throws RemoteUnavailable when
/// the service cannot be reached or is loading, RemoteProtocolError when a
/// response violates the schema (wrong length, score outside [0,1]).
class RemoteScorer final : public Scorer {
 public:
  explicit RemoteScorer(RemoteConfig config);
  std::vector<double> score_batch(std::span<const QAInput> inputs) const override;
  std::string describe() const override { return "remote:" + config_.url; }
  /// GET /health; returns the served model id.
  std::string health() const;

 private:
  RemoteConfig config_;
};

/// JSON wire shapes, shared with tests and any in-process service.
std::string encode_classify_request(std::span<const QAInput> inputs, const std::string& model_id);
std::vector<double> decode_classify_response(const std::string& body, std::size_t expected);

// ---- metrics -----------------------------------------------------------

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Positive class is `correct`; zero denominators give 0.
Metrics metrics_from(const Confusion& c);
Confusion confusion(std::span<const double> scores, std::span<const Label> labels,
                    double threshold = kDefaultThreshold);
Metrics evaluate_scores(std::span<const double> scores, std::span<const Label> labels,
                        double threshold = kDefaultThreshold);
Metrics evaluate(const Scorer& scorer, const std::vector<LabeledQAPair>& pairs,
                 double threshold = kDefaultThreshold);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation
};

Summary summarize(std::span<const double> values);

struct ClassificationReport {
  std::vector<Metrics> runs;
  Summary precision, recall, f1;
};

ClassificationReport aggregate(const std::vector<Metrics>& runs);

/// Runs `run_once(seed + i)` for i in [0, n_runs) and aggregates. Requires
/// n_runs >= 2 (ConfigError otherwise). Runs may execute on `workers`
/// threads; results are ordered by run index either way.
ClassificationReport repeated_eval(const std::function<Metrics(std::uint64_t)>& run_once,
                                   std::uint64_t seed, int n_runs, int workers = 1);

/// sample -> split -> train -> evaluate with one seed.
Metrics run_experiment_once(const std::vector<dataset::VanillaRecord>& records,
                            dataset::SamplingConfig sampling, const Hyperparams& hp,
                            std::uint64_t seed, double threshold = kDefaultThreshold);

struct SweepRow {
  double threshold;
  Metrics metrics;
};

/// Precision/recall at each threshold (a diagnostic, not part of the
/// default protocol).
std::vector<SweepRow> threshold_sweep(std::span<const double> scores,
                                      std::span<const Label> labels,
                                      std::span<const double> thresholds);

/// "0.9968 ± 0.0089"
std::string format_mean_std(const Summary& s, int digits = 4);

}  // namespace kgav::classifier

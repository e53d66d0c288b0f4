#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alselect/corpus.hpp"
#include "alselect/lm_scores.hpp"

namespace alselect {

/// Class probabilities; sums to one.
using ProbDist = std::vector<double>;

/// [mean_a ; mean_b ; |mean_a - mean_b| ; mean_a * mean_b], length 4d.
using FeatureVector = std::vector<double>;

struct TrainHyper {
  double learning_rate = 0.5;
  std::size_t epochs = 300;
  double l2 = 1e-4;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainHyper&, const TrainHyper&) = default;
};

/// Multinomial logistic regression over pooled embedding features: the
/// reference pair classifier.
class Model {
 public:
  Model() = default;
  /// Zero-initialized, untrained model.
  Model(int num_classes, std::size_t feature_dim, TrainHyper hyper = {});

  int num_classes() const { return num_classes_; }
  std::size_t feature_dim() const { return feature_dim_; }
  bool trained() const { return trained_; }
  const TrainHyper& hyper() const { return hyper_; }

  /// Row-major K x feature_dim.
  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }
  std::span<const double> bias() const { return bias_; }
  std::span<double> bias() { return bias_; }

  double weight(int cls, std::size_t j) const { return weights_[cls * feature_dim_ + j]; }

  void mark_trained() { trained_ = true; }

  std::vector<double> logits(std::span<const double> features) const;

  /// Versioned JSON blob (format "alselect-model-v1").
  std::string to_json() const;
  static Model from_json(const std::string& blob);

  friend bool operator==(const Model&, const Model&) = default;

 private:
  int num_classes_ = 2;
  std::size_t feature_dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
  TrainHyper hyper_;
  bool trained_ = false;
};

FeatureVector featurize(const InstanceScores& scores);

/// Softmax with max-subtraction.
ProbDist softmax(std::span<const double> logits);

ProbDist predict_proba(const Model& model, std::span<const double> features);
ProbDist predict_proba(const Model& model, const InstanceScores& scores);

/// Argmax with ties to the lowest class index.
int predict_label(const Model& model, std::span<const double> features);

struct LabeledFeatures {
  std::vector<FeatureVector> features;
  std::vector<Label> labels;
};

struct TrainReport {
  /// Regularized objective before each epoch's update, plus the final value.
  std::vector<double> objective;
};

/// Mean -ln P(y|f) + l2 * ||W||^2 and its gradient (same layout as the
/// model: weights then bias).
struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> grad_weights;
  std::vector<double> grad_bias;
};
ObjectiveEval objective(const Model& model, const LabeledFeatures& data);

/// Full-batch gradient descent from zero weights; deterministic.
Model train(const LabeledFeatures& data, int num_classes, const TrainHyper& hyper,
            TrainReport* report = nullptr);
Model train(const Dataset& dataset, std::span<const InstanceId> labeled,
            const ScoreTable& table, const TrainHyper& hyper,
            TrainReport* report = nullptr);

/// Gradient of -ln P(label|x) w.r.t. every token embedding of A then B.
struct EmbeddingGradient {
  std::vector<Embedding> grad_a;
  std::vector<Embedding> grad_b;

  double norm() const;
};
EmbeddingGradient embedding_gradient(const Model& model, const InstanceScores& scores,
                                     Label label);
double embedding_gradient_norm(const Model& model, const InstanceScores& scores,
                               Label label);

}  // namespace alselect

#include "alselect/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "alselect/error.hpp"

namespace alselect {
namespace {

constexpr std::string_view kModelFormat = "alselect-model-v1";

Embedding mean_of(const std::vector<Embedding>& rows, std::size_t dim) {
  Embedding m(dim, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < dim; ++j) m[j] += r[j];
  }
  const double inv = rows.empty() ? 0.0 : 1.0 / static_cast<double>(rows.size());
  for (auto& x : m) x *= inv;
  return m;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Model::Model(int num_classes, std::size_t feature_dim, TrainHyper hyper)
    : num_classes_(num_classes),
      feature_dim_(feature_dim),
      weights_(static_cast<std::size_t>(num_classes) * feature_dim, 0.0),
      bias_(static_cast<std::size_t>(num_classes), 0.0),
      hyper_(hyper) {
  if (num_classes < 2) throw Error(ErrorCode::kConfig, "model needs at least 2 classes");
}

std::vector<double> Model::logits(std::span<const double> features) const {
  if (features.size() != feature_dim_) {
    throw Error(ErrorCode::kDimMismatch, "feature length " + std::to_string(features.size()) +
                                             " != model feature dim " +
                                             std::to_string(feature_dim_));
  }
  std::vector<double> z(bias_.begin(), bias_.end());
  for (int k = 0; k < num_classes_; ++k) {
    const double* w = weights_.data() + static_cast<std::size_t>(k) * feature_dim_;
    double s = 0.0;
    for (std::size_t j = 0; j < feature_dim_; ++j) s += w[j] * features[j];
    z[k] += s;
  }
  return z;
}

std::string Model::to_json() const {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["num_classes"] = num_classes_;
  j["feature_dim"] = feature_dim_;
  j["weights"] = weights_;
  j["bias"] = bias_;
  j["trained"] = trained_;
  j["hyper"] = {{"learning_rate", hyper_.learning_rate},
                {"epochs", hyper_.epochs},
                {"l2", hyper_.l2},
                {"seed", hyper_.seed}};
  return j.dump();
}

Model Model::from_json(const std::string& blob) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(blob);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("model blob: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kModelFormat) {
    throw Error(ErrorCode::kSchemaMismatch, "model blob is not " + std::string(kModelFormat));
  }
  try {
    TrainHyper hyper;
    const auto& h = j.at("hyper");
    hyper.learning_rate = h.at("learning_rate").get<double>();
    hyper.epochs = h.at("epochs").get<std::size_t>();
    hyper.l2 = h.at("l2").get<double>();
    hyper.seed = h.at("seed").get<std::uint64_t>();
    Model m(j.at("num_classes").get<int>(), j.at("feature_dim").get<std::size_t>(), hyper);
    auto w = j.at("weights").get<std::vector<double>>();
    auto b = j.at("bias").get<std::vector<double>>();
    if (w.size() != m.weights_.size() || b.size() != m.bias_.size()) {
      throw Error(ErrorCode::kDimMismatch, "model blob parameter sizes disagree with header");
    }
    for (double x : w) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kNonFiniteValue, "model weight");
    }
    m.weights_ = std::move(w);
    m.bias_ = std::move(b);
    m.trained_ = j.value("trained", false);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("model blob: ") + e.what());
  }
}

FeatureVector featurize(const InstanceScores& scores) {
  const std::size_t dim = !scores.emb_a.empty()   ? scores.emb_a[0].size()
                          : !scores.emb_b.empty() ? scores.emb_b[0].size()
                                                  : 0;
  const Embedding ma = mean_of(scores.emb_a, dim);
  const Embedding mb = mean_of(scores.emb_b, dim);
  FeatureVector f(4 * dim);
  for (std::size_t j = 0; j < dim; ++j) {
    f[j] = ma[j];
    f[dim + j] = mb[j];
    f[2 * dim + j] = std::abs(ma[j] - mb[j]);
    f[3 * dim + j] = ma[j] * mb[j];
  }
  return f;
}

ProbDist softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  ProbDist p(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - mx);
    total += p[k];
  }
  for (auto& x : p) x /= total;
  return p;
}

ProbDist predict_proba(const Model& model, std::span<const double> features) {
  return softmax(model.logits(features));
}

ProbDist predict_proba(const Model& model, const InstanceScores& scores) {
  return predict_proba(model, featurize(scores));
}

int predict_label(const Model& model, std::span<const double> features) {
  const auto z = model.logits(features);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

ObjectiveEval objective(const Model& model, const LabeledFeatures& data) {
  const std::size_t n = data.features.size();
  const std::size_t fdim = model.feature_dim();
  const int K = model.num_classes();
  ObjectiveEval out;
  out.grad_weights.assign(model.weights().size(), 0.0);
  out.grad_bias.assign(model.bias().size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = data.features[i];
    const auto p = predict_proba(model, f);
    const Label y = data.labels[i];
    out.value -= std::log(std::max(p[y], 1e-300)) * inv_n;
    for (int k = 0; k < K; ++k) {
      const double r = (p[k] - (k == y ? 1.0 : 0.0)) * inv_n;
      out.grad_bias[k] += r;
      double* g = out.grad_weights.data() + static_cast<std::size_t>(k) * fdim;
      for (std::size_t j = 0; j < fdim; ++j) g[j] += r * f[j];
    }
  }
  const auto w = model.weights();
  const double l2 = model.hyper().l2;
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.value += l2 * w[j] * w[j];
    out.grad_weights[j] += 2.0 * l2 * w[j];
  }
  return out;
}

Model train(const LabeledFeatures& data, int num_classes, const TrainHyper& hyper,
            TrainReport* report) {
  if (data.features.empty()) throw Error(ErrorCode::kNoLabeledData, "training set is empty");
  if (data.labels.size() != data.features.size()) {
    throw Error(ErrorCode::kLengthMismatch, "features and labels differ in count");
  }
  for (Label y : data.labels) {
    if (y < 0 || y >= num_classes) {
      throw Error(ErrorCode::kUnknownLabel, "label " + std::to_string(y) + " outside [0, " +
                                                std::to_string(num_classes) + ")");
    }
  }
  Model model(num_classes, data.features[0].size(), hyper);
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const auto eval = objective(model, data);
    if (report) report->objective.push_back(eval.value);
    auto w = model.weights();
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= hyper.learning_rate * eval.grad_weights[j];
    auto b = model.bias();
    for (std::size_t k = 0; k < b.size(); ++k) b[k] -= hyper.learning_rate * eval.grad_bias[k];
  }
  if (report) report->objective.push_back(objective(model, data).value);
  model.mark_trained();
  return model;
}

Model train(const Dataset& dataset, std::span<const InstanceId> labeled,
            const ScoreTable& table, const TrainHyper& hyper, TrainReport* report) {
  if (labeled.empty()) throw Error(ErrorCode::kNoLabeledData, "no labeled instances");
  LabeledFeatures data;
  data.features.reserve(labeled.size());
  data.labels.reserve(labeled.size());
  for (InstanceId id : labeled) {
    const auto& pair = dataset.at(id);
    if (!pair.label) {
      throw Error(ErrorCode::kNoLabeledData, "instance " + std::to_string(id) + " has no label");
    }
    data.features.push_back(featurize(table.at(id)));
    data.labels.push_back(*pair.label);
  }
  return train(data, dataset.num_classes(), hyper, report);
}

double EmbeddingGradient::norm() const {
  double s = 0.0;
  for (const auto* side : {&grad_a, &grad_b}) {
    for (const auto& g : *side) {
      for (double x : g) s += x * x;
    }
  }
  return std::sqrt(s);
}

EmbeddingGradient embedding_gradient(const Model& model, const InstanceScores& scores,
                                     Label label) {
  const auto f = featurize(scores);
  const std::size_t fdim = f.size();
  const std::size_t dim = fdim / 4;
  const auto p = predict_proba(model, f);

  // d(-ln p_label)/d logits = p - onehot; back through the linear layer.
  std::vector<double> df(fdim, 0.0);
  for (int k = 0; k < model.num_classes(); ++k) {
    const double r = p[k] - (k == label ? 1.0 : 0.0);
    for (std::size_t j = 0; j < fdim; ++j) df[j] += r * model.weight(k, j);
  }

  Embedding dma(dim);
  Embedding dmb(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double ma = f[j];
    const double mb = f[dim + j];
    const double s = sign(ma - mb);
    dma[j] = df[j] + df[2 * dim + j] * s + df[3 * dim + j] * mb;
    dmb[j] = df[dim + j] - df[2 * dim + j] * s + df[3 * dim + j] * ma;
  }

  EmbeddingGradient g;
  auto spread = [dim](const Embedding& dm, std::size_t count) {
    Embedding per(dim);
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t j = 0; j < dim; ++j) per[j] = dm[j] * inv;
    return std::vector<Embedding>(count, per);
  };
  if (!scores.emb_a.empty()) g.grad_a = spread(dma, scores.emb_a.size());
  if (!scores.emb_b.empty()) g.grad_b = spread(dmb, scores.emb_b.size());
  return g;
}

double embedding_gradient_norm(const Model& model, const InstanceScores& scores, Label label) {
  return embedding_gradient(model, scores, label).norm();
}

}  // namespace alselect

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "alselect/error.hpp"
#include "alselect/matcher.hpp"
#include "alselect/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace alselect {
namespace {

using testing::random_scores;

Model random_model(int k, std::size_t fdim, Rng& rng, double scale = 0.5) {
  Model m(k, fdim);
  for (auto& w : m.weights()) w = scale * rng.normal();
  for (auto& b : m.bias()) b = scale * rng.normal();
  return m;
}

// Two separated Gaussian blobs in feature space.
LabeledFeatures blobs(std::size_t per_class, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  LabeledFeatures data;
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t i = 0; i < per_class; ++i) {
      FeatureVector f(dim);
      for (std::size_t j = 0; j < dim; ++j) f[j] = (cls == 0 ? -1.5 : 1.5) + 0.5 * rng.normal();
      data.features.push_back(f);
      data.labels.push_back(cls);
    }
  }
  return data;
}

double nll(const Model& m, const FeatureVector& f, Label y) {
  return -std::log(predict_proba(m, f)[y]);
}

TEST(Featurize, BlocksHandValue) {
  InstanceScores s;
  s.loss_a = {1};
  s.emb_a = {{1, 0}};
  s.loss_b = {1};
  s.emb_b = {{0, 1}};
  EXPECT_EQ(featurize(s), (FeatureVector{1, 0, 0, 1, 1, 1, 0, 0}));
}

TEST(Featurize, MeanPoolingAndZeroDifference) {
  InstanceScores s;
  s.loss_a = {1, 1};
  s.emb_a = {{1, 2}, {3, 4}};
  s.loss_b = {1, 1};
  s.emb_b = s.emb_a;
  const auto f = featurize(s);
  EXPECT_EQ(f, (FeatureVector{2, 3, 2, 3, 0, 0, 4, 9}));
  const auto r = featurize(random_scores(0, 3, 5, 6, 9));
  ASSERT_EQ(r.size(), 24u);
  for (std::size_t j = 12; j < 18; ++j) EXPECT_GE(r[j], 0.0);
}

TEST(Softmax, HandValueAndShift) {
  const auto p = softmax(std::vector<double>{2, 0});
  EXPECT_NEAR(p[0], 0.880797, 1e-6);
  EXPECT_NEAR(p[1], 0.119203, 1e-6);
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  const auto q = softmax(std::vector<double>{1002, 1000});
  EXPECT_NEAR(q[0], p[0], 1e-15);
  const auto big = softmax(std::vector<double>{1e4, -1e4, 0});
  EXPECT_TRUE(std::isfinite(big[0]));
  EXPECT_EQ(big[0], 1.0);
}

TEST(PredictProba, ZeroWeightsUniformAndValidDistribution) {
  Model m(3, 8);
  const auto s = random_scores(0, 2, 3, 2, 1);
  for (double p : predict_proba(m, s)) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto r = random_model(4, 8, rng, 3.0);
    const auto p = predict_proba(r, random_scores(0, 1 + rng.index(4), 1 + rng.index(4), 2, t));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    for (double x : p) EXPECT_GE(x, 0.0);
  }
  EXPECT_THROW(predict_proba(m, random_scores(0, 2, 2, 3, 1)), Error);
}

TEST(PredictLabel, TiesGoToLowestClass) {
  Model m(3, 4);
  EXPECT_EQ(predict_label(m, std::vector<double>{1, 2, 3, 4}), 0);
  m.bias()[1] = 1;
  m.bias()[2] = 1;
  EXPECT_EQ(predict_label(m, std::vector<double>{1, 2, 3, 4}), 1);
}

TEST(Train, SeparableBlobs) {
  const auto data = blobs(50, 6, 3);
  TrainReport report;
  const auto m = train(data, 2, TrainHyper{}, &report);
  ASSERT_EQ(report.objective.size(), TrainHyper{}.epochs + 1);
  for (std::size_t i = 1; i < report.objective.size(); ++i) {
    EXPECT_LT(report.objective[i], report.objective[i - 1]) << "epoch " << i;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    correct += predict_label(m, data.features[i]) == data.labels[i];
  }
  EXPECT_GE(static_cast<double>(correct) / data.features.size(), 0.95);
  EXPECT_TRUE(m.trained());
}

TEST(Train, SingleInstanceMovesTowardItsLabel) {
  LabeledFeatures data{{{0.3, -0.2, 0.8}}, {0}};
  const auto m = train(data, 3, TrainHyper{});
  EXPECT_GT(predict_proba(m, data.features[0])[0], 1.0 / 3.0);
}

TEST(Train, HeavyRegularizationStaysNearUniform) {
  const auto data = blobs(20, 4, 8);
  TrainHyper h;
  h.l2 = 1e4;
  h.learning_rate = 1e-5;
  h.epochs = 2000;
  const auto m = train(data, 2, h);
  for (double w : m.weights()) EXPECT_LT(std::abs(w), 1e-3);
  const auto p = predict_proba(m, data.features[0]);
  EXPECT_NEAR(p[0], 0.5, 1e-2);
}

TEST(Train, Errors) {
  EXPECT_THROW(train(LabeledFeatures{}, 2, TrainHyper{}), Error);
  try {
    train(LabeledFeatures{{{1.0}}, {2}}, 2, TrainHyper{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownLabel);
  }
}

TEST(Train, Deterministic) {
  const auto data = blobs(30, 5, 11);
  EXPECT_EQ(train(data, 2, TrainHyper{}), train(data, 2, TrainHyper{}));
}

TEST(Train, SmallStepNeverIncreasesObjective) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto data = blobs(25, 4, seed);
    Rng rng(seed);
    for (auto& y : data.labels) {
      if (rng.uniform() < 0.2) y = 1 - y;  // not separable
    }
    TrainHyper h;
    h.learning_rate = TrainHyper{}.learning_rate / 10;
    TrainReport report;
    train(data, 2, h, &report);
    for (std::size_t i = 1; i < report.objective.size(); ++i) {
      EXPECT_LE(report.objective[i], report.objective[i - 1] + 1e-15);
    }
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  Rng rng(42);
  for (int draw = 0; draw < 50; ++draw) {
    const int k = 2 + static_cast<int>(rng.index(3));
    const std::size_t fdim = 2 + rng.index(6);
    TrainHyper h;
    h.l2 = 0.01;
    Model m(k, fdim, h);
    for (auto& w : m.weights()) w = 0.5 * rng.normal();
    for (auto& b : m.bias()) b = 0.5 * rng.normal();
    LabeledFeatures data;
    for (int i = 0; i < 6; ++i) {
      FeatureVector f(fdim);
      for (auto& x : f) x = rng.normal();
      data.features.push_back(f);
      data.labels.push_back(static_cast<Label>(rng.index(k)));
    }
    const auto eval = objective(m, data);
    std::vector<double> params(m.weights().begin(), m.weights().end());
    params.insert(params.end(), m.bias().begin(), m.bias().end());
    auto f = [&](const std::vector<double>& x) {
      Model probe = m;
      std::copy(x.begin(), x.begin() + probe.weights().size(), probe.weights().begin());
      std::copy(x.begin() + probe.weights().size(), x.end(), probe.bias().begin());
      return objective(probe, data).value;
    };
    auto analytic = eval.grad_weights;
    analytic.insert(analytic.end(), eval.grad_bias.begin(), eval.grad_bias.end());
    EXPECT_LT(oracle::relative_error(analytic, oracle::central_difference(f, params)), 1e-4)
        << "draw " << draw;
  }
}

std::vector<double> flatten(const InstanceScores& s) {
  std::vector<double> x;
  for (const auto* side : {&s.emb_a, &s.emb_b})
    for (const auto& e : *side) x.insert(x.end(), e.begin(), e.end());
  return x;
}

InstanceScores unflatten(InstanceScores s, const std::vector<double>& x) {
  std::size_t i = 0;
  for (auto* side : {&s.emb_a, &s.emb_b})
    for (auto& e : *side)
      for (auto& v : e) v = x[i++];
  return s;
}

TEST(EmbeddingGradient, MatchesFiniteDifferences) {
  Rng rng(7);
  for (int draw = 0; draw < 60; ++draw) {
    const std::size_t dim = 2 + rng.index(3);
    const int k = 2 + static_cast<int>(rng.index(2));
    const auto m = random_model(k, 4 * dim, rng);
    const auto s = random_scores(0, 1 + rng.index(4), 1 + rng.index(4), dim, rng.next());
    const Label y = static_cast<Label>(rng.index(k));
    const auto g = embedding_gradient(m, s, y);
    auto f = [&](const std::vector<double>& x) { return nll(m, featurize(unflatten(s, x)), y); };
    const auto numeric = oracle::central_difference(f, flatten(s));
    std::vector<double> analytic;
    for (const auto* side : {&g.grad_a, &g.grad_b})
      for (const auto& e : *side) analytic.insert(analytic.end(), e.begin(), e.end());
    EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-4) << "draw " << draw;
    EXPECT_NEAR(embedding_gradient_norm(m, s, y), std::sqrt(std::inner_product(
                                                      numeric.begin(), numeric.end(),
                                                      numeric.begin(), 0.0)),
                1e-4 * (1 + g.norm()));
  }
}

TEST(EmbeddingGradient, ZeroWeightsAndConfidentPrediction) {
  const auto s = random_scores(0, 3, 2, 2, 4);
  EXPECT_EQ(embedding_gradient_norm(Model(2, 8), s, 0), 0.0);
  Model m(2, 8);
  m.bias()[0] = 60;
  for (std::size_t j = 0; j < 8; ++j) m.weights()[j] = 0.3;
  EXPECT_LT(embedding_gradient_norm(m, s, 0), 1e-20);
  EXPECT_GT(embedding_gradient_norm(m, s, 1), 0.1);
}

TEST(Model, JsonRoundTrip) {
  const auto m = train(blobs(10, 3, 1), 2, TrainHyper{});
  const auto back = Model::from_json(m.to_json());
  EXPECT_EQ(back, m);
  EXPECT_THROW(Model::from_json("{\"format\":\"other\"}"), Error);
  EXPECT_THROW(Model::from_json("not json"), Error);
}

}  // namespace
}  // namespace alselect

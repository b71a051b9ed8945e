#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "tabcurate/error.hpp"
#include "tabcurate/learn/boosted_trees.hpp"
#include "tabcurate/learn/decision_tree.hpp"
#include "tabcurate/learn/logistic.hpp"
#include "tabcurate/rng.hpp"

using namespace tabcurate;
using namespace tabcurate::learn;

namespace {

struct Blobs {
  Matrix x;
  std::vector<int> y;
};

/// k Gaussian blobs on a circle of the given radius, n rows each.
Blobs blobs(std::size_t k, std::size_t n, double radius, std::uint64_t seed) {
  Blobs b{Matrix(k * n, 2), {}};
  Rng rng(seed, Stream::mock);
  for (std::size_t c = 0; c < k; ++c) {
    const double angle = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(k);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = c * n + i;
      b.x(r, 0) = radius * std::cos(angle) + rng.normal();
      b.x(r, 1) = radius * std::sin(angle) + rng.normal();
      b.y.push_back(static_cast<int>(c));
    }
  }
  return b;
}

double train_accuracy(const Classifier& model, const Blobs& b) {
  const auto p = model.predict_proba(b.x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < b.x.rows(); ++i) {
    const auto row = p.row(i);
    const auto pred = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    hits += pred == b.y[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(b.x.rows());
}

void expect_distributions(const Matrix& p) {
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < p.cols(); ++c) {
      EXPECT_GE(p(i, c), 0.0);
      sum += p(i, c);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

}  // namespace

TEST(Link, SigmoidAndSoftmaxAreStable) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(800.0), 1.0, 1e-15);
  EXPECT_NEAR(sigmoid(-800.0), 0.0, 1e-15);
  std::vector<double> z{1000.0, 1000.0, -1000.0}, out(3);
  softmax(z, out);
  EXPECT_NEAR(out[0], 0.5, 1e-12);
  EXPECT_NEAR(out[2], 0.0, 1e-12);
}

TEST(Link, RequireTwoClasses) {
  const std::vector<int> y{1, 1, 1};
  try {
    require_two_classes(y, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::single_class_train);
  }
}

TEST(BoostedTrees, FirstRoundMatchesHandComputedStump) {
  Matrix x(4, 1);
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
  const std::vector<int> y{0, 0, 1, 1};
  BoostedTreesConfig c;
  c.rounds = 1;
  c.max_depth = 1;
  c.min_child_weight = 0.0;
  const auto m = BoostedTrees::fit(x, y, 2, c);
  // Gradients +-0.5, hessians 0.25: leaf weight -G/(H+lambda) = -(1.0)/(0.5+1).
  const double w = 1.0 / 1.5;
  std::vector<double> row{3.0};
  const auto stages = m.staged_proba(row);
  EXPECT_NEAR(stages(0, 1), sigmoid(0.1 * w), 1e-15);
  row[0] = 0.0;
  EXPECT_NEAR(m.staged_proba(row)(0, 1), sigmoid(-0.1 * w), 1e-15);
  EXPECT_EQ(m.total_splits(), 1u);
}

TEST(BoostedTrees, LastStageEqualsPrediction) {
  const auto b = blobs(2, 30, 1.5, 1);
  const auto m = BoostedTrees::fit(b.x, b.y, 2, {});
  EXPECT_EQ(m.num_stages(), 100u);
  std::vector<double> p(2);
  for (std::size_t i = 0; i < 5; ++i) {
    m.predict_proba(b.x.row(i), p);
    const auto s = m.staged_proba(b.x.row(i));
    EXPECT_NEAR(s(99, 1), p[1], 1e-12);
  }
}

TEST(BoostedTrees, MulticlassSoftmax) {
  const auto b = blobs(3, 40, 4.0, 2);
  const auto m = BoostedTrees::fit(b.x, b.y, 3, {});
  EXPECT_EQ(m.num_classes(), 3u);
  const auto p = m.predict_proba(b.x);
  expect_distributions(p);
  EXPECT_GT(train_accuracy(m, b), 0.95);
  expect_distributions(m.staged_proba(b.x.row(0)));
}

TEST(BoostedTrees, ConstantFeaturesPredictPrior) {
  Matrix x(8, 2, 1.0);
  const std::vector<int> y{0, 0, 0, 0, 0, 0, 1, 1};
  const auto m = BoostedTrees::fit(x, y, 2, {});
  EXPECT_EQ(m.total_splits(), 0u);
  const auto s = m.staged_proba(x.row(0));
  for (std::size_t e = 0; e < s.rows(); ++e) EXPECT_NEAR(s(e, 1), 0.25, 1e-12);
}

TEST(BoostedTrees, SubsampleIsSeededAndValidated) {
  const auto b = blobs(2, 20, 1.0, 3);
  BoostedTreesConfig c;
  c.subsample = 0.5;
  c.seed = 11;
  const auto m1 = BoostedTrees::fit(b.x, b.y, 2, c);
  const auto m2 = BoostedTrees::fit(b.x, b.y, 2, c);
  c.seed = 12;
  const auto m3 = BoostedTrees::fit(b.x, b.y, 2, c);
  EXPECT_EQ(m1.staged_proba(b.x.row(0)), m2.staged_proba(b.x.row(0)));
  EXPECT_NE(m1.staged_proba(b.x.row(0)), m3.staged_proba(b.x.row(0)));
  c.subsample = 1.5;
  EXPECT_THROW(BoostedTrees::fit(b.x, b.y, 2, c), Error);
}

TEST(DecisionTree, UnprunedTreeFitsDistinctPoints) {
  const auto b = blobs(2, 50, 0.5, 4);
  const auto t = DecisionTree::fit(b.x, b.y, 2, {});
  EXPECT_EQ(train_accuracy(t, b), 1.0);
  const auto p = t.predict_proba(b.x);
  for (std::size_t i = 0; i < p.rows(); ++i) EXPECT_EQ(p(i, static_cast<std::size_t>(b.y[i])), 1.0);
}

TEST(DecisionTree, StumpPicksTheGiniSplit) {
  // x2 separates perfectly; x1 is noise.
  Matrix x(6, 2);
  const double x1[] = {5, 1, 4, 2, 6, 3};
  const double x2[] = {0, 0, 0, 1, 1, 1};
  for (std::size_t i = 0; i < 6; ++i) {
    x(i, 0) = x1[i];
    x(i, 1) = x2[i];
  }
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  DecisionTreeConfig c;
  c.max_depth = 1;
  const auto t = DecisionTree::fit(x, y, 2, c);
  EXPECT_EQ(t.depth(), 1u);
  EXPECT_EQ(t.node_count(), 3u);
  std::vector<double> p(2);
  const double probe[] = {9.0, 1.0};
  t.predict_proba(probe, p);
  EXPECT_EQ(p[1], 1.0);
}

TEST(DecisionTree, LeafFrequenciesUnderMinLeaf) {
  Matrix x(4, 1);
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
  const std::vector<int> y{0, 1, 0, 1};
  DecisionTreeConfig c;
  c.min_samples_leaf = 4;
  const auto t = DecisionTree::fit(x, y, 2, c);
  EXPECT_EQ(t.node_count(), 1u);
  std::vector<double> p(2);
  t.predict_proba(x.row(0), p);
  EXPECT_EQ(p[0], 0.5);
}

TEST(RandomForest, DeterministicPerSeedAndAccurate) {
  const auto b = blobs(2, 60, 1.5, 5);
  const auto f1 = RandomForest::fit(b.x, b.y, 2, {}, 3);
  const auto f2 = RandomForest::fit(b.x, b.y, 2, {}, 3);
  const auto f3 = RandomForest::fit(b.x, b.y, 2, {}, 4);
  EXPECT_EQ(f1.size(), 100u);
  EXPECT_EQ(f1.predict_proba(b.x), f2.predict_proba(b.x));
  EXPECT_NE(f1.predict_proba(b.x), f3.predict_proba(b.x));
  EXPECT_GT(train_accuracy(f1, b), 0.95);
  expect_distributions(f1.predict_proba(b.x));
}

TEST(Logistic, StationaryPointOfRegularizedLoss) {
  const auto b = blobs(2, 40, 1.0, 6);
  LogisticConfig cfg;
  cfg.max_epochs = 200000;
  const auto m = LogisticRegression::fit(b.x, b.y, 2, cfg);
  ASSERT_LT(m.epochs_run(), cfg.max_epochs);
  const auto& prm = m.params();
  ASSERT_EQ(prm.num_classes, 2u);
  // Independent gradient of mean softmax cross-entropy + (1/2n) |W|^2, one
  // weight row per class, unpenalized bias.
  const double n = static_cast<double>(b.x.rows());
  std::vector<double> p(2);
  double gw[2][2] = {{0, 0}, {0, 0}}, gb[2] = {0, 0};
  for (std::size_t i = 0; i < b.x.rows(); ++i) {
    m.predict_proba(b.x.row(i), p);
    for (int c = 0; c < 2; ++c) {
      const double r = p[static_cast<std::size_t>(c)] - (b.y[i] == c ? 1.0 : 0.0);
      gw[c][0] += r * b.x(i, 0) / n;
      gw[c][1] += r * b.x(i, 1) / n;
      gb[c] += r / n;
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(gw[c][j] + prm.weights[c * 2 + j] / n, 0.0, 1e-5);
    EXPECT_NEAR(gb[c], 0.0, 1e-5);
  }
  EXPECT_GT(train_accuracy(m, b), 0.8);
}

TEST(Logistic, MulticlassProbabilities) {
  const auto b = blobs(4, 30, 5.0, 7);
  const auto m = LogisticRegression::fit(b.x, b.y, 4);
  expect_distributions(m.predict_proba(b.x));
  EXPECT_GT(train_accuracy(m, b), 0.9);
}

TEST(SgdLogistic, StagesPerEpochAndSeeded) {
  const auto b = blobs(2, 20, 1.5, 8);
  SgdConfig c;
  c.epochs = 12;
  const auto m1 = SgdLogistic::fit(b.x, b.y, 2, c, 1);
  const auto m2 = SgdLogistic::fit(b.x, b.y, 2, c, 1);
  EXPECT_EQ(m1.num_stages(), 12u);
  EXPECT_EQ(m1.staged_proba(b.x.row(0)), m2.staged_proba(b.x.row(0)));
  expect_distributions(m1.staged_proba(b.x.row(3)));
  EXPECT_GT(train_accuracy(m1, b), 0.8);
}

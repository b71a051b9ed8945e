#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tabcurate/learn/classifier.hpp"
#include "tabcurate/rng.hpp"

namespace tabcurate::learn {

struct DecisionTreeConfig {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0 = all features at every split
};

/// CART classification tree with Gini impurity. Leaves hold class frequencies.
class DecisionTree final : public Classifier {
 public:
  /// `rng` is only consulted when config.max_features limits the candidates.
  static DecisionTree fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                          const DecisionTreeConfig& config, Rng* rng = nullptr);
  /// Fit on a multiset of row indices (bootstrap samples).
  static DecisionTree fit_rows(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                               std::vector<std::size_t> rows, const DecisionTreeConfig& config,
                               Rng* rng = nullptr);

  std::size_t num_classes() const override { return num_classes_; }
  using Classifier::predict_proba;
  void predict_proba(std::span<const double> x, std::span<double> out) const override;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t depth() const;

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t leaf = 0;  // offset into leaf_proba_
  };

  std::size_t num_classes_ = 2;
  std::vector<Node> nodes_;
  std::vector<double> leaf_proba_;
};

struct RandomForestConfig {
  std::size_t trees = 100;
  bool bootstrap = true;
  std::size_t max_features = 0;  // 0 = floor(sqrt(d)), at least 1
};

/// Bagged CART trees with per-split feature subsampling; probabilities are the
/// mean of the trees' leaf frequencies.
class RandomForest final : public Classifier {
 public:
  static RandomForest fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                          const RandomForestConfig& config, std::uint64_t seed);

  std::size_t num_classes() const override { return num_classes_; }
  using Classifier::predict_proba;
  void predict_proba(std::span<const double> x, std::span<double> out) const override;
  std::size_t size() const { return trees_.size(); }

 private:
  std::size_t num_classes_ = 2;
  std::vector<DecisionTree> trees_;
};

}  // namespace tabcurate::learn

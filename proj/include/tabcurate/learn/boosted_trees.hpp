#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tabcurate/learn/classifier.hpp"

namespace tabcurate::learn {

struct BoostedTreesConfig {
  std::size_t rounds = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  double lambda = 1.0;            // L2 penalty on leaf weights
  double min_child_weight = 1.0;  // minimum hessian sum per child
  double subsample = 1.0;         // fraction of rows drawn (without replacement) per round
  std::uint64_t seed = 0;         // only used when subsample < 1
};

/// Second-order gradient boosting of depth-limited regression trees on the
/// logistic loss (softmax loss with one tree per class and round when k > 2).
/// Margins start at the log class prior, so a model whose trees never split
/// predicts the training prior at every stage. Checkpoint e is the prefix
/// ensemble of the first e rounds.
class BoostedTrees final : public StagedClassifier {
 public:
  static BoostedTrees fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                          const BoostedTreesConfig& config);

  std::size_t num_classes() const override { return num_classes_; }
  std::size_t num_stages() const override { return rounds_.size(); }
  using Classifier::predict_proba;
  void predict_proba(std::span<const double> x, std::span<double> out) const override;
  Matrix staged_proba(std::span<const double> x) const override;

  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  std::size_t total_splits() const;

 private:
  std::size_t outputs() const { return num_classes_ == 2 ? 1 : num_classes_; }
  void to_proba(std::span<const double> margins, std::span<double> out) const;

  std::size_t num_classes_ = 2;
  double learning_rate_ = 0.1;
  std::vector<double> base_margin_;
  std::vector<std::vector<Tree>> rounds_;  // rounds_[r][output]
};

double eval_tree(const BoostedTrees::Tree& tree, std::span<const double> x);

}  // namespace tabcurate::learn

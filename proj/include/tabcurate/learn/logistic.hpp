#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tabcurate/learn/classifier.hpp"

namespace tabcurate::learn {

/// Multinomial (softmax) linear model parameters: weights are k x d, row-major.
struct LinearParams {
  std::size_t num_classes = 2;
  std::size_t dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  void margins(std::span<const double> x, std::span<double> out) const;
  void proba(std::span<const double> x, std::span<double> out) const;
};

struct LogisticConfig {
  double l2 = -1.0;          // < 0 selects 1/n, i.e. unit inverse regularization strength
  double tolerance = 1e-6;   // stop when the max-abs gradient falls below this
  std::size_t max_epochs = 1000;
};

/// L2-regularized logistic regression by full-batch gradient descent with a
/// step of 1/L, where L bounds the curvature of the mean cross-entropy.
class LogisticRegression final : public Classifier {
 public:
  static LogisticRegression fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                                const LogisticConfig& config = {});

  std::size_t num_classes() const override { return params_.num_classes; }
  using Classifier::predict_proba;
  void predict_proba(std::span<const double> x, std::span<double> out) const override;

  const LinearParams& params() const { return params_; }
  std::size_t epochs_run() const { return epochs_; }

 private:
  LinearParams params_;
  std::size_t epochs_ = 0;
};

struct SgdConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.1;
  double l2 = 1e-4;
};

/// Per-sample SGD on the softmax cross-entropy, visiting rows in a fresh seeded
/// order each epoch. Checkpoint e holds the parameters after epoch e.
class SgdLogistic final : public StagedClassifier {
 public:
  static SgdLogistic fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                         const SgdConfig& config, std::uint64_t seed);

  std::size_t num_classes() const override { return snapshots_.front().num_classes; }
  std::size_t num_stages() const override { return snapshots_.size(); }
  using Classifier::predict_proba;
  void predict_proba(std::span<const double> x, std::span<double> out) const override;
  Matrix staged_proba(std::span<const double> x) const override;

 private:
  std::vector<LinearParams> snapshots_;
};

}  // namespace tabcurate::learn

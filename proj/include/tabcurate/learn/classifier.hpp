#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tabcurate/matrix.hpp"

namespace tabcurate::learn {

/// A fitted probabilistic classifier over encoded feature rows.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::size_t num_classes() const = 0;
  /// Writes a probability vector over num_classes() into `out`.
  virtual void predict_proba(std::span<const double> x, std::span<double> out) const = 0;

  Matrix predict_proba(const Matrix& x) const;
};

/// A classifier trained iteratively whose intermediate checkpoints can be queried.
class StagedClassifier : public Classifier {
 public:
  virtual std::size_t num_stages() const = 0;
  /// Row e holds the probability vector of checkpoint e+1.
  virtual Matrix staged_proba(std::span<const double> x) const = 0;
};

// Shared helpers.
double sigmoid(double margin);
void softmax(std::span<const double> margins, std::span<double> out);
/// Throws Error(single_class_train) unless at least two distinct labels occur.
/// Labels must lie in [0, num_classes).
void require_two_classes(std::span<const int> y, std::size_t num_classes);

}  // namespace tabcurate::learn

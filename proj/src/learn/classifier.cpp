#include "tabcurate/learn/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "tabcurate/error.hpp"

namespace tabcurate::learn {

Matrix Classifier::predict_proba(const Matrix& x) const {
  Matrix out(x.rows(), num_classes());
  for (std::size_t i = 0; i < x.rows(); ++i) predict_proba(x.row(i), out.row(i));
  return out;
}

double sigmoid(double margin) {
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

void softmax(std::span<const double> margins, std::span<double> out) {
  const double top = *std::max_element(margins.begin(), margins.end());
  double total = 0.0;
  for (std::size_t c = 0; c < margins.size(); ++c) {
    out[c] = std::exp(margins[c] - top);
    total += out[c];
  }
  for (auto& p : out) p /= total;
}

void require_two_classes(std::span<const int> y, std::size_t num_classes) {
  std::vector<bool> seen(num_classes, false);
  std::size_t distinct = 0;
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw Error(Errc::unknown_label, "label index out of range");
    }
    if (!seen[static_cast<std::size_t>(label)]) {
      seen[static_cast<std::size_t>(label)] = true;
      ++distinct;
    }
  }
  if (distinct < 2) throw Error(Errc::single_class_train, "training data contains fewer than two classes");
}

}  // namespace tabcurate::learn

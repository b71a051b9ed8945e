#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tabcurate/dataset.hpp"

namespace tabcurate {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::size_t n_target = 1000;
  std::uint64_t seed = 0;
};

struct KdeConfig {
  std::size_t n_target = 1000;
  std::uint64_t seed = 0;
};

/// SMOTE: for each new row pick a class proportionally to its train count, a
/// base row uniformly within the class, and one of its k nearest same-class
/// neighbours (Euclidean over numeric features) uniformly; numerics are
/// interpolated base + u (neighbour - base) with u ~ U[0,1], categoricals and
/// the label are copied from the base row. Throws ClassTooSmall when a class
/// present in train has a single row.
Dataset smote_generate(const Dataset& train, const SmoteConfig& config);

/// Per-numeric-feature Scott bandwidth sigma_j * n^(-1/(d+4)), where sigma_j is
/// the sample standard deviation, n = |train| and d the numeric feature count.
/// Entries for categorical features are 0.
std::vector<double> scott_bandwidths(const Dataset& train);

/// Gaussian KDE sampling: a uniformly drawn train row with each numeric feature
/// jittered by N(0, h_j^2); categoricals and the label copied. Throws
/// NoNumericFeatures, or TooFewRows when |train| < 2.
Dataset kde_generate(const Dataset& train, const KdeConfig& config);

}  // namespace tabcurate

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tabcurate/dataset.hpp"

namespace tabcurate {

struct SplitResult {
  Dataset train;
  Dataset oracle;
  Dataset test;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  // Source row indices backing each part.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> oracle_indices;
  std::vector<std::size_t> test_indices;
};

/// Class-balanced training draw followed by an even oracle/test split of the rest.
///
/// Each class receives floor(n_train / k) training rows; the n_train mod k extra
/// rows go to classes picked in seeded random order among those with spare rows,
/// so per-class counts differ by at most one. The remaining source rows are
/// shuffled with the same stream and halved (oracle gets floor, test the rest).
/// Throws NTooLarge or InsufficientClassSamples.
SplitResult make_splits(const Dataset& source, std::size_t n_train, std::uint64_t seed);

}  // namespace tabcurate

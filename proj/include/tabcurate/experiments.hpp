#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tabcurate/curator.hpp"
#include "tabcurate/evaluation.hpp"
#include "tabcurate/mock.hpp"

namespace tabcurate {

/// Seeds for the three independent draws of one mock run.
struct MockDraws {
  std::uint64_t train;
  std::uint64_t synthetic;
  std::uint64_t test;
};
MockDraws mock_draws(std::uint64_t seed);

/// Two-Gaussian setup with a biased synthetic source whose labels are flipped
/// where |x1| > threshold. A boosted-trees model is trained on the biased
/// synthetic set, on the clean train set and on the curated synthetic set.
struct BiasExperimentConfig {
  std::size_t n_train = 20;
  std::size_t n_synthetic = 1000;
  std::size_t n_test = 2000;
  double separation = 1.5;
  double region_threshold = 2.5;
  CuratorConfig curator;
};

struct BiasSeedResult {
  std::uint64_t seed = 0;
  double hardness = 0.0;
  // Indexed by BiasSource.
  double accuracy[3] = {0, 0, 0};
  double delta_y1[3] = {0, 0, 0};
  double delta_y0[3] = {0, 0, 0};
};

enum BiasSource : std::size_t { bias_synthetic = 0, bias_train = 1, bias_curated = 2 };
const char* bias_source_name(std::size_t source) noexcept;

BiasSeedResult run_bias_seed(const BiasExperimentConfig& config, std::uint64_t seed);

/// Clean train and test sets from two_gaussians(separation); synthetic rows
/// from the same mixture with symmetric label noise.
struct MockBenchmarkConfig {
  std::size_t n_train = 20;
  std::size_t n_synthetic = 1000;
  std::size_t n_test = 1000;
  double separation = 1.5;
  double noise_rate = 0.2;
  CuratorConfig curator;
  std::vector<DownstreamKind> models = all_downstream_kinds();
  bool evaluate = true;  // false skips the TSTR fits
};

struct MockSeedResult {
  std::uint64_t seed = 0;
  double hardness = 0.0;
  std::size_t n_discarded = 0;
  std::size_t n_selected = 0;
  double flipped_in_discarded = 0.0;  // fraction; 0 when the set is empty
  double flipped_in_selected = 0.0;
  double auc_curated = 0.0;
  double auc_uncurated = 0.0;
};

MockSeedResult run_mock_seed(const MockBenchmarkConfig& config, std::uint64_t seed);

}  // namespace tabcurate

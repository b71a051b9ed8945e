#include "tabcurate/experiments.hpp"

#include "tabcurate/predicate.hpp"
#include "tabcurate/rng.hpp"

namespace tabcurate {

MockDraws mock_draws(std::uint64_t seed) {
  return {splitmix64(3 * seed), splitmix64(3 * seed + 1), splitmix64(3 * seed + 2)};
}

const char* bias_source_name(std::size_t source) noexcept {
  switch (source) {
    case bias_synthetic: return "synthetic (biased)";
    case bias_train: return "train (unbiased)";
    case bias_curated: return "curated";
    default: return "unknown";
  }
}

BiasSeedResult run_bias_seed(const BiasExperimentConfig& config, std::uint64_t seed) {
  const auto clean = two_gaussians(config.separation);
  auto biased = clean;
  biased.region = NoiseRegion{0, config.region_threshold};
  const auto draws = mock_draws(seed);
  const auto train = mock_sample(clean, config.n_train, draws.train, Role::train);
  const auto syn = mock_sample(biased, config.n_synthetic, draws.synthetic, Role::synthetic);
  const auto test = mock_sample(clean, config.n_test, draws.test, Role::test);

  const auto outcome = curate(syn, fit_checkpoints(train, config.curator, seed), config.curator);

  Predicate group;
  group.feature = "x1";
  group.absolute = true;
  group.op = Predicate::Op::gt;
  group.number = config.region_threshold;
  group.text = format_number(config.region_threshold);

  BiasSeedResult result;
  result.seed = seed;
  result.hardness = outcome.hardness;
  const Dataset* sources[3] = {&syn, &train, &outcome.curated};
  for (std::size_t s = 0; s < 3; ++s) {
    const auto model = fit_downstream(DownstreamKind::boosted_trees, *sources[s], seed);
    result.accuracy[s] = accuracy(model, test);
    const auto gap = equalized_odds_diff(model, test, group);
    result.delta_y1[s] = gap.delta_y1.value_or(0.0);
    result.delta_y0[s] = gap.delta_y0.value_or(0.0);
  }
  return result;
}

MockSeedResult run_mock_seed(const MockBenchmarkConfig& config, std::uint64_t seed) {
  const auto clean = two_gaussians(config.separation);
  auto noisy = clean;
  noisy.label_noise_rate = config.noise_rate;
  const auto draws = mock_draws(seed);
  const auto train = mock_sample(clean, config.n_train, draws.train, Role::train);
  const auto syn = mock_sample(noisy, config.n_synthetic, draws.synthetic, Role::synthetic);

  const auto outcome = curate(syn, fit_checkpoints(train, config.curator, seed), config.curator);

  MockSeedResult result;
  result.seed = seed;
  result.hardness = outcome.hardness;
  result.n_discarded = outcome.discarded.size();
  result.n_selected = outcome.curated.size();
  auto flipped_fraction = [](const Dataset& d) {
    if (d.empty()) return 0.0;
    std::size_t flipped = 0;
    for (const auto& r : d.rows()) flipped += r.was_flipped ? 1 : 0;
    return static_cast<double>(flipped) / static_cast<double>(d.size());
  };
  result.flipped_in_discarded = flipped_fraction(outcome.discarded);
  result.flipped_in_selected = flipped_fraction(outcome.curated);

  if (config.evaluate) {
    const auto test = mock_sample(clean, config.n_test, draws.test, Role::test);
    result.auc_curated = tstr(outcome.curated, test, config.models, seed, "curated").mean_auc;
    result.auc_uncurated = tstr(syn, test, config.models, seed, "synthetic").mean_auc;
  }
  return result;
}

}  // namespace tabcurate

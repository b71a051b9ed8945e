#include "tabcurate/splits.hpp"

#include <algorithm>
#include <numeric>

#include "tabcurate/error.hpp"
#include "tabcurate/rng.hpp"

namespace tabcurate {

SplitResult make_splits(const Dataset& source, std::size_t n_train, std::uint64_t seed) {
  if (n_train == 0) throw Error(Errc::invalid_argument, "n_train must be positive");
  if (n_train > source.size()) {
    throw Error(Errc::n_too_large, "n_train " + std::to_string(n_train) + " exceeds source size " +
                                       std::to_string(source.size()));
  }
  const auto& levels = source.schema().target.levels;
  const std::size_t k = levels.size();

  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < source.size(); ++i) by_class[source.label_of(i)].push_back(i);

  std::vector<std::size_t> quota(k, n_train / k);
  for (std::size_t c = 0; c < k; ++c) {
    if (by_class[c].size() < quota[c]) {
      throw Error(Errc::insufficient_class_samples,
                  "class '" + levels[c] + "' has " + std::to_string(by_class[c].size()) + " rows, needs " +
                      std::to_string(quota[c]),
                  levels[c]);
    }
  }

  Rng rng(seed, Stream::split);
  std::vector<std::size_t> class_order(k);
  std::iota(class_order.begin(), class_order.end(), 0);
  rng.shuffle(std::span(class_order));
  std::size_t extra = n_train % k;
  for (auto c : class_order) {
    if (extra == 0) break;
    if (by_class[c].size() > quota[c]) {
      ++quota[c];
      --extra;
    }
  }
  if (extra != 0) {
    throw Error(Errc::insufficient_class_samples, "not enough rows to fill the remainder of the balanced draw");
  }

  std::vector<bool> taken(source.size(), false);
  SplitResult out;
  for (std::size_t c = 0; c < k; ++c) {
    auto& members = by_class[c];
    // Partial Fisher-Yates: the first quota[c] slots become the draw.
    for (std::size_t i = 0; i < quota[c]; ++i) {
      std::swap(members[i], members[i + rng.below(members.size() - i)]);
      taken[members[i]] = true;
    }
  }
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (taken[i]) out.train_indices.push_back(i);
  }

  std::vector<std::size_t> rest;
  rest.reserve(source.size() - n_train);
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (!taken[i]) rest.push_back(i);
  }
  rng.shuffle(std::span(rest));
  const std::size_t half = rest.size() / 2;
  out.oracle_indices.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(half));
  out.test_indices.assign(rest.begin() + static_cast<std::ptrdiff_t>(half), rest.end());

  out.train = source.subset(out.train_indices, Role::train);
  out.oracle = source.subset(out.oracle_indices, Role::oracle);
  out.test = source.subset(out.test_indices, Role::test);
  out.seed = seed;
  out.n_train = n_train;
  return out;
}

}  // namespace tabcurate

#include "tabcurate/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabcurate/error.hpp"
#include "tabcurate/rng.hpp"

namespace tabcurate {

namespace {

std::vector<std::size_t> numeric_columns(const TabularSchema& schema) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < schema.features.size(); ++j) {
    if (schema.features[j].kind == FeatureKind::numeric) cols.push_back(j);
  }
  return cols;
}

double numeric_distance2(const Row& a, const Row& b, const std::vector<std::size_t>& cols) {
  double s = 0.0;
  for (auto j : cols) {
    const double d = std::get<double>(a.cells[j]) - std::get<double>(b.cells[j]);
    s += d * d;
  }
  return s;
}

}  // namespace

Dataset smote_generate(const Dataset& train, const SmoteConfig& config) {
  if (config.k_neighbors < 1) throw Error(Errc::invalid_argument, "k_neighbors must be >= 1");
  if (train.empty()) throw Error(Errc::empty_dataset, "SMOTE needs training rows");
  const auto& schema = train.schema();
  const auto cols = numeric_columns(schema);
  const std::size_t k = schema.num_classes();

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < train.size(); ++i) members[train.label_of(i)].push_back(i);
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].size() == 1) {
      throw Error(Errc::class_too_small, "class '" + schema.target.levels[c] + "' has a single row",
                  schema.target.levels[c]);
    }
  }

  // Neighbour lists: k nearest same-class rows, ties broken by row index.
  std::vector<std::vector<std::size_t>> neighbours(train.size());
  for (const auto& group : members) {
    for (auto i : group) {
      std::vector<std::pair<double, std::size_t>> cand;
      for (auto j : group) {
        if (j != i) cand.emplace_back(numeric_distance2(train[i], train[j], cols), j);
      }
      const std::size_t take = std::min(config.k_neighbors, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
      for (std::size_t t = 0; t < take; ++t) neighbours[i].push_back(cand[t].second);
    }
  }

  Dataset out(schema, Role::synthetic);
  const auto n = train.size();
  for (std::size_t r = 0; r < config.n_target; ++r) {
    Rng rng(config.seed, Stream::smote, r);
    // Class proportional to counts then a uniform member is a uniform row.
    const std::size_t base = rng.below(n);
    const auto& nn = neighbours[base];
    const std::size_t other = nn[rng.below(nn.size())];
    const double lambda = rng.uniform();
    Row row = train[base];
    row.was_flipped = false;
    for (auto j : cols) {
      const double a = std::get<double>(train[base].cells[j]);
      const double b = std::get<double>(train[other].cells[j]);
      row.cells[j] = a + lambda * (b - a);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> scott_bandwidths(const Dataset& train) {
  const auto& schema = train.schema();
  const auto cols = numeric_columns(schema);
  if (cols.empty()) throw Error(Errc::no_numeric_features, "KDE needs at least one numeric feature");
  if (train.size() < 2) throw Error(Errc::too_few_rows, "KDE needs at least two rows");
  const double n = static_cast<double>(train.size());
  const double d = static_cast<double>(cols.size());
  const double factor = std::pow(n, -1.0 / (d + 4.0));
  std::vector<double> h(schema.features.size(), 0.0);
  for (auto j : cols) {
    double mean = 0.0;
    for (const auto& row : train.rows()) mean += std::get<double>(row.cells[j]);
    mean /= n;
    double ss = 0.0;
    for (const auto& row : train.rows()) {
      const double dv = std::get<double>(row.cells[j]) - mean;
      ss += dv * dv;
    }
    h[j] = std::sqrt(ss / (n - 1.0)) * factor;
  }
  return h;
}

Dataset kde_generate(const Dataset& train, const KdeConfig& config) {
  if (config.n_target < 1) throw Error(Errc::invalid_argument, "n_target must be >= 1");
  const auto h = scott_bandwidths(train);
  const auto cols = numeric_columns(train.schema());
  Dataset out(train.schema(), Role::synthetic);
  for (std::size_t r = 0; r < config.n_target; ++r) {
    Rng rng(config.seed, Stream::kde, r);
    Row row = train[rng.below(train.size())];
    row.was_flipped = false;
    for (auto j : cols) {
      if (h[j] > 0.0) row.cells[j] = std::get<double>(row.cells[j]) + h[j] * rng.normal();
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace tabcurate

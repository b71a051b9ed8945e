#include "tabcurate/learn/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabcurate/error.hpp"

namespace tabcurate::learn {

namespace {

double gini_sum(const std::vector<double>& counts, double total) {
  // total * gini = total - sum(c^2)/total
  if (total <= 0.0) return 0.0;
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  return total - sq / total;
}

struct Frame {
  std::vector<std::size_t> rows;
  std::size_t depth;
  int node;
};

}  // namespace

DecisionTree DecisionTree::fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                               const DecisionTreeConfig& config, Rng* rng) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return fit_rows(x, y, num_classes, std::move(rows), config, rng);
}

DecisionTree DecisionTree::fit_rows(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                                    std::vector<std::size_t> rows, const DecisionTreeConfig& config, Rng* rng) {
  if (x.rows() != y.size()) throw Error(Errc::invalid_argument, "feature/label size mismatch");
  if (rows.empty()) throw Error(Errc::empty_dataset, "cannot fit a tree on zero rows");

  DecisionTree tree;
  tree.num_classes_ = num_classes;
  const std::size_t d = x.cols();
  const std::size_t min_leaf = std::max<std::size_t>(1, config.min_samples_leaf);
  const std::size_t max_features = config.max_features == 0 ? d : std::min(config.max_features, d);

  std::vector<Frame> stack;
  tree.nodes_.push_back({});
  stack.push_back({std::move(rows), 0, 0});

  std::vector<std::size_t> features(d);
  std::iota(features.begin(), features.end(), 0);
  std::vector<double> total_counts(num_classes), left_counts(num_classes);

  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    auto& idx = frame.rows;

    std::fill(total_counts.begin(), total_counts.end(), 0.0);
    for (auto i : idx) total_counts[static_cast<std::size_t>(y[i])] += 1.0;
    const double n = static_cast<double>(idx.size());
    const double parent_impurity = gini_sum(total_counts, n);

    auto make_leaf = [&] {
      auto& node = tree.nodes_[static_cast<std::size_t>(frame.node)];
      node.feature = -1;
      node.leaf = tree.leaf_proba_.size();
      for (double c : total_counts) tree.leaf_proba_.push_back(c / n);
    };

    const bool depth_capped = config.max_depth != 0 && frame.depth >= config.max_depth;
    if (depth_capped || parent_impurity <= 1e-12 || idx.size() < 2 * min_leaf) {
      make_leaf();
      continue;
    }

    if (max_features < d && rng) rng->shuffle(std::span(features));

    double best_impurity = parent_impurity;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(idx);
    std::size_t examined = 0;
    for (std::size_t fi = 0; fi < d; ++fi) {
      // Keep drawing features past the budget until a usable split is found.
      if (examined >= max_features && best_feature >= 0) break;
      const std::size_t f = features[fi];
      ++examined;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x(a, f), vb = x(b, f);
        return va < vb || (va == vb && a < b);
      });
      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      std::vector<double> right_counts(total_counts);
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        const auto label = static_cast<std::size_t>(y[order[p]]);
        left_counts[label] += 1.0;
        right_counts[label] -= 1.0;
        const double lo = x(order[p], f), hi = x(order[p + 1], f);
        if (lo == hi) continue;
        const std::size_t nl = p + 1, nr = order.size() - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double impurity = gini_sum(left_counts, static_cast<double>(nl)) +
                                gini_sum(right_counts, static_cast<double>(nr));
        if (best_feature < 0 || impurity < best_impurity - 1e-12) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          double mid = lo / 2 + hi / 2;
          if (mid <= lo) mid = hi;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) {
      make_leaf();
      continue;
    }

    std::vector<std::size_t> left, right;
    for (auto i : idx) (x(i, static_cast<std::size_t>(best_feature)) < best_threshold ? left : right).push_back(i);
    const int l = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    const int r = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    auto& node = tree.nodes_[static_cast<std::size_t>(frame.node)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    stack.push_back({std::move(right), frame.depth + 1, r});
    stack.push_back({std::move(left), frame.depth + 1, l});
  }
  return tree;
}

void DecisionTree::predict_proba(std::span<const double> x, std::span<double> out) const {
  std::size_t node = 0;
  while (nodes_[node].feature >= 0) {
    const auto& n = nodes_[node];
    node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  std::copy_n(leaf_proba_.begin() + static_cast<std::ptrdiff_t>(nodes_[node].leaf), num_classes_, out.begin());
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

RandomForest RandomForest::fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                               const RandomForestConfig& config, std::uint64_t seed) {
  require_two_classes(y, num_classes);
  RandomForest forest;
  forest.num_classes_ = num_classes;
  DecisionTreeConfig tree_config;
  tree_config.max_features = config.max_features != 0
                                 ? config.max_features
                                 : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
  const std::size_t n = x.rows();
  for (std::size_t t = 0; t < config.trees; ++t) {
    Rng rng(seed, Stream::bootstrap, t);
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees_.push_back(DecisionTree::fit_rows(x, y, num_classes, std::move(rows), tree_config, &rng));
  }
  return forest;
}

void RandomForest::predict_proba(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> tmp(num_classes_);
  for (const auto& tree : trees_) {
    tree.predict_proba(x, tmp);
    for (std::size_t c = 0; c < num_classes_; ++c) out[c] += tmp[c];
  }
  for (auto& p : out) p /= static_cast<double>(trees_.size());
}

}  // namespace tabcurate::learn

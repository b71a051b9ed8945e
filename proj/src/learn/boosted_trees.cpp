#include "tabcurate/learn/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabcurate/error.hpp"
#include "tabcurate/rng.hpp"

namespace tabcurate::learn {

double eval_tree(const BoostedTrees::Tree& tree, std::span<const double> x) {
  std::size_t node = 0;
  while (tree[node].feature >= 0) {
    const auto& n = tree[node];
    node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return tree[node].value;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<double>& grad, const std::vector<double>& hess,
              const BoostedTreesConfig& config)
      : x_(x), grad_(grad), hess_(hess), config_(config) {}

  BoostedTrees::Tree build(std::vector<std::size_t> rows) {
    tree_.clear();
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  double leaf_value(double g, double h) const { return -g / (h + config_.lambda); }
  double score(double g, double h) const { return g * g / (h + config_.lambda); }

  int grow(std::vector<std::size_t>& idx, std::size_t depth) {
    double g = 0.0, h = 0.0;
    for (auto i : idx) {
      g += grad_[i];
      h += hess_[i];
    }
    const int id = static_cast<int>(tree_.size());
    tree_.push_back({});
    tree_.back().value = leaf_value(g, h);
    if (depth >= config_.max_depth || idx.size() < 2) return id;

    const double parent = score(g, h);
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x_(a, f), vb = x_(b, f);
        return va < vb || (va == vb && a < b);
      });
      double gl = 0.0, hl = 0.0;
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        gl += grad_[order[p]];
        hl += hess_[order[p]];
        const double lo = x_(order[p], f), hi = x_(order[p + 1], f);
        if (lo == hi) continue;
        const double hr = h - hl;
        if (hl < config_.min_child_weight || hr < config_.min_child_weight) continue;
        const double gain = score(gl, hl) + score(g - gl, hr) - parent;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double mid = lo / 2 + hi / 2;
          if (mid <= lo) mid = hi;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      (x_(i, static_cast<std::size_t>(best_feature)) < best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = tree_[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const Matrix& x_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const BoostedTreesConfig& config_;
  BoostedTrees::Tree tree_;
};

}  // namespace

BoostedTrees BoostedTrees::fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                               const BoostedTreesConfig& config) {
  if (x.rows() != y.size()) throw Error(Errc::invalid_argument, "feature/label size mismatch");
  if (num_classes < 2) throw Error(Errc::invalid_argument, "need at least two classes");
  if (!(config.subsample > 0.0 && config.subsample <= 1.0)) {
    throw Error(Errc::invalid_argument, "subsample must lie in (0, 1]");
  }
  require_two_classes(y, num_classes);

  BoostedTrees model;
  model.num_classes_ = num_classes;
  model.learning_rate_ = config.learning_rate;
  const std::size_t n = x.rows();
  const std::size_t outs = model.outputs();

  std::vector<double> prior(num_classes, 0.0);
  for (int label : y) prior[static_cast<std::size_t>(label)] += 1.0;
  for (auto& p : prior) p = std::max(p / static_cast<double>(n), 1e-12);
  if (num_classes == 2) {
    model.base_margin_ = {std::log(prior[1] / prior[0])};
  } else {
    model.base_margin_.resize(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) model.base_margin_[c] = std::log(prior[c]);
  }

  Matrix margins(n, outs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t o = 0; o < outs; ++o) margins(i, o) = model.base_margin_[o];
  }

  std::vector<double> grad(n), hess(n);
  std::vector<double> proba(num_classes);
  Matrix probs(n, outs);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto drawn = std::max<std::size_t>(
      std::min<std::size_t>(n, 2), static_cast<std::size_t>(std::floor(config.subsample * static_cast<double>(n))));
  for (std::size_t r = 0; r < config.rounds; ++r) {
    std::vector<std::size_t> rows = all;
    if (drawn < n) {
      Rng rng(config.seed, Stream::curator, r);
      rng.shuffle(std::span<std::size_t>(rows));
      rows.resize(drawn);
      std::sort(rows.begin(), rows.end());
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (outs == 1) {
        probs(i, 0) = sigmoid(margins(i, 0));
      } else {
        softmax(margins.row(i), probs.row(i));
      }
    }
    std::vector<Tree> round;
    round.reserve(outs);
    for (std::size_t o = 0; o < outs; ++o) {
      const int positive = outs == 1 ? 1 : static_cast<int>(o);
      for (std::size_t i = 0; i < n; ++i) {
        const double p = probs(i, o);
        grad[i] = p - (y[i] == positive ? 1.0 : 0.0);
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      round.push_back(TreeBuilder(x, grad, hess, config).build(rows));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t o = 0; o < outs; ++o) {
        margins(i, o) += config.learning_rate * eval_tree(round[o], x.row(i));
      }
    }
    model.rounds_.push_back(std::move(round));
  }
  return model;
}

void BoostedTrees::to_proba(std::span<const double> margins, std::span<double> out) const {
  if (num_classes_ == 2) {
    const double p = sigmoid(margins[0]);
    out[0] = 1.0 - p;
    out[1] = p;
  } else {
    softmax(margins, out);
  }
}

void BoostedTrees::predict_proba(std::span<const double> x, std::span<double> out) const {
  std::vector<double> margins(base_margin_);
  for (const auto& round : rounds_) {
    for (std::size_t o = 0; o < margins.size(); ++o) margins[o] += learning_rate_ * eval_tree(round[o], x);
  }
  to_proba(margins, out);
}

Matrix BoostedTrees::staged_proba(std::span<const double> x) const {
  Matrix out(rounds_.size(), num_classes_);
  std::vector<double> margins(base_margin_);
  for (std::size_t r = 0; r < rounds_.size(); ++r) {
    for (std::size_t o = 0; o < margins.size(); ++o) margins[o] += learning_rate_ * eval_tree(rounds_[r][o], x);
    to_proba(margins, out.row(r));
  }
  return out;
}

std::size_t BoostedTrees::total_splits() const {
  std::size_t splits = 0;
  for (const auto& round : rounds_) {
    for (const auto& tree : round) {
      splits += static_cast<std::size_t>(std::count_if(tree.begin(), tree.end(), [](const Node& n) {
        return n.feature >= 0;
      }));
    }
  }
  return splits;
}

}  // namespace tabcurate::learn

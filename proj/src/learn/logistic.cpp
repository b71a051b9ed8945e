#include "tabcurate/learn/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabcurate/error.hpp"
#include "tabcurate/rng.hpp"

namespace tabcurate::learn {

void LinearParams::margins(std::span<const double> x, std::span<double> out) const {
  for (std::size_t c = 0; c < num_classes; ++c) {
    double m = bias[c];
    const double* w = weights.data() + c * dim;
    for (std::size_t j = 0; j < dim; ++j) m += w[j] * x[j];
    out[c] = m;
  }
}

void LinearParams::proba(std::span<const double> x, std::span<double> out) const {
  std::vector<double> m(num_classes);
  margins(x, m);
  softmax(m, out);
}

namespace {

LinearParams zero_params(std::size_t k, std::size_t d) {
  LinearParams p;
  p.num_classes = k;
  p.dim = d;
  p.weights.assign(k * d, 0.0);
  p.bias.assign(k, 0.0);
  return p;
}

}  // namespace

LogisticRegression LogisticRegression::fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                                           const LogisticConfig& config) {
  if (x.rows() != y.size()) throw Error(Errc::invalid_argument, "feature/label size mismatch");
  require_two_classes(y, num_classes);
  const std::size_t n = x.rows(), d = x.cols(), k = num_classes;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double l2 = config.l2 < 0.0 ? inv_n : config.l2;

  double mean_sq_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;  // bias column
    for (double v : x.row(i)) s += v * v;
    mean_sq_norm += s * inv_n;
  }
  const double step = 1.0 / (0.5 * mean_sq_norm + l2);

  LogisticRegression model;
  model.params_ = zero_params(k, d);
  auto& params = model.params_;
  std::vector<double> gw(k * d), gb(k), proba(k);
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      params.proba(x.row(i), proba);
      for (std::size_t c = 0; c < k; ++c) {
        const double r = (proba[c] - (y[i] == static_cast<int>(c) ? 1.0 : 0.0)) * inv_n;
        gb[c] += r;
        double* g = gw.data() + c * d;
        for (std::size_t j = 0; j < d; ++j) g[j] += r * x(i, j);
      }
    }
    double worst = 0.0;
    for (std::size_t t = 0; t < k * d; ++t) {
      gw[t] += l2 * params.weights[t];
      worst = std::max(worst, std::abs(gw[t]));
    }
    for (double g : gb) worst = std::max(worst, std::abs(g));
    model.epochs_ = epoch + 1;
    if (worst < config.tolerance) break;
    for (std::size_t t = 0; t < k * d; ++t) params.weights[t] -= step * gw[t];
    for (std::size_t c = 0; c < k; ++c) params.bias[c] -= step * gb[c];
  }
  return model;
}

void LogisticRegression::predict_proba(std::span<const double> x, std::span<double> out) const {
  params_.proba(x, out);
}

SgdLogistic SgdLogistic::fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                             const SgdConfig& config, std::uint64_t seed) {
  if (x.rows() != y.size()) throw Error(Errc::invalid_argument, "feature/label size mismatch");
  require_two_classes(y, num_classes);
  const std::size_t n = x.rows(), d = x.cols(), k = num_classes;

  SgdLogistic model;
  LinearParams params = zero_params(k, d);
  Rng rng(seed, Stream::curator);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> proba(k);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (auto i : order) {
      params.proba(x.row(i), proba);
      for (std::size_t c = 0; c < k; ++c) {
        const double r = proba[c] - (y[i] == static_cast<int>(c) ? 1.0 : 0.0);
        double* w = params.weights.data() + c * d;
        for (std::size_t j = 0; j < d; ++j) w[j] -= config.learning_rate * (r * x(i, j) + config.l2 * w[j]);
        params.bias[c] -= config.learning_rate * r;
      }
    }
    model.snapshots_.push_back(params);
  }
  if (model.snapshots_.empty()) throw Error(Errc::invalid_argument, "SGD needs at least one epoch");
  return model;
}

void SgdLogistic::predict_proba(std::span<const double> x, std::span<double> out) const {
  snapshots_.back().proba(x, out);
}

Matrix SgdLogistic::staged_proba(std::span<const double> x) const {
  Matrix out(snapshots_.size(), num_classes());
  for (std::size_t e = 0; e < snapshots_.size(); ++e) snapshots_[e].proba(x, out.row(e));
  return out;
}

}  // namespace tabcurate::learn

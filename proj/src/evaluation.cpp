#include "tabcurate/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "tabcurate/error.hpp"
#include "tabcurate/learn/boosted_trees.hpp"
#include "tabcurate/learn/decision_tree.hpp"
#include "tabcurate/learn/logistic.hpp"

namespace tabcurate {

const std::vector<DownstreamKind>& all_downstream_kinds() {
  static const std::vector<DownstreamKind> kinds{DownstreamKind::boosted_trees, DownstreamKind::random_forest,
                                                 DownstreamKind::decision_tree, DownstreamKind::logistic_regression};
  return kinds;
}

const char* kind_name(DownstreamKind kind) noexcept {
  switch (kind) {
    case DownstreamKind::boosted_trees: return "boosted_trees";
    case DownstreamKind::random_forest: return "random_forest";
    case DownstreamKind::decision_tree: return "decision_tree";
    case DownstreamKind::logistic_regression: return "logistic_regression";
  }
  return "unknown";
}

DownstreamKind parse_kind(const std::string& name) {
  for (auto k : all_downstream_kinds()) {
    if (name == kind_name(k)) return k;
  }
  throw Error(Errc::invalid_argument, "unknown downstream model '" + name + "'", name);
}

Matrix Model::predict_proba(const Dataset& data) const {
  if (!data.schema().compatible_with(schema)) throw Error(Errc::schema_mismatch, "dataset schema differs from model");
  Matrix out(data.size(), classifier->num_classes());
  std::vector<double> row(encoding.width());
  for (std::size_t i = 0; i < data.size(); ++i) {
    encode_row(encoding, data[i], row);
    classifier->predict_proba(row, out.row(i));
  }
  return out;
}

std::vector<int> Model::predict(const Dataset& data) const {
  const auto proba = predict_proba(data);
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (proba.cols() == 2) {
      out[i] = proba(i, 1) >= 0.5 ? 1 : 0;
    } else {
      const auto r = proba.row(i);
      out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }
  }
  return out;
}

Model fit_downstream(DownstreamKind kind, const Dataset& data, std::uint64_t seed) {
  if (data.empty()) throw Error(Errc::empty_dataset, "cannot fit on an empty dataset");
  const auto mode = kind == DownstreamKind::logistic_regression ? EncodingMode::linear : EncodingMode::tree;
  auto enc = encode(data, mode);
  const std::size_t k = data.schema().num_classes();
  learn::require_two_classes(enc.y, k);

  Model model;
  model.kind = kind;
  model.schema = data.schema();
  model.encoding = enc.stats;
  switch (kind) {
    case DownstreamKind::boosted_trees:
      model.classifier = std::make_shared<learn::BoostedTrees>(learn::BoostedTrees::fit(enc.x, enc.y, k, {}));
      break;
    case DownstreamKind::random_forest: {
      const std::uint64_t forest_seed = splitmix64(seed ^ static_cast<std::uint64_t>(Stream::downstream));
      model.classifier =
          std::make_shared<learn::RandomForest>(learn::RandomForest::fit(enc.x, enc.y, k, {}, forest_seed));
      break;
    }
    case DownstreamKind::decision_tree:
      model.classifier = std::make_shared<learn::DecisionTree>(learn::DecisionTree::fit(enc.x, enc.y, k, {}));
      break;
    case DownstreamKind::logistic_regression:
      model.classifier =
          std::make_shared<learn::LogisticRegression>(learn::LogisticRegression::fit(enc.x, enc.y, k, {}));
      break;
  }
  return model;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(Errc::invalid_argument, "scores and labels differ in length");
  std::size_t pos = 0;
  for (int l : labels) pos += l == 1 ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(Errc::one_class_only, "AUC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (1-based, tie-averaged) ranks of positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]] == 1) rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double roc_auc_multiclass(const Matrix& proba, std::span<const int> y) {
  if (proba.rows() != y.size()) throw Error(Errc::invalid_argument, "probabilities and labels differ in length");
  std::vector<double> scores(y.size());
  std::vector<int> labels(y.size());
  auto column_auc = [&](std::size_t c) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      scores[i] = proba(i, c);
      labels[i] = y[i] == static_cast<int>(c) ? 1 : 0;
    }
    return roc_auc(scores, labels);
  };
  if (proba.cols() == 2) return column_auc(1);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < proba.cols(); ++c) {
    const bool present = std::find(y.begin(), y.end(), static_cast<int>(c)) != y.end();
    const bool all = std::all_of(y.begin(), y.end(), [&](int v) { return v == static_cast<int>(c); });
    if (!present || all) continue;
    total += column_auc(c);
    ++counted;
  }
  if (counted == 0) throw Error(Errc::one_class_only, "AUC needs at least two classes in the test set");
  return total / static_cast<double>(counted);
}

double accuracy(const Model& model, const Dataset& data) {
  if (data.empty()) throw Error(Errc::empty_dataset, "accuracy of an empty dataset");
  const auto pred = model.predict(data);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) hits += pred[i] == static_cast<int>(data.label_of(i)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json per_model = nlohmann::json::object();
  for (const auto& [kind, auc] : per_model_auc) per_model[kind_name(kind)] = auc;
  return {{"source_tag", source_tag},
          {"seed", seed},
          {"n_train_rows", n_train_rows},
          {"per_model_auc", std::move(per_model)},
          {"mean_auc", mean_auc}};
}

EvalReport EvalReport::from_json(const nlohmann::json& doc) {
  EvalReport r;
  r.source_tag = doc.at("source_tag").get<std::string>();
  r.seed = doc.at("seed").get<std::uint64_t>();
  r.n_train_rows = doc.at("n_train_rows").get<std::size_t>();
  for (const auto& [name, auc] : doc.at("per_model_auc").items()) r.per_model_auc[parse_kind(name)] = auc.get<double>();
  r.mean_auc = doc.at("mean_auc").get<double>();
  return r;
}

EvalReport tstr(const Dataset& train_like, const Dataset& test, const std::vector<DownstreamKind>& kinds,
                std::uint64_t seed, std::string source_tag) {
  if (!train_like.schema().compatible_with(test.schema())) {
    throw Error(Errc::schema_mismatch, "training and test schemas differ");
  }
  if (kinds.empty()) throw Error(Errc::invalid_argument, "no downstream models requested");
  if (test.empty()) throw Error(Errc::empty_dataset, "empty test set");
  std::vector<int> y(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) y[i] = static_cast<int>(test.label_of(i));

  EvalReport report;
  report.n_train_rows = train_like.size();
  report.source_tag = std::move(source_tag);
  report.seed = seed;
  double total = 0.0;
  for (auto kind : kinds) {
    const auto model = fit_downstream(kind, train_like, seed);
    const double auc = roc_auc_multiclass(model.predict_proba(test), y);
    report.per_model_auc[kind] = auc;
    total += auc;
  }
  report.mean_auc = total / static_cast<double>(report.per_model_auc.size());
  return report;
}

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

/// Squared distance to the k-th nearest other point, per row.
std::vector<double> knn_radii2(const Matrix& x, std::size_t k) {
  std::vector<double> radii(x.rows());
  std::vector<double> d(x.rows() - 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t t = 0;
    for (std::size_t j = 0; j < x.rows(); ++j) {
      if (j != i) d[t++] = dist2(x.row(i), x.row(j));
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    radii[i] = d[k - 1];
  }
  return radii;
}

double coverage(const Matrix& points, const Matrix& centers, const std::vector<double>& radii2) {
  std::size_t covered = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      if (dist2(points.row(i), centers.row(c)) <= radii2[c]) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(points.rows());
}

}  // namespace

PRResult precision_recall(const Matrix& syn, const Matrix& reference, std::size_t k) {
  if (k < 1) throw Error(Errc::invalid_argument, "k must be >= 1");
  if (syn.rows() <= k || reference.rows() <= k) {
    throw Error(Errc::too_few_rows, "precision/recall needs more than k rows in each set");
  }
  if (syn.cols() != reference.cols()) throw Error(Errc::schema_mismatch, "feature widths differ");
  const auto ref_radii = knn_radii2(reference, k);
  const auto syn_radii = knn_radii2(syn, k);
  return {coverage(syn, reference, ref_radii), coverage(reference, syn, syn_radii), k};
}

PRResult precision_recall(const Dataset& syn, const Dataset& reference, std::size_t k) {
  if (syn.size() <= k || reference.size() <= k) {
    throw Error(Errc::too_few_rows, "precision/recall needs more than k rows in each set");
  }
  const auto stats = fit_encoding(concat(syn, reference), EncodingMode::linear);
  return precision_recall(encode(syn, EncodingMode::linear, &stats).x,
                          encode(reference, EncodingMode::linear, &stats).x, k);
}

double knn_label_agreement(const Matrix& x, std::span<const int> y, std::size_t k) {
  if (k < 1) throw Error(Errc::invalid_argument, "k must be >= 1");
  if (x.rows() < k + 1) throw Error(Errc::too_few_rows, "label agreement needs more than k rows");
  double total = 0.0;
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    d.clear();
    for (std::size_t j = 0; j < x.rows(); ++j) {
      if (j != i) d.emplace_back(dist2(x.row(i), x.row(j)), j);
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    std::size_t same = 0;
    for (std::size_t t = 0; t < k; ++t) same += y[d[t].second] == y[i] ? 1 : 0;
    total += static_cast<double>(same) / static_cast<double>(k);
  }
  return total / static_cast<double>(x.rows());
}

double knn_label_agreement(const Dataset& data, std::size_t k) {
  if (data.size() < k + 1) throw Error(Errc::too_few_rows, "label agreement needs more than k rows");
  const auto enc = encode(data, EncodingMode::linear);
  return knn_label_agreement(enc.x, enc.y, k);
}

double oracle_agreement(const Dataset& oracle, const Dataset& target, DownstreamKind kind, std::uint64_t seed) {
  if (target.empty()) throw Error(Errc::empty_dataset, "no target rows to audit");
  const auto model = fit_downstream(kind, oracle, seed);
  return accuracy(model, target);
}

LinearFit hardness_regression(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw Error(Errc::degenerate_x, "need at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::degenerate_x, "hardness values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    fit.pearson_r = sxy / std::sqrt(sxx * syy);
  } else {
    fit.pearson_r = 0.0;
    fit.r_defined = false;
  }
  return fit;
}

double subgroup_gain(const Dataset& base_train, const Dataset& augmented, const Dataset& test, const Predicate& slice,
                     DownstreamKind kind, std::uint64_t seed) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (slice.matches(test.schema(), test[i])) idx.push_back(i);
  }
  if (idx.empty()) throw Error(Errc::empty_slice, "slice matches no test rows", slice.to_string());
  const auto sliced = test.subset(idx, Role::test);
  const auto augmented_model = fit_downstream(kind, augmented, seed);
  const auto base_model = fit_downstream(kind, base_train, seed);
  return accuracy(augmented_model, sliced) - accuracy(base_model, sliced);
}

OddsGap equalized_odds_diff(const Model& model, const Dataset& test, const Predicate& group) {
  if (test.schema().num_classes() != 2) throw Error(Errc::invalid_argument, "equalized odds needs a binary target");
  const auto pred = model.predict(test);
  // hits[in_group][y], totals[in_group][y] where a hit means yhat == y.
  double hits[2][2] = {{0, 0}, {0, 0}};
  double totals[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int g = group.matches(test.schema(), test[i]) ? 1 : 0;
    const auto y = test.label_of(i);
    totals[g][y] += 1.0;
    hits[g][y] += pred[i] == static_cast<int>(y) ? 1.0 : 0.0;
  }
  OddsGap gap;
  for (int y = 0; y < 2; ++y) {
    if (totals[0][y] == 0.0 || totals[1][y] == 0.0) continue;
    const double d = std::abs(hits[0][y] / totals[0][y] - hits[1][y] / totals[1][y]);
    (y == 1 ? gap.delta_y1 : gap.delta_y0) = d;
  }
  if (!gap.delta_y1 && !gap.delta_y0) {
    throw Error(Errc::empty_cell, "every (group, label) comparison has an empty cell", group.to_string());
  }
  return gap;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

void write_eval_csv_header(std::ostream& out) { out << "dataset,n_train,seed,source_tag,model,auc\n"; }

void write_eval_csv_rows(std::ostream& out, const EvalReport& report, const std::string& dataset,
                         std::size_t n_train) {
  for (const auto& [kind, auc] : report.per_model_auc) {
    out << dataset << ',' << n_train << ',' << report.seed << ',' << report.source_tag << ',' << kind_name(kind)
        << ',' << format_number(auc) << '\n';
  }
}

void write_embedding_csv(std::ostream& out, const std::vector<std::pair<std::string, Dataset>>& sources) {
  if (sources.empty()) return;
  Dataset all(sources.front().second.schema(), Role::merged);
  for (const auto& [tag, data] : sources) all = concat(all, data);
  const auto stats = fit_encoding(all, EncodingMode::linear);
  const auto& schema = all.schema();
  out << "source";
  for (const auto& name : stats.column_names(schema)) out << ',' << name;
  out << ',' << schema.target.name << '\n';
  std::vector<double> row(stats.width());
  for (const auto& [tag, data] : sources) {
    for (const auto& r : data.rows()) {
      encode_row(stats, r, row);
      out << tag;
      for (double v : row) out << ',' << format_number(v);
      out << ',' << r.label << '\n';
    }
  }
}

}  // namespace tabcurate

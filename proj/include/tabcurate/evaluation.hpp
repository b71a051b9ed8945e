#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tabcurate/dataset.hpp"
#include "tabcurate/encoding.hpp"
#include "tabcurate/learn/classifier.hpp"
#include "tabcurate/predicate.hpp"

namespace tabcurate {

enum class DownstreamKind { boosted_trees, random_forest, decision_tree, logistic_regression };

const std::vector<DownstreamKind>& all_downstream_kinds();
const char* kind_name(DownstreamKind kind) noexcept;
DownstreamKind parse_kind(const std::string& name);

/// A fitted downstream learner together with the encoding it was trained on.
struct Model {
  DownstreamKind kind = DownstreamKind::boosted_trees;
  TabularSchema schema;
  EncodingStats encoding;
  std::shared_ptr<const learn::Classifier> classifier;

  Matrix predict_proba(const Dataset& data) const;
  /// Binary: class 1 iff its probability >= 0.5; otherwise argmax.
  std::vector<int> predict(const Dataset& data) const;
};

/// Defaults: boosted trees 100 rounds of depth 3 at rate 0.1; forest of 100
/// bootstrapped Gini trees with floor(sqrt(d)) candidate features per split;
/// one unpruned Gini tree; L2 logistic regression (C = 1) on one-hot and
/// standardized inputs. Throws SingleClassTrain.
Model fit_downstream(DownstreamKind kind, const Dataset& data, std::uint64_t seed);

/// Mann-Whitney AUC, ties counted 1/2. Labels are 0/1. Throws OneClassOnly.
double roc_auc(std::span<const double> scores, std::span<const int> labels);
/// Binary: AUC of the class-1 column. k > 2: macro one-vs-rest over classes
/// present in `y`.
double roc_auc_multiclass(const Matrix& proba, std::span<const int> y);

double accuracy(const Model& model, const Dataset& data);

struct EvalReport {
  std::map<DownstreamKind, double> per_model_auc;
  double mean_auc = 0.0;
  std::size_t n_train_rows = 0;
  std::string source_tag;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& doc);
};

/// Train on `train_like`, score the real `test` set. Throws SchemaMismatch,
/// OneClassOnly, SingleClassTrain.
EvalReport tstr(const Dataset& train_like, const Dataset& test, const std::vector<DownstreamKind>& kinds,
                std::uint64_t seed, std::string source_tag = {});

struct PRResult {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t k = 5;
};

/// k-NN hypersphere coverage. precision: fraction of synthetic points inside
/// the k-NN ball of some reference point; recall: the same with roles swapped.
/// Throws TooFewRows unless both sets have more than k rows.
PRResult precision_recall(const Matrix& syn, const Matrix& reference, std::size_t k = 5);
/// Linear encoding fitted on the union of both sets.
PRResult precision_recall(const Dataset& syn, const Dataset& reference, std::size_t k = 5);

/// Mean same-label fraction among each row's k nearest neighbours (self
/// excluded, Euclidean over the linear encoding). Throws TooFewRows.
double knn_label_agreement(const Dataset& data, std::size_t k = 10);
double knn_label_agreement(const Matrix& x, std::span<const int> y, std::size_t k = 10);

/// Fraction of `target` rows whose label equals the prediction of a model of
/// the given kind fitted on `oracle`.
double oracle_agreement(const Dataset& oracle, const Dataset& target, DownstreamKind kind, std::uint64_t seed);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
  bool r_defined = true;  // false when the response is constant (r reported as 0)
};

/// OLS of auc on hardness plus Pearson r. Throws DegenerateX unless there are
/// at least two distinct hardness values.
LinearFit hardness_regression(const std::vector<std::pair<double, double>>& points);

/// Accuracy on the sliced test rows of a model trained on `augmented` minus
/// that of the same kind trained on `base_train`. Throws EmptySlice.
double subgroup_gain(const Dataset& base_train, const Dataset& augmented, const Dataset& test, const Predicate& slice,
                     DownstreamKind kind, std::uint64_t seed);

struct OddsGap {
  std::optional<double> delta_y1;  // |P(Yhat=1 | not group, Y=1) - P(Yhat=1 | group, Y=1)|
  std::optional<double> delta_y0;  // |P(Yhat=0 | not group, Y=0) - P(Yhat=0 | group, Y=0)|
};

/// Binary targets only. A delta whose cells are empty is left unset; throws
/// EmptyCell when both are unset.
OddsGap equalized_odds_diff(const Model& model, const Dataset& test, const Predicate& group);

struct Summary {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(n); 0 for n < 2
  std::size_t n = 0;
};
Summary summarize(std::span<const double> values);

/// Flat CSV mirroring a results table: dataset,n_train,seed,source_tag,model,auc.
void write_eval_csv_header(std::ostream& out);
void write_eval_csv_rows(std::ostream& out, const EvalReport& report, const std::string& dataset,
                         std::size_t n_train);

/// Encoded features plus a source column, for external embedding plots. All
/// datasets share one linear encoding fitted on their union.
void write_embedding_csv(std::ostream& out, const std::vector<std::pair<std::string, Dataset>>& sources);

}  // namespace tabcurate

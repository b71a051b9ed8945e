#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabcurate/dataset.hpp"
#include "tabcurate/encoding.hpp"
#include "tabcurate/learn/classifier.hpp"
#include "tabcurate/matrix.hpp"

namespace tabcurate {

enum class Backbone { boosted_trees, sgd_linear };

struct CuratorConfig {
  Backbone backbone = Backbone::boosted_trees;
  std::size_t n_checkpoints = 100;  // boosting rounds or SGD epochs
  std::size_t tree_depth = 3;
  double learning_rate = 0.3;
  double min_child_weight = 0.1;
  double subsample = 0.5;  // boosted_trees: row fraction per round, drawn with the curator seed
  double tau_conf = 0.2;
  double tau_al_fraction = 0.75;

  /// Throws Error(invalid_argument) unless E >= 2, tau_conf in (0,1) and
  /// tau_al_fraction in (0,1].
  void validate() const;
};

/// E checkpoints of one training run on the real training set.
struct CheckpointEnsemble {
  std::shared_ptr<const learn::StagedClassifier> model;
  EncodingStats encoding;
  TabularSchema schema;

  std::size_t num_stages() const { return model->num_stages(); }
  const std::vector<std::string>& classes() const { return encoding.classes; }
};

enum class Verdict { unset, selected, discarded };

struct SampleDynamics {
  double confidence = 0.0;  // mean over checkpoints of the label's probability
  double aleatoric = 0.0;   // mean over checkpoints of p (1 - p)
  Verdict verdict = Verdict::unset;
};

struct Thresholds {
  double tau_conf = 0.0;
  double tau_al = 0.0;
};

struct CurationOutcome {
  std::vector<SampleDynamics> per_sample;  // aligned with the synthetic rows
  Thresholds thresholds;
  Dataset curated;
  Dataset discarded;
  double hardness = 0.0;  // discarded fraction

  std::vector<std::size_t> curated_indices() const;
  std::vector<std::size_t> discarded_indices() const;
};

/// Trains the backbone on `train` and keeps every checkpoint. Throws
/// SingleClassTrain when fewer than two classes are present, EmptyDataset when
/// |train| < 2.
CheckpointEnsemble fit_checkpoints(const Dataset& train, const CuratorConfig& config, std::uint64_t seed);

/// E x k matrix of checkpoint probabilities for one row. Throws SchemaMismatch.
Matrix staged_proba(const CheckpointEnsemble& ensemble, const Row& x);

/// Confidence and aleatoric uncertainty from an E x k table of checkpoint
/// probabilities for the given label column.
SampleDynamics dynamics_from_stages(const Matrix& stage_proba, std::size_t label);

/// Throws UnknownLabel when y is not one of the ensemble's classes.
SampleDynamics dynamics(const CheckpointEnsemble& ensemble, const Row& x, const std::string& y);

/// tau_conf from the config; tau_al = fraction * (max - min) of the aleatoric
/// values. Throws EmptyInput.
Thresholds derive_thresholds(const std::vector<SampleDynamics>& all, const CuratorConfig& config);

/// Discarded iff confidence < tau_conf and aleatoric < tau_al (both strict).
Verdict classify(const SampleDynamics& d, const Thresholds& t);

/// Scores every synthetic row, derives thresholds over the whole set and splits
/// it into curated (Selected, original order) and discarded. Throws EmptySynthetic.
CurationOutcome curate(const Dataset& syn, const CheckpointEnsemble& ensemble, const CuratorConfig& config);

/// Applies explicit thresholds to precomputed dynamics (no re-derivation).
CurationOutcome apply_thresholds(const Dataset& syn, std::vector<SampleDynamics> per_sample,
                                 const Thresholds& thresholds);

nlohmann::json outcome_to_json(const CurationOutcome& outcome);

const char* backbone_name(Backbone backbone) noexcept;
Backbone parse_backbone(const std::string& name);

}  // namespace tabcurate

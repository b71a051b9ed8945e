#include "tabcurate/curator.hpp"

#include <algorithm>

#include "tabcurate/error.hpp"
#include "tabcurate/learn/boosted_trees.hpp"
#include "tabcurate/learn/logistic.hpp"

namespace tabcurate {

void CuratorConfig::validate() const {
  if (n_checkpoints < 2) throw Error(Errc::invalid_argument, "need at least two checkpoints");
  if (!(tau_conf > 0.0 && tau_conf < 1.0)) throw Error(Errc::invalid_argument, "tau_conf must lie in (0, 1)");
  if (!(tau_al_fraction > 0.0 && tau_al_fraction <= 1.0)) {
    throw Error(Errc::invalid_argument, "tau_al_fraction must lie in (0, 1]");
  }
  if (tree_depth < 1) throw Error(Errc::invalid_argument, "tree_depth must be positive");
  if (!(learning_rate > 0.0)) throw Error(Errc::invalid_argument, "learning_rate must be positive");
  if (!(min_child_weight >= 0.0)) throw Error(Errc::invalid_argument, "min_child_weight must be non-negative");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw Error(Errc::invalid_argument, "subsample must lie in (0, 1]");
}

CheckpointEnsemble fit_checkpoints(const Dataset& train, const CuratorConfig& config, std::uint64_t seed) {
  config.validate();
  if (train.size() < 2) throw Error(Errc::empty_dataset, "curator needs at least two training rows");
  const auto mode = config.backbone == Backbone::boosted_trees ? EncodingMode::tree : EncodingMode::linear;
  auto enc = encode(train, mode);

  CheckpointEnsemble ensemble;
  ensemble.schema = train.schema();
  ensemble.encoding = enc.stats;
  const std::size_t k = train.schema().num_classes();
  if (config.backbone == Backbone::boosted_trees) {
    learn::BoostedTreesConfig bt;
    bt.rounds = config.n_checkpoints;
    bt.max_depth = config.tree_depth;
    bt.learning_rate = config.learning_rate;
    bt.min_child_weight = config.min_child_weight;
    bt.subsample = config.subsample;
    bt.seed = seed;
    ensemble.model = std::make_shared<learn::BoostedTrees>(learn::BoostedTrees::fit(enc.x, enc.y, k, bt));
  } else {
    learn::SgdConfig sgd;
    sgd.epochs = config.n_checkpoints;
    sgd.learning_rate = config.learning_rate;
    ensemble.model = std::make_shared<learn::SgdLogistic>(learn::SgdLogistic::fit(enc.x, enc.y, k, sgd, seed));
  }
  return ensemble;
}

Matrix staged_proba(const CheckpointEnsemble& ensemble, const Row& x) {
  std::vector<double> encoded(ensemble.encoding.width());
  encode_row(ensemble.encoding, x, encoded);
  return ensemble.model->staged_proba(encoded);
}

SampleDynamics dynamics_from_stages(const Matrix& stage_proba, std::size_t label) {
  if (stage_proba.rows() == 0) throw Error(Errc::empty_input, "no checkpoints");
  if (label >= stage_proba.cols()) throw Error(Errc::unknown_label, "label column out of range");
  double conf = 0.0, al = 0.0;
  for (std::size_t e = 0; e < stage_proba.rows(); ++e) {
    const double p = stage_proba(e, label);
    conf += p;
    al += p * (1.0 - p);
  }
  const double stages = static_cast<double>(stage_proba.rows());
  return {conf / stages, al / stages, Verdict::unset};
}

SampleDynamics dynamics(const CheckpointEnsemble& ensemble, const Row& x, const std::string& y) {
  const auto& classes = ensemble.classes();
  auto it = std::find(classes.begin(), classes.end(), y);
  if (it == classes.end()) throw Error(Errc::unknown_label, "label '" + y + "' unknown to the ensemble", y);
  return dynamics_from_stages(staged_proba(ensemble, x), static_cast<std::size_t>(it - classes.begin()));
}

Thresholds derive_thresholds(const std::vector<SampleDynamics>& all, const CuratorConfig& config) {
  if (all.empty()) throw Error(Errc::empty_input, "no dynamics to derive thresholds from");
  const auto [lo, hi] = std::minmax_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.aleatoric < b.aleatoric;
  });
  return {config.tau_conf, config.tau_al_fraction * (hi->aleatoric - lo->aleatoric)};
}

Verdict classify(const SampleDynamics& d, const Thresholds& t) {
  return d.confidence < t.tau_conf && d.aleatoric < t.tau_al ? Verdict::discarded : Verdict::selected;
}

CurationOutcome apply_thresholds(const Dataset& syn, std::vector<SampleDynamics> per_sample,
                                 const Thresholds& thresholds) {
  if (per_sample.size() != syn.size()) throw Error(Errc::invalid_argument, "dynamics not aligned with rows");
  CurationOutcome out;
  out.thresholds = thresholds;
  out.curated = Dataset(syn.schema(), Role::curated);
  out.discarded = Dataset(syn.schema(), Role::discarded);
  for (std::size_t i = 0; i < syn.size(); ++i) {
    per_sample[i].verdict = classify(per_sample[i], thresholds);
    (per_sample[i].verdict == Verdict::selected ? out.curated : out.discarded).push_back(syn[i]);
  }
  out.per_sample = std::move(per_sample);
  out.hardness = syn.empty() ? 0.0 : static_cast<double>(out.discarded.size()) / static_cast<double>(syn.size());
  return out;
}

CurationOutcome curate(const Dataset& syn, const CheckpointEnsemble& ensemble, const CuratorConfig& config) {
  if (syn.empty()) throw Error(Errc::empty_synthetic, "nothing to curate");
  if (!syn.schema().compatible_with(ensemble.schema)) {
    throw Error(Errc::schema_mismatch, "synthetic schema differs from the curator's training schema");
  }
  std::vector<SampleDynamics> per_sample;
  per_sample.reserve(syn.size());
  for (const auto& row : syn.rows()) per_sample.push_back(dynamics(ensemble, row, row.label));
  const auto thresholds = derive_thresholds(per_sample, config);
  return apply_thresholds(syn, std::move(per_sample), thresholds);
}

std::vector<std::size_t> CurationOutcome::curated_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < per_sample.size(); ++i) {
    if (per_sample[i].verdict == Verdict::selected) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> CurationOutcome::discarded_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < per_sample.size(); ++i) {
    if (per_sample[i].verdict == Verdict::discarded) out.push_back(i);
  }
  return out;
}

nlohmann::json outcome_to_json(const CurationOutcome& outcome) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < outcome.per_sample.size(); ++i) {
    const auto& s = outcome.per_sample[i];
    samples.push_back({{"index", i},
                       {"confidence", s.confidence},
                       {"aleatoric", s.aleatoric},
                       {"verdict", s.verdict == Verdict::discarded ? "Discarded" : "Selected"}});
  }
  return {{"thresholds", {{"tau_conf", outcome.thresholds.tau_conf}, {"tau_al", outcome.thresholds.tau_al}}},
          {"hardness", outcome.hardness},
          {"n_synthetic", outcome.per_sample.size()},
          {"n_curated", outcome.curated.size()},
          {"n_discarded", outcome.discarded.size()},
          {"per_sample", std::move(samples)}};
}

const char* backbone_name(Backbone backbone) noexcept {
  return backbone == Backbone::boosted_trees ? "boosted_trees" : "sgd_linear";
}

Backbone parse_backbone(const std::string& name) {
  if (name == "boosted_trees") return Backbone::boosted_trees;
  if (name == "sgd_linear") return Backbone::sgd_linear;
  throw Error(Errc::invalid_argument, "unknown backbone '" + name + "'", name);
}

}  // namespace tabcurate

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabcurate/dataset.hpp"

namespace tabcurate {

/// Labels are flipped for points with |x[axis]| > threshold.
struct NoiseRegion {
  std::size_t axis = 0;
  double threshold = 2.5;
};

/// Gaussian mixture with diagonal covariances standing in for an LLM generator.
struct MockSpec {
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;  // diagonal
  std::vector<std::string> class_of_component;
  double label_noise_rate = 0.0;
  std::optional<NoiseRegion> region;

  void validate() const;
  std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }
  /// Distinct component classes, sorted.
  std::vector<std::string> labels() const;
};

/// Features x1..xd (numeric), target "y" over spec.labels().
TabularSchema mock_schema(const MockSpec& spec);

/// Two unit-variance components centred at (-separation, 0) with class "1" and
/// (+separation, 0) with class "0".
MockSpec two_gaussians(double separation = 1.5);

/// n i.i.d. rows: uniform component, diagonal Gaussian draw, component class;
/// then the region flip, then independent flips with label_noise_rate (to a
/// uniformly chosen other class). Row::was_flipped records whether the emitted
/// label differs from the component class.
Dataset mock_sample(const MockSpec& spec, std::size_t n, std::uint64_t seed, Role role = Role::synthetic);

MockSpec mock_spec_from_json(const nlohmann::json& doc);
nlohmann::json mock_spec_to_json(const MockSpec& spec);

}  // namespace tabcurate

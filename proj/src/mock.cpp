#include "tabcurate/mock.hpp"

#include <algorithm>
#include <cmath>

#include "tabcurate/error.hpp"
#include "tabcurate/rng.hpp"

namespace tabcurate {

void MockSpec::validate() const {
  if (means.empty()) throw Error(Errc::invalid_argument, "mock spec needs at least one component");
  if (variances.size() != means.size() || class_of_component.size() != means.size()) {
    throw Error(Errc::invalid_argument, "mock spec component lists differ in length");
  }
  const auto d = dim();
  if (d == 0) throw Error(Errc::invalid_argument, "mock components need at least one dimension");
  for (std::size_t c = 0; c < means.size(); ++c) {
    if (means[c].size() != d || variances[c].size() != d) {
      throw Error(Errc::invalid_argument, "mock component dimensions differ");
    }
    for (double v : variances[c]) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_argument, "variances must be finite and >= 0");
    }
  }
  if (!(label_noise_rate >= 0.0 && label_noise_rate <= 1.0)) {
    throw Error(Errc::invalid_argument, "label_noise_rate must lie in [0, 1]");
  }
  if (region && region->axis >= d) throw Error(Errc::invalid_argument, "noise region axis out of range");
  if (labels().size() < 2) throw Error(Errc::invalid_argument, "mock spec needs at least two classes");
}

std::vector<std::string> MockSpec::labels() const {
  std::vector<std::string> out(class_of_component);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TabularSchema mock_schema(const MockSpec& spec) {
  TabularSchema schema;
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    schema.features.push_back({"x" + std::to_string(j + 1), FeatureKind::numeric,
                               "coordinate " + std::to_string(j + 1) + " of a Gaussian mixture draw", {}});
  }
  schema.target = {"y", spec.labels()};
  schema.background = "Points drawn from a Gaussian mixture; the label is the generating component's class.";
  return schema;
}

MockSpec two_gaussians(double separation) {
  MockSpec spec;
  spec.means = {{-separation, 0.0}, {separation, 0.0}};
  spec.variances = {{1.0, 1.0}, {1.0, 1.0}};
  spec.class_of_component = {"1", "0"};
  return spec;
}

Dataset mock_sample(const MockSpec& spec, std::size_t n, std::uint64_t seed, Role role) {
  spec.validate();
  const auto labels = spec.labels();
  const std::size_t k = labels.size();
  Dataset out(mock_schema(spec), role);
  Rng rng(seed, Stream::mock);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t comp = rng.below(spec.means.size());
    Row row;
    row.cells.reserve(spec.dim());
    std::vector<double> point(spec.dim());
    for (std::size_t j = 0; j < spec.dim(); ++j) {
      point[j] = spec.means[comp][j] + std::sqrt(spec.variances[comp][j]) * rng.normal();
      row.cells.emplace_back(point[j]);
    }
    const auto truth = static_cast<std::size_t>(
        std::find(labels.begin(), labels.end(), spec.class_of_component[comp]) - labels.begin());
    std::size_t label = truth;
    if (spec.region && std::abs(point[spec.region->axis]) > spec.region->threshold) {
      label = (label + 1) % k;
    }
    // Always draw so the stream layout does not depend on the rate.
    const double u = rng.uniform();
    const std::size_t shift = 1 + rng.below(k - 1);
    if (u < spec.label_noise_rate) label = (label + shift) % k;
    row.label = labels[label];
    row.was_flipped = label != truth;
    out.push_back(std::move(row));
  }
  return out;
}

MockSpec mock_spec_from_json(const nlohmann::json& doc) {
  MockSpec spec;
  try {
    spec.means = doc.at("means").get<std::vector<std::vector<double>>>();
    spec.variances = doc.at("variances").get<std::vector<std::vector<double>>>();
    for (const auto& c : doc.at("class_of_component")) {
      spec.class_of_component.push_back(c.is_string() ? c.get<std::string>() : c.dump());
    }
    spec.label_noise_rate = doc.value("label_noise_rate", 0.0);
    if (doc.contains("noise_region") && !doc.at("noise_region").is_null()) {
      const auto& r = doc.at("noise_region");
      spec.region = NoiseRegion{r.at("axis").get<std::size_t>(), r.at("threshold").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("malformed mock spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json mock_spec_to_json(const MockSpec& spec) {
  nlohmann::json doc{{"means", spec.means},
                     {"variances", spec.variances},
                     {"class_of_component", spec.class_of_component},
                     {"label_noise_rate", spec.label_noise_rate}};
  if (spec.region) {
    doc["noise_region"] = {{"axis", spec.region->axis}, {"threshold", spec.region->threshold}};
  } else {
    doc["noise_region"] = nullptr;
  }
  return doc;
}

}  // namespace tabcurate

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tabcurate {

enum class FeatureKind { numeric, categorical };

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::string description;
  std::vector<std::string> levels;  // categorical only

  bool operator==(const Feature&) const = default;
};

struct Target {
  std::string name;
  std::vector<std::string> levels;

  bool operator==(const Target&) const = default;
};

/// Feature/label vocabulary shared by ingestion, prompting, parsing and learning.
struct TabularSchema {
  std::vector<Feature> features;
  Target target;
  std::string background;

  bool operator==(const TabularSchema&) const = default;

  /// Throws Error(schema_mismatch) when an invariant is violated: duplicate or
  /// target-colliding feature names, categorical features without levels,
  /// numeric features with levels, or fewer than two target levels.
  void validate() const;

  std::size_t num_classes() const { return target.levels.size(); }
  std::size_t numeric_count() const;
  std::optional<std::size_t> feature_index(std::string_view name) const;
  std::optional<std::size_t> label_index(std::string_view label) const;
  /// Whether two schemas describe the same columns (names, kinds, label set);
  /// descriptions and background may differ.
  bool compatible_with(const TabularSchema& other) const;
};

TabularSchema schema_from_json(const nlohmann::json& doc);
nlohmann::json schema_to_json(const TabularSchema& schema);
TabularSchema load_schema(const std::filesystem::path& path);

}  // namespace tabcurate

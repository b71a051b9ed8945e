#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "tabcurate/dataset.hpp"
#include "tabcurate/schema.hpp"

namespace testing_support {

using namespace tabcurate;

inline TabularSchema numeric_schema(std::size_t d, std::vector<std::string> labels = {"0", "1"}) {
  TabularSchema s;
  for (std::size_t j = 0; j < d; ++j) s.features.push_back({"x" + std::to_string(j + 1), FeatureKind::numeric, "", {}});
  s.target = {"y", std::move(labels)};
  return s;
}

/// Two numeric columns, one categorical column, binary label.
inline TabularSchema mixed_schema() {
  TabularSchema s;
  s.features.push_back({"age", FeatureKind::numeric, "age in years", {}});
  s.features.push_back({"color", FeatureKind::categorical, "favourite colour", {"blue", "green", "red"}});
  s.features.push_back({"score", FeatureKind::numeric, "test score", {}});
  s.target = {"label", {"no", "yes"}};
  s.background = "A toy survey.";
  return s;
}

inline Row numeric_row(std::initializer_list<double> values, std::string label) {
  Row r;
  for (double v : values) r.cells.emplace_back(v);
  r.label = std::move(label);
  return r;
}

inline Row mixed_row(double age, std::string color, double score, std::string label) {
  Row r;
  r.cells.emplace_back(age);
  r.cells.emplace_back(Categorical{std::move(color), false});
  r.cells.emplace_back(score);
  r.label = std::move(label);
  return r;
}

}  // namespace testing_support

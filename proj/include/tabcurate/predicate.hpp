#pragma once

#include <string>
#include <string_view>

#include "tabcurate/dataset.hpp"

namespace tabcurate {

/// Row filter over a single feature, e.g. "abs(x1)>2.5", "age<=30",
/// "sex==female". "*" matches every row.
struct Predicate {
  enum class Op { lt, le, gt, ge, eq, ne, any };

  std::string feature;
  bool absolute = false;  // compare |value| (numeric features only)
  Op op = Op::any;
  double number = 0.0;
  std::string text;  // right-hand side as written

  static Predicate parse(std::string_view spec);
  static Predicate always() { return {}; }

  bool matches(const TabularSchema& schema, const Row& row) const;
  std::string to_string() const;
};

}  // namespace tabcurate

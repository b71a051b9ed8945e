#pragma once

#include <stdexcept>
#include <string>

namespace tabcurate {

enum class Errc {
  invalid_argument,
  io,
  missing_column,
  empty_dataset,
  schema_mismatch,
  insufficient_class_samples,
  n_too_large,
  empty_train,
  auth_error,
  rate_limited,
  budget_exhausted,
  transport_error,
  single_class_train,
  unknown_label,
  empty_input,
  empty_synthetic,
  class_too_small,
  no_numeric_features,
  one_class_only,
  too_few_rows,
  degenerate_x,
  empty_slice,
  empty_cell,
};

/// Stable machine-readable name, e.g. "MissingColumn".
const char* errc_name(Errc code) noexcept;

/// All library failures are reported through this exception type. `detail()`
/// carries the offending value (column name, class label, ...) when there is one.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace tabcurate

#include "tabcurate/error.hpp"

namespace tabcurate {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io: return "IoError";
    case Errc::missing_column: return "MissingColumn";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::schema_mismatch: return "SchemaMismatch";
    case Errc::insufficient_class_samples: return "InsufficientClassSamples";
    case Errc::n_too_large: return "NTooLarge";
    case Errc::empty_train: return "EmptyTrain";
    case Errc::auth_error: return "AuthError";
    case Errc::rate_limited: return "RateLimited";
    case Errc::budget_exhausted: return "BudgetExhausted";
    case Errc::transport_error: return "TransportError";
    case Errc::single_class_train: return "SingleClassTrain";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::empty_input: return "EmptyInput";
    case Errc::empty_synthetic: return "EmptySynthetic";
    case Errc::class_too_small: return "ClassTooSmall";
    case Errc::no_numeric_features: return "NoNumericFeatures";
    case Errc::one_class_only: return "OneClassOnly";
    case Errc::too_few_rows: return "TooFewRows";
    case Errc::degenerate_x: return "DegenerateX";
    case Errc::empty_slice: return "EmptySlice";
    case Errc::empty_cell: return "EmptyCell";
  }
  return "Unknown";
}

}  // namespace tabcurate

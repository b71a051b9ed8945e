#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tabcurate/dataset.hpp"
#include "tabcurate/matrix.hpp"

namespace tabcurate {

/// tree: numerics raw, categoricals as ordinal codes over lexicographically
/// sorted levels (novel values get the reserved code = number of levels).
/// linear: numerics z-scored, categoricals one-hot (novel values all zeros).
enum class EncodingMode { tree, linear };

struct FeatureEncoding {
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> sorted_levels;
  double mean = 0.0;
  double scale = 1.0;  // population std; 1 when the column is constant
};

struct EncodingStats {
  EncodingMode mode = EncodingMode::tree;
  std::vector<FeatureEncoding> features;
  std::vector<std::string> classes;  // target levels, schema order

  std::size_t width() const;
  std::vector<std::string> column_names(const TabularSchema& schema) const;
  /// Ordinal code for a categorical value; reserved code when unseen.
  std::size_t code_of(std::size_t feature, const std::string& value) const;
};

struct Encoded {
  Matrix x;
  std::vector<int> y;          // label index per row
  EncodingStats stats;
  std::vector<std::uint8_t> novel;  // 1 when the row had any unseen level
};

EncodingStats fit_encoding(const Dataset& data, EncodingMode mode);

/// Encodes with `fit_stats` when given, otherwise with stats fitted on `data`.
/// Throws EmptyDataset.
Encoded encode(const Dataset& data, EncodingMode mode, const EncodingStats* fit_stats = nullptr);

/// Writes one encoded row into `out` (size stats.width()); returns true when a
/// categorical value was outside the fitted levels.
bool encode_row(const EncodingStats& stats, const Row& row, std::span<double> out);

}  // namespace tabcurate

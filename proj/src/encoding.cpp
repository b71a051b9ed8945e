#include "tabcurate/encoding.hpp"

#include <algorithm>
#include <cmath>

#include "tabcurate/error.hpp"

namespace tabcurate {

std::size_t EncodingStats::width() const {
  if (mode == EncodingMode::tree) return features.size();
  std::size_t w = 0;
  for (const auto& f : features) w += f.kind == FeatureKind::numeric ? 1 : f.sorted_levels.size();
  return w;
}

std::vector<std::string> EncodingStats::column_names(const TabularSchema& schema) const {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto& name = schema.features.at(j).name;
    if (mode == EncodingMode::tree || features[j].kind == FeatureKind::numeric) {
      names.push_back(name);
    } else {
      for (const auto& level : features[j].sorted_levels) names.push_back(name + "=" + level);
    }
  }
  return names;
}

std::size_t EncodingStats::code_of(std::size_t feature, const std::string& value) const {
  const auto& levels = features.at(feature).sorted_levels;
  auto it = std::lower_bound(levels.begin(), levels.end(), value);
  if (it == levels.end() || *it != value) return levels.size();
  return static_cast<std::size_t>(it - levels.begin());
}

EncodingStats fit_encoding(const Dataset& data, EncodingMode mode) {
  if (data.empty()) throw Error(Errc::empty_dataset, "cannot fit an encoding on an empty dataset");
  const auto& schema = data.schema();
  EncodingStats stats;
  stats.mode = mode;
  stats.classes = schema.target.levels;
  for (std::size_t j = 0; j < schema.features.size(); ++j) {
    const auto& f = schema.features[j];
    FeatureEncoding fe;
    fe.kind = f.kind;
    if (f.kind == FeatureKind::categorical) {
      fe.sorted_levels = f.levels;
      std::sort(fe.sorted_levels.begin(), fe.sorted_levels.end());
    } else if (mode == EncodingMode::linear) {
      const double n = static_cast<double>(data.size());
      double sum = 0.0;
      for (const auto& row : data.rows()) sum += std::get<double>(row.cells[j]);
      fe.mean = sum / n;
      double ss = 0.0;
      for (const auto& row : data.rows()) {
        const double d = std::get<double>(row.cells[j]) - fe.mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / n);
      fe.scale = sd > 0.0 ? sd : 1.0;
    }
    stats.features.push_back(std::move(fe));
  }
  return stats;
}

bool encode_row(const EncodingStats& stats, const Row& row, std::span<double> out) {
  if (row.cells.size() != stats.features.size()) {
    throw Error(Errc::schema_mismatch, "row width does not match encoding");
  }
  bool novel = false;
  std::size_t col = 0;
  for (std::size_t j = 0; j < stats.features.size(); ++j) {
    const auto& fe = stats.features[j];
    if (fe.kind == FeatureKind::numeric) {
      const auto* v = std::get_if<double>(&row.cells[j]);
      if (!v) throw Error(Errc::schema_mismatch, "expected numeric cell");
      out[col++] = stats.mode == EncodingMode::linear ? (*v - fe.mean) / fe.scale : *v;
      continue;
    }
    const auto* cat = std::get_if<Categorical>(&row.cells[j]);
    if (!cat) throw Error(Errc::schema_mismatch, "expected categorical cell");
    const std::size_t code = stats.code_of(j, cat->value);
    const bool unseen = code == fe.sorted_levels.size();
    novel = novel || unseen;
    if (stats.mode == EncodingMode::tree) {
      out[col++] = static_cast<double>(code);
    } else {
      for (std::size_t l = 0; l < fe.sorted_levels.size(); ++l) out[col + l] = l == code ? 1.0 : 0.0;
      col += fe.sorted_levels.size();
    }
  }
  return novel;
}

Encoded encode(const Dataset& data, EncodingMode mode, const EncodingStats* fit_stats) {
  if (data.empty()) throw Error(Errc::empty_dataset, "cannot encode an empty dataset");
  Encoded out;
  out.stats = fit_stats ? *fit_stats : fit_encoding(data, mode);
  if (out.stats.mode != mode) throw Error(Errc::invalid_argument, "encoding stats were fitted for another mode");
  out.x = Matrix(data.size(), out.stats.width());
  out.y.resize(data.size());
  out.novel.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.novel[i] = encode_row(out.stats, data[i], out.x.row(i)) ? 1 : 0;
    const auto& classes = out.stats.classes;
    auto it = std::find(classes.begin(), classes.end(), data[i].label);
    out.y[i] = it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
  }
  return out;
}

}  // namespace tabcurate

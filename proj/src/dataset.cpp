#include "tabcurate/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "tabcurate/error.hpp"

namespace tabcurate {

bool same_values(const Row& a, const Row& b) {
  if (a.label != b.label || a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto& ca = a.cells[i];
    const auto& cb = b.cells[i];
    if (ca.index() != cb.index()) return false;
    if (const auto* da = std::get_if<double>(&ca)) {
      if (*da != std::get<double>(cb)) return false;
    } else if (std::get<Categorical>(ca).value != std::get<Categorical>(cb).value) {
      return false;
    }
  }
  return true;
}

const char* role_name(Role role) noexcept {
  switch (role) {
    case Role::train: return "train";
    case Role::oracle: return "oracle";
    case Role::test: return "test";
    case Role::synthetic: return "synthetic";
    case Role::curated: return "curated";
    case Role::discarded: return "discarded";
    case Role::merged: return "merged";
  }
  return "unknown";
}

Dataset::Dataset(TabularSchema schema, Role role) : schema_(std::move(schema)), role_(role) {
  schema_.validate();
}

void Dataset::push_back(Row row) {
  const auto& features = schema_.features;
  if (row.cells.size() != features.size()) {
    throw Error(Errc::schema_mismatch, "row has " + std::to_string(row.cells.size()) + " cells, schema has " +
                                           std::to_string(features.size()));
  }
  for (std::size_t j = 0; j < features.size(); ++j) {
    auto& cell = row.cells[j];
    if (features[j].kind == FeatureKind::numeric) {
      const auto* value = std::get_if<double>(&cell);
      if (!value) throw Error(Errc::schema_mismatch, "expected numeric cell", features[j].name);
      if (!std::isfinite(*value)) throw Error(Errc::schema_mismatch, "non-finite numeric cell", features[j].name);
    } else {
      auto* value = std::get_if<Categorical>(&cell);
      if (!value) throw Error(Errc::schema_mismatch, "expected categorical cell", features[j].name);
      const auto& levels = features[j].levels;
      value->novel = std::find(levels.begin(), levels.end(), value->value) == levels.end();
    }
  }
  if (!schema_.label_index(row.label)) {
    throw Error(Errc::unknown_label, "label '" + row.label + "' not in target levels", row.label);
  }
  rows_.push_back(std::move(row));
}

std::size_t Dataset::label_of(std::size_t i) const { return *schema_.label_index(rows_[i].label); }

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(schema_.num_classes(), 0);
  for (std::size_t i = 0; i < rows_.size(); ++i) ++counts[label_of(i)];
  return counts;
}

Dataset Dataset::with_role(Role role) const {
  Dataset copy = *this;
  copy.role_ = role;
  return copy;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices, Role role) const {
  Dataset out = with_role(role);
  out.rows_.clear();
  out.rows_.reserve(indices.size());
  for (auto i : indices) out.rows_.push_back(rows_.at(i));
  return out;
}

Dataset concat(const Dataset& a, const Dataset& b, Role role) {
  if (!a.schema().compatible_with(b.schema())) {
    throw Error(Errc::schema_mismatch, "cannot concatenate datasets with different schemas");
  }
  Dataset out(a.schema(), role);
  for (const auto& r : a.rows()) out.push_back(r);
  for (const auto& r : b.rows()) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A bare line break yields one empty field; treat it as a blank line.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  // Skip UTF-8 byte order mark.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started || field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

IngestResult ingest_csv(std::istream& in, const TabularSchema& schema, const IngestOptions& options) {
  schema.validate();
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto records = parse_csv(buffer.str());
  if (records.empty()) throw Error(Errc::empty_dataset, "CSV has no header row");

  const auto& header = records.front();
  std::map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) column_of[std::string(trim(header[c]))] = c;

  std::vector<std::size_t> feature_columns;
  for (const auto& f : schema.features) {
    auto it = column_of.find(f.name);
    if (it == column_of.end()) throw Error(Errc::missing_column, "missing column '" + f.name + "'", f.name);
    feature_columns.push_back(it->second);
  }
  auto target_it = column_of.find(schema.target.name);
  if (target_it == column_of.end()) {
    throw Error(Errc::missing_column, "missing column '" + schema.target.name + "'", schema.target.name);
  }
  const std::size_t target_column = target_it->second;
  if (!options.allow_extra_columns && header.size() != schema.features.size() + 1) {
    throw Error(Errc::schema_mismatch, "CSV has columns not declared in the schema");
  }

  IngestReport report;
  const auto nf = schema.features.size();

  // First pass: type every cell, remembering which failed.
  struct Pending {
    Row row;
    std::vector<bool> missing;
  };
  std::vector<Pending> pending;
  std::vector<std::vector<double>> numeric_seen(nf);
  std::vector<std::map<std::string, std::size_t>> level_counts(nf);

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++report.rows_read;
    if (rec.size() != header.size()) {
      ++report.dropped_bad_feature;
      continue;
    }
    const auto label = std::string(trim(rec[target_column]));
    if (!schema.label_index(label)) {
      ++report.dropped_bad_label;
      continue;
    }
    Pending p;
    p.row.label = label;
    p.row.cells.resize(nf);
    p.missing.assign(nf, false);
    for (std::size_t j = 0; j < nf; ++j) {
      const auto raw = trim(rec[feature_columns[j]]);
      if (schema.features[j].kind == FeatureKind::numeric) {
        if (auto v = parse_number(raw)) {
          p.row.cells[j] = *v;
          numeric_seen[j].push_back(*v);
        } else {
          p.missing[j] = true;
        }
      } else if (raw.empty()) {
        p.missing[j] = true;
      } else {
        p.row.cells[j] = Categorical{std::string(raw)};
        ++level_counts[j][std::string(raw)];
      }
    }
    pending.push_back(std::move(p));
  }

  std::vector<std::optional<Cell>> fill(nf);
  if (options.impute) {
    for (std::size_t j = 0; j < nf; ++j) {
      if (schema.features[j].kind == FeatureKind::numeric) {
        if (!numeric_seen[j].empty()) fill[j] = median(numeric_seen[j]);
      } else if (!level_counts[j].empty()) {
        // Mode; ties resolve to the lexicographically smallest level.
        auto best = level_counts[j].begin();
        for (auto it = level_counts[j].begin(); it != level_counts[j].end(); ++it) {
          if (it->second > best->second) best = it;
        }
        fill[j] = Categorical{best->first};
      }
    }
  }

  Dataset data(schema, options.role);
  for (auto& p : pending) {
    bool ok = true;
    for (std::size_t j = 0; j < nf && ok; ++j) {
      if (!p.missing[j]) continue;
      if (options.impute && fill[j]) {
        p.row.cells[j] = *fill[j];
        ++report.imputed_cells;
      } else {
        ok = false;
      }
    }
    if (!ok) {
      ++report.dropped_bad_feature;
      continue;
    }
    data.push_back(std::move(p.row));
  }
  if (data.empty()) throw Error(Errc::empty_dataset, "no valid rows after ingestion");
  return {std::move(data), report};
}

IngestResult ingest_csv(const std::filesystem::path& path, const TabularSchema& schema,
                        const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string(), path.string());
  return ingest_csv(in, schema, options);
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& schema = data.schema();
  for (const auto& f : schema.features) out << quote_field(f.name) << ',';
  out << quote_field(schema.target.name) << "\r\n";
  for (const auto& row : data.rows()) {
    for (const auto& cell : row.cells) {
      if (const auto* d = std::get_if<double>(&cell)) {
        out << format_number(*d);
      } else {
        out << quote_field(std::get<Categorical>(cell).value);
      }
      out << ',';
    }
    out << quote_field(row.label) << "\r\n";
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path.string(), path.string());
  write_csv(out, data);
}

}  // namespace tabcurate

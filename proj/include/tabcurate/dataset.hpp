#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tabcurate/schema.hpp"

namespace tabcurate {

/// A categorical cell. `novel` marks a value outside the declared levels.
struct Categorical {
  std::string value;
  bool novel = false;

  bool operator==(const Categorical&) const = default;
};

using Cell = std::variant<double, Categorical>;

struct Row {
  std::vector<Cell> cells;  // one per schema feature, schema order
  std::string label;
  // Audit bit set by the mock generator when the emitted label differs from the
  // generating component's class. Never read by encoders or learners.
  bool was_flipped = false;
};

/// Exact match on every cell value and the label (audit bits and novel flags ignored).
bool same_values(const Row& a, const Row& b);

enum class Role { train, oracle, test, synthetic, curated, discarded, merged };

const char* role_name(Role role) noexcept;

class Dataset {
 public:
  Dataset() = default;
  Dataset(TabularSchema schema, Role role);

  const TabularSchema& schema() const { return schema_; }
  Role role() const { return role_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& operator[](std::size_t i) const { return rows_[i]; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// Appends after checking the row against the schema: one cell per feature
  /// with matching kind, finite numerics, label among the target levels.
  /// Categorical cells outside the declared levels are flagged novel.
  void push_back(Row row);

  /// Label index (into schema().target.levels) of row i.
  std::size_t label_of(std::size_t i) const;
  /// Row count per target level, in level order.
  std::vector<std::size_t> class_counts() const;

  Dataset with_role(Role role) const;
  /// Rows at the given indices, in the given order.
  Dataset subset(const std::vector<std::size_t>& indices, Role role) const;

 private:
  TabularSchema schema_;
  Role role_ = Role::train;
  std::vector<Row> rows_;
};

/// Concatenate datasets over compatible schemas (the first schema is kept).
Dataset concat(const Dataset& a, const Dataset& b, Role role = Role::merged);

// ---------------------------------------------------------------------------
// CSV ingestion (RFC 4180, header required)

struct IngestOptions {
  bool impute = false;
  bool allow_extra_columns = false;
  Role role = Role::train;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t dropped_bad_label = 0;
  std::size_t dropped_bad_feature = 0;
  std::size_t imputed_cells = 0;

  std::size_t dropped() const { return dropped_bad_label + dropped_bad_feature; }
};

struct IngestResult {
  Dataset data;
  IngestReport report;
};

/// Parse RFC 4180 text into records. Quoted fields may contain commas, doubled
/// quotes and line breaks; CRLF and LF line endings are accepted.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

IngestResult ingest_csv(std::istream& in, const TabularSchema& schema,
                        const IngestOptions& options = {});
IngestResult ingest_csv(const std::filesystem::path& path, const TabularSchema& schema,
                        const IngestOptions& options = {});

/// Header is the feature names followed by the target name. Numbers use the
/// shortest representation that round-trips.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::filesystem::path& path, const Dataset& data);

std::string format_number(double value);

}  // namespace tabcurate

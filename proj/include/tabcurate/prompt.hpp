#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabcurate/dataset.hpp"

namespace tabcurate {

/// Default user-message template. Placeholders: {background}, {examples},
/// {schema}, {n}.
extern const char* const kDefaultPromptTemplate;
extern const char* const kSystemRole;

struct PromptBundle {
  std::string system_text;
  std::optional<std::string> background_block;
  std::string examples_block;
  std::string schema_block;
  std::string instruction_block;  // template directive lines with {n} filled in
  std::size_t n_requested = 0;
  bool include_context = true;
  std::string template_text = kDefaultPromptTemplate;

  /// The user message.
  std::string render() const;
  /// Same prompt asking for a different number of rows.
  PromptBundle with_requested(std::size_t n) const;
};

/// One JSON object per line, keys in schema order (features, then the target).
std::string serialize_row(const TabularSchema& schema, const Row& row);
std::string serialize_examples(const Dataset& data);

/// Throws EmptyTrain when `train` has no rows, SchemaMismatch when its schema
/// differs from `schema`.
PromptBundle build_prompt(const TabularSchema& schema, const Dataset& train, std::size_t n_requested,
                          bool include_context, std::string template_text = kDefaultPromptTemplate);

std::string load_prompt_template(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Parsing

enum class RejectReason {
  malformed_json,
  not_an_object,
  missing_label,
  invalid_label,
  missing_feature,
  invalid_numeric,
  duplicate_of_train,
  duplicate_of_synthetic,
};

const char* reject_reason_name(RejectReason reason) noexcept;

struct Rejection {
  std::string raw_text;
  RejectReason reason;
  std::string field;  // offending key, when applicable
};

struct ParseReport {
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;
  std::size_t coerced = 0;  // accepted rows that needed a type coercion
  std::size_t novel_levels = 0;
  std::size_t duplicates_of_train = 0;
  std::size_t duplicates_of_synthetic = 0;  // across batches, see llm_client

  std::size_t candidates() const { return accepted + rejected.size(); }
  void merge(const ParseReport& other);
  nlohmann::json to_json(std::size_t max_examples = 20) const;
};

struct ParseResult {
  std::vector<Row> rows;
  ParseReport report;
};

/// Extracts row objects from fenced code blocks (or the whole text when there
/// are none), validates them against the schema and drops exact copies of
/// rows in `train`. Never throws on malformed text; every candidate object is
/// either accepted or listed in the report.
ParseResult parse_llm_output(std::string_view text, const TabularSchema& schema, const Dataset& train);

/// Candidate JSON object substrings found in `text` (fenced blocks preferred).
std::vector<std::string> extract_candidates(std::string_view text);

}  // namespace tabcurate

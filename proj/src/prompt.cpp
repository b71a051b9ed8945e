#include "tabcurate/prompt.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tabcurate/error.hpp"

namespace tabcurate {

const char* const kSystemRole = "You are a tabular synthetic data generation model.";

const char* const kDefaultPromptTemplate =
    "You are a synthetic data generator.\n"
    "Your goal is to produce data which mirrors the given examples in causal structure and feature and label "
    "distributions but also produce as diverse samples as possible.\n"
    "\n"
    "I will give you real examples first.\n"
    "\n"
    "{background}\n"
    "Leverage your knowledge of the domain to generate {n} realistic but diverse samples. "
    "Treat each sample as an i.i.d. draw from the distribution of the examples, following the structural and "
    "feature-label relationships present in the data.\n"
    "\n"
    "example data:\n"
    "{examples}\n"
    "\n"
    "The output should be a markdown code snippet formatted in the following schema, with one JSON object per "
    "line:\n"
    "\n"
    "{schema}\n"
    "\n"
    "DO NOT COPY THE EXAMPLES but generate realistic but new and diverse samples which have the correct label "
    "conditioned on the features.\n";

namespace {

constexpr std::string_view kPlaceholders[] = {"{background}", "{examples}", "{schema}", "{n}"};

/// Single pass, so placeholder-like text inside substituted values is left alone.
std::string substitute(std::string_view tmpl, const std::map<std::string_view, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool matched = false;
    if (tmpl[i] == '{') {
      for (auto ph : kPlaceholders) {
        if (tmpl.substr(i, ph.size()) == ph) {
          auto it = values.find(ph);
          if (it != values.end()) {
            out += it->second;
            i += ph.size();
            matched = true;
          }
          break;
        }
      }
    }
    if (!matched) out.push_back(tmpl[i++]);
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string instruction_lines(std::string_view tmpl, std::size_t n) {
  std::vector<std::string> kept;
  for (auto line : split_lines(tmpl)) {
    if (line.empty()) continue;
    if (line.find("{background}") != std::string_view::npos || line.find("{examples}") != std::string_view::npos ||
        line.find("{schema}") != std::string_view::npos) {
      continue;
    }
    kept.push_back(substitute(line, {{"{n}", std::to_string(n)}}));
  }
  return join(kept, "\n");
}

std::string schema_block(const TabularSchema& schema, bool include_context) {
  std::vector<std::string> lines;
  for (const auto& f : schema.features) {
    std::string line = nlohmann::json(f.name).dump() + ": string";
    if (include_context) {
      line += "  // " + (f.description.empty() ? std::string("feature column") : f.description);
      if (f.kind == FeatureKind::categorical) line += " (one of: " + join(f.levels, ", ") + ")";
    }
    lines.push_back(std::move(line));
  }
  std::string label = nlohmann::json(schema.target.name).dump() + ": string";
  if (include_context) label += "  // label, one of: " + join(schema.target.levels, ", ");
  lines.push_back(std::move(label));
  return join(lines, "\n");
}

}  // namespace

std::string PromptBundle::render() const {
  std::vector<std::string> out_lines;
  for (auto line : split_lines(template_text)) {
    if (line == "{background}" && !background_block) continue;
    out_lines.push_back(substitute(line, {{"{background}", background_block.value_or("")},
                                          {"{examples}", examples_block},
                                          {"{schema}", schema_block},
                                          {"{n}", std::to_string(n_requested)}}));
  }
  return join(out_lines, "\n");
}

PromptBundle PromptBundle::with_requested(std::size_t n) const {
  PromptBundle copy = *this;
  copy.n_requested = n;
  copy.instruction_block = instruction_lines(template_text, n);
  return copy;
}

std::string serialize_row(const TabularSchema& schema, const Row& row) {
  // Built by hand so keys keep schema order.
  std::string out = "{";
  for (std::size_t j = 0; j < schema.features.size(); ++j) {
    out += nlohmann::json(schema.features[j].name).dump();
    out += ": ";
    if (const auto* d = std::get_if<double>(&row.cells[j])) {
      out += format_number(*d);
    } else {
      out += nlohmann::json(std::get<Categorical>(row.cells[j]).value).dump();
    }
    out += ", ";
  }
  out += nlohmann::json(schema.target.name).dump() + ": " + nlohmann::json(row.label).dump() + "}";
  return out;
}

std::string serialize_examples(const Dataset& data) {
  std::vector<std::string> lines;
  lines.reserve(data.size());
  for (const auto& row : data.rows()) lines.push_back(serialize_row(data.schema(), row));
  return join(lines, "\n");
}

PromptBundle build_prompt(const TabularSchema& schema, const Dataset& train, std::size_t n_requested,
                          bool include_context, std::string template_text) {
  if (train.empty()) throw Error(Errc::empty_train, "the prompt needs at least one training example");
  if (!train.schema().compatible_with(schema)) {
    throw Error(Errc::schema_mismatch, "training data schema differs from the prompt schema");
  }
  PromptBundle bundle;
  bundle.system_text = kSystemRole;
  bundle.include_context = include_context;
  if (include_context) bundle.background_block = "Context: " + schema.background;
  bundle.examples_block = serialize_examples(train);
  bundle.schema_block = schema_block(schema, include_context);
  bundle.template_text = std::move(template_text);
  return bundle.with_requested(n_requested);
}

std::string load_prompt_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open prompt template " + path.string(), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

const char* reject_reason_name(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::malformed_json: return "MalformedJson";
    case RejectReason::not_an_object: return "NotAnObject";
    case RejectReason::missing_label: return "MissingLabel";
    case RejectReason::invalid_label: return "InvalidLabel";
    case RejectReason::missing_feature: return "MissingFeature";
    case RejectReason::invalid_numeric: return "InvalidNumeric";
    case RejectReason::duplicate_of_train: return "DuplicateOfTrain";
    case RejectReason::duplicate_of_synthetic: return "DuplicateOfSynthetic";
  }
  return "Unknown";
}

void ParseReport::merge(const ParseReport& other) {
  accepted += other.accepted;
  rejected.insert(rejected.end(), other.rejected.begin(), other.rejected.end());
  coerced += other.coerced;
  novel_levels += other.novel_levels;
  duplicates_of_train += other.duplicates_of_train;
  duplicates_of_synthetic += other.duplicates_of_synthetic;
}

nlohmann::json ParseReport::to_json(std::size_t max_examples) const {
  std::map<std::string, std::size_t> by_reason;
  for (const auto& r : rejected) ++by_reason[reject_reason_name(r.reason)];
  nlohmann::json examples = nlohmann::json::array();
  for (std::size_t i = 0; i < rejected.size() && i < max_examples; ++i) {
    examples.push_back({{"reason", reject_reason_name(rejected[i].reason)},
                        {"field", rejected[i].field},
                        {"raw_text", rejected[i].raw_text}});
  }
  return {{"accepted", accepted},
          {"rejected", rejected.size()},
          {"coerced", coerced},
          {"novel_levels", novel_levels},
          {"duplicates_of_train", duplicates_of_train},
          {"duplicates_of_synthetic", duplicates_of_synthetic},
          {"rejected_by_reason", by_reason},
          {"rejected_examples", std::move(examples)}};
}

namespace {

/// Balanced top-level {...} spans, skipping braces inside JSON strings. An
/// object left open at the end of the region is returned as is.
void scan_objects(std::string_view region, std::vector<std::string>& out) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    const char c = region[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"' && depth > 0) {
      in_string = true;
    } else if (c == '{') {
      if (depth == 0) start = i;
      ++depth;
    } else if (c == '}' && depth > 0) {
      if (--depth == 0) out.emplace_back(region.substr(start, i - start + 1));
    }
  }
  if (depth > 0) out.emplace_back(region.substr(start));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 1e15) return std::to_string(static_cast<long long>(d));
    return format_number(d);
  }
  return v.dump();
}

std::string clip(std::string_view s) {
  constexpr std::size_t kMax = 500;
  return std::string(s.substr(0, kMax));
}

bool has_schema_key(const nlohmann::json& obj, const TabularSchema& schema) {
  if (obj.contains(schema.target.name)) return true;
  for (const auto& f : schema.features) {
    if (obj.contains(f.name)) return true;
  }
  return false;
}

/// Wrapper objects such as {"samples": [{...}, ...]} are unpacked.
void flatten(const nlohmann::json& value, const TabularSchema& schema, std::vector<nlohmann::json>& out) {
  if (value.is_object() && !has_schema_key(value, schema)) {
    bool unpacked = false;
    for (const auto& [key, inner] : value.items()) {
      if (inner.is_array()) {
        for (const auto& item : inner) {
          if (item.is_object()) {
            flatten(item, schema, out);
            unpacked = true;
          }
        }
      }
    }
    if (unpacked) return;
  }
  out.push_back(value);
}

struct Converted {
  std::optional<Row> row;
  RejectReason reason = RejectReason::malformed_json;
  std::string field;
  bool coerced = false;
  std::size_t novel = 0;
};

Converted convert(const nlohmann::json& obj, const TabularSchema& schema) {
  Converted c;
  if (!obj.is_object()) {
    c.reason = RejectReason::not_an_object;
    return c;
  }
  Row row;
  auto label_it = obj.find(schema.target.name);
  if (label_it == obj.end() || label_it->is_null()) {
    c.reason = RejectReason::missing_label;
    c.field = schema.target.name;
    return c;
  }
  if (!(label_it->is_string() || label_it->is_number() || label_it->is_boolean())) {
    c.reason = RejectReason::invalid_label;
    c.field = schema.target.name;
    return c;
  }
  std::string label = std::string(trim(scalar_text(*label_it)));
  if (!label_it->is_string()) c.coerced = true;
  if (!schema.label_index(label)) {
    // Numeric spellings such as "1.0" for level "1".
    bool matched = false;
    if (auto v = to_number(label)) {
      for (const auto& level : schema.target.levels) {
        if (auto lv = to_number(level); lv && *lv == *v) {
          label = level;
          matched = true;
          c.coerced = true;
          break;
        }
      }
    }
    if (!matched) {
      c.reason = RejectReason::invalid_label;
      c.field = schema.target.name;
      return c;
    }
  }
  row.label = std::move(label);

  for (const auto& f : schema.features) {
    auto it = obj.find(f.name);
    if (it == obj.end() || it->is_null()) {
      c.reason = RejectReason::missing_feature;
      c.field = f.name;
      return c;
    }
    if (f.kind == FeatureKind::numeric) {
      std::optional<double> value;
      if (it->is_number()) {
        value = it->get<double>();
        if (!std::isfinite(*value)) value.reset();
      } else if (it->is_string()) {
        value = to_number(it->get<std::string>());
        if (value) c.coerced = true;
      }
      if (!value) {
        c.reason = RejectReason::invalid_numeric;
        c.field = f.name;
        return c;
      }
      row.cells.emplace_back(*value);
    } else {
      if (!(it->is_string() || it->is_number() || it->is_boolean())) {
        c.reason = RejectReason::missing_feature;
        c.field = f.name;
        return c;
      }
      if (!it->is_string()) c.coerced = true;
      Categorical cat{scalar_text(*it)};
      cat.novel = std::find(f.levels.begin(), f.levels.end(), cat.value) == f.levels.end();
      if (cat.novel) ++c.novel;
      row.cells.emplace_back(std::move(cat));
    }
  }
  c.row = std::move(row);
  return c;
}

}  // namespace

std::vector<std::string> extract_candidates(std::string_view text) {
  std::vector<std::string_view> blocks;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    auto body = text.find('\n', open);
    if (body == std::string_view::npos) break;
    ++body;
    const auto close = text.find("```", body);
    if (close == std::string_view::npos) {
      blocks.push_back(text.substr(body));  // truncated response
      break;
    }
    blocks.push_back(text.substr(body, close - body));
    pos = close + 3;
  }
  std::vector<std::string> out;
  if (blocks.empty()) {
    scan_objects(text, out);
  } else {
    for (auto b : blocks) scan_objects(b, out);
  }
  return out;
}

ParseResult parse_llm_output(std::string_view text, const TabularSchema& schema, const Dataset& train) {
  ParseResult result;
  auto& report = result.report;
  auto candidates = extract_candidates(text);
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const std::string candidate = candidates[ci];
    auto parsed = nlohmann::json::parse(candidate, nullptr, false);
    if (parsed.is_discarded()) {
      // A truncated record swallows the ones after it; give up only on the
      // prefix and rescan from the next opening brace.
      const auto next = candidate.find('{', 1);
      report.rejected.push_back({clip(candidate.substr(0, next)), RejectReason::malformed_json, {}});
      if (next != std::string::npos) {
        std::vector<std::string> rest;
        scan_objects(std::string_view(candidate).substr(next), rest);
        candidates.insert(candidates.begin() + static_cast<std::ptrdiff_t>(ci + 1), rest.begin(), rest.end());
      }
      continue;
    }
    std::vector<nlohmann::json> objects;
    flatten(parsed, schema, objects);
    for (const auto& obj : objects) {
      auto converted = convert(obj, schema);
      const std::string raw = objects.size() == 1 ? clip(candidate) : clip(obj.dump());
      if (!converted.row) {
        report.rejected.push_back({raw, converted.reason, converted.field});
        continue;
      }
      const bool copy_of_train = std::any_of(train.rows().begin(), train.rows().end(),
                                             [&](const Row& t) { return same_values(t, *converted.row); });
      if (copy_of_train) {
        ++report.duplicates_of_train;
        report.rejected.push_back({raw, RejectReason::duplicate_of_train, {}});
        continue;
      }
      ++report.accepted;
      if (converted.coerced) ++report.coerced;
      report.novel_levels += converted.novel;
      result.rows.push_back(std::move(*converted.row));
    }
  }
  return result;
}

}  // namespace tabcurate

#include "tabcurate/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "tabcurate/error.hpp"

namespace tabcurate {

void TabularSchema::validate() const {
  std::set<std::string> names;
  for (const auto& f : features) {
    if (f.name.empty()) throw Error(Errc::schema_mismatch, "feature with empty name");
    if (!names.insert(f.name).second) {
      throw Error(Errc::schema_mismatch, "duplicate feature name '" + f.name + "'", f.name);
    }
    if (f.kind == FeatureKind::categorical && f.levels.empty()) {
      throw Error(Errc::schema_mismatch, "categorical feature '" + f.name + "' lists no levels", f.name);
    }
    if (f.kind == FeatureKind::numeric && !f.levels.empty()) {
      throw Error(Errc::schema_mismatch, "numeric feature '" + f.name + "' lists levels", f.name);
    }
  }
  if (target.name.empty()) throw Error(Errc::schema_mismatch, "target has no name");
  if (names.count(target.name)) {
    throw Error(Errc::schema_mismatch, "target name collides with a feature", target.name);
  }
  if (target.levels.size() < 2) {
    throw Error(Errc::schema_mismatch, "target needs at least two levels", target.name);
  }
  std::set<std::string> levels(target.levels.begin(), target.levels.end());
  if (levels.size() != target.levels.size()) {
    throw Error(Errc::schema_mismatch, "duplicate target level", target.name);
  }
}

std::size_t TabularSchema::numeric_count() const {
  return static_cast<std::size_t>(std::count_if(features.begin(), features.end(), [](const Feature& f) {
    return f.kind == FeatureKind::numeric;
  }));
}

std::optional<std::size_t> TabularSchema::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TabularSchema::label_index(std::string_view label) const {
  for (std::size_t i = 0; i < target.levels.size(); ++i) {
    if (target.levels[i] == label) return i;
  }
  return std::nullopt;
}

bool TabularSchema::compatible_with(const TabularSchema& other) const {
  if (features.size() != other.features.size() || target != other.target) return false;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& a = features[i];
    const auto& b = other.features[i];
    if (a.name != b.name || a.kind != b.kind || a.levels != b.levels) return false;
  }
  return true;
}

TabularSchema schema_from_json(const nlohmann::json& doc) {
  TabularSchema schema;
  try {
    for (const auto& jf : doc.at("features")) {
      Feature f;
      f.name = jf.at("name").get<std::string>();
      const auto kind = jf.at("kind").get<std::string>();
      if (kind == "numeric") {
        f.kind = FeatureKind::numeric;
      } else if (kind == "categorical") {
        f.kind = FeatureKind::categorical;
      } else {
        throw Error(Errc::schema_mismatch, "unknown feature kind '" + kind + "'", f.name);
      }
      f.description = jf.value("description", std::string{});
      if (jf.contains("levels") && !jf.at("levels").is_null()) {
        for (const auto& level : jf.at("levels")) {
          f.levels.push_back(level.is_string() ? level.get<std::string>() : level.dump());
        }
      }
      schema.features.push_back(std::move(f));
    }
    const auto& jt = doc.at("target");
    schema.target.name = jt.at("name").get<std::string>();
    for (const auto& level : jt.at("levels")) {
      schema.target.levels.push_back(level.is_string() ? level.get<std::string>() : level.dump());
    }
    schema.background = doc.value("background", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema_mismatch, std::string("malformed schema document: ") + e.what());
  }
  schema.validate();
  return schema;
}

nlohmann::json schema_to_json(const TabularSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features) {
    nlohmann::json jf{{"name", f.name},
                      {"kind", f.kind == FeatureKind::numeric ? "numeric" : "categorical"},
                      {"description", f.description}};
    if (f.kind == FeatureKind::categorical) jf["levels"] = f.levels;
    features.push_back(std::move(jf));
  }
  return nlohmann::json{{"features", std::move(features)},
                        {"target", {{"name", schema.target.name}, {"levels", schema.target.levels}}},
                        {"background", schema.background}};
}

TabularSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open schema file " + path.string(), path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::schema_mismatch, "schema file is not valid JSON: " + path.string());
  return schema_from_json(doc);
}

}  // namespace tabcurate

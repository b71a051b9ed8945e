#include "tabcurate/predicate.hpp"

#include <charconv>
#include <cmath>

#include "tabcurate/error.hpp"

namespace tabcurate {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

Predicate Predicate::parse(std::string_view spec) {
  spec = trim(spec);
  if (spec == "*" || spec.empty()) return always();

  struct OpToken {
    std::string_view token;
    Op op;
  };
  // Two-character operators first so "<=" is not read as "<".
  constexpr OpToken tokens[] = {{"<=", Op::le}, {">=", Op::ge}, {"==", Op::eq}, {"!=", Op::ne},
                                {"<", Op::lt},  {">", Op::gt},  {"=", Op::eq}};
  for (const auto& t : tokens) {
    const auto pos = spec.find(t.token);
    if (pos == std::string_view::npos) continue;
    Predicate p;
    p.op = t.op;
    auto lhs = trim(spec.substr(0, pos));
    p.text = std::string(trim(spec.substr(pos + t.token.size())));
    if (lhs.size() > 5 && lhs.substr(0, 4) == "abs(" && lhs.back() == ')') {
      p.absolute = true;
      lhs = trim(lhs.substr(4, lhs.size() - 5));
    }
    p.feature = std::string(lhs);
    if (p.feature.empty() || p.text.empty()) break;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(p.text.data(), p.text.data() + p.text.size(), v);
    if (ec == std::errc{} && ptr == p.text.data() + p.text.size()) {
      p.number = v;
    } else if (p.op != Op::eq && p.op != Op::ne) {
      throw Error(Errc::invalid_argument, "ordered comparison needs a number: " + std::string(spec));
    } else if (p.absolute) {
      throw Error(Errc::invalid_argument, "abs() needs a numeric comparison: " + std::string(spec));
    }
    return p;
  }
  throw Error(Errc::invalid_argument, "cannot parse predicate '" + std::string(spec) + "'");
}

bool Predicate::matches(const TabularSchema& schema, const Row& row) const {
  if (op == Op::any) return true;
  const auto idx = schema.feature_index(feature);
  if (!idx) throw Error(Errc::schema_mismatch, "predicate feature '" + feature + "' not in schema", feature);
  const auto& cell = row.cells.at(*idx);
  if (const auto* d = std::get_if<double>(&cell)) {
    const double v = absolute ? std::abs(*d) : *d;
    switch (op) {
      case Op::lt: return v < number;
      case Op::le: return v <= number;
      case Op::gt: return v > number;
      case Op::ge: return v >= number;
      case Op::eq: return v == number;
      case Op::ne: return v != number;
      case Op::any: return true;
    }
  }
  const auto& value = std::get<Categorical>(cell).value;
  if (op == Op::eq) return value == text;
  if (op == Op::ne) return value != text;
  throw Error(Errc::invalid_argument, "ordered comparison on categorical feature '" + feature + "'", feature);
}

std::string Predicate::to_string() const {
  if (op == Op::any) return "*";
  static constexpr const char* names[] = {"<", "<=", ">", ">=", "==", "!="};
  const std::string lhs = absolute ? "abs(" + feature + ")" : feature;
  return lhs + names[static_cast<int>(op)] + text;
}

}  // namespace tabcurate

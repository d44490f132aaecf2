#include "brl/item.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "brl/errors.hpp"

namespace brl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s, const std::string& context) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DataError("not a number: '" + s + "' in " + context);
  return v;
}

void check_feature_name(const std::string& name) {
  if (name.empty()) throw DataError("empty feature name");
  if (name.find_first_of("<>=") != std::string::npos)
    throw DataError("feature name may not contain <, > or =: '" + name + "'");
}

}  // namespace

Item Item::equals(std::string feature, std::string category) {
  check_feature_name(feature);
  Item it;
  it.feature = std::move(feature);
  it.kind = Kind::Equals;
  it.category = std::move(category);
  return it;
}

Item Item::at_least(std::string feature, double threshold) {
  check_feature_name(feature);
  Item it;
  it.feature = std::move(feature);
  it.kind = Kind::AtLeast;
  it.threshold = threshold;
  return it;
}

Item Item::less_than(std::string feature, double threshold) {
  check_feature_name(feature);
  Item it;
  it.feature = std::move(feature);
  it.kind = Kind::LessThan;
  it.threshold = threshold;
  return it;
}

Item Item::in_range(std::string feature, double lo, double hi) {
  check_feature_name(feature);
  if (!(lo < hi)) throw DataError("in_range requires lo < hi");
  Item it;
  it.feature = std::move(feature);
  it.kind = Kind::InRange;
  it.lo = lo;
  it.hi = hi;
  return it;
}

bool Item::evaluate(const std::string& raw_value) const {
  switch (kind) {
    case Kind::Equals:
      return raw_value == category;
    case Kind::AtLeast:
      return parse_number(raw_value, "column " + feature) >= threshold;
    case Kind::LessThan:
      return parse_number(raw_value, "column " + feature) < threshold;
    case Kind::InRange: {
      double v = parse_number(raw_value, "column " + feature);
      return lo < v && v <= hi;
    }
  }
  return false;
}

std::string Item::render() const {
  switch (kind) {
    case Kind::Equals:
      return feature + "=" + category;
    case Kind::AtLeast:
      return feature + ">=" + format_number(threshold);
    case Kind::LessThan:
      return feature + "<" + format_number(threshold);
    case Kind::InRange:
      if (lo == -kInf) return feature + "<=" + format_number(hi);
      if (hi == kInf) return feature + ">" + format_number(lo);
      return format_number(lo) + "<" + feature + "<=" + format_number(hi);
  }
  return {};
}

Item Item::parse(const std::string& text) {
  // Two-comparator form first: "lo<feature<=hi".
  auto first_lt = text.find('<');
  if (first_lt != std::string::npos && first_lt + 1 < text.size() &&
      text[first_lt + 1] != '=') {
    auto second = text.find("<=", first_lt + 1);
    if (second != std::string::npos) {
      double lo = parse_number(text.substr(0, first_lt), "item '" + text + "'");
      std::string feature = text.substr(first_lt + 1, second - first_lt - 1);
      double hi = parse_number(text.substr(second + 2), "item '" + text + "'");
      return in_range(std::move(feature), lo, hi);
    }
  }
  if (auto pos = text.find(">="); pos != std::string::npos)
    return at_least(text.substr(0, pos),
                    parse_number(text.substr(pos + 2), "item '" + text + "'"));
  if (auto pos = text.find("<="); pos != std::string::npos)
    return in_range(text.substr(0, pos), -kInf,
                    parse_number(text.substr(pos + 2), "item '" + text + "'"));
  if (auto pos = text.find('<'); pos != std::string::npos)
    return less_than(text.substr(0, pos),
                     parse_number(text.substr(pos + 1), "item '" + text + "'"));
  if (auto pos = text.find('>'); pos != std::string::npos)
    return in_range(text.substr(0, pos),
                    parse_number(text.substr(pos + 1), "item '" + text + "'"),
                    kInf);
  if (auto pos = text.find('='); pos != std::string::npos)
    return equals(text.substr(0, pos), text.substr(pos + 1));
  throw DataError("cannot parse item text: '" + text + "'");
}

}  // namespace brl

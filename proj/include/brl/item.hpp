#pragma once

#include <string>

namespace brl {

// One binary condition on a source feature. Numeric conditions use half-open
// conventions chosen so that paired and binned items partition the line:
//   AtLeast(t)       v >= t
//   LessThan(t)      v <  t
//   InRange(lo, hi)  lo < v <= hi   (lo may be -inf, hi may be +inf)
struct Item {
  enum class Kind { Equals, AtLeast, LessThan, InRange };

  std::string feature;
  Kind kind = Kind::Equals;
  std::string category;  // Equals only
  double lo = 0.0;       // InRange
  double hi = 0.0;       // InRange
  double threshold = 0.0;  // AtLeast / LessThan

  static Item equals(std::string feature, std::string category);
  static Item at_least(std::string feature, double threshold);
  static Item less_than(std::string feature, double threshold);
  static Item in_range(std::string feature, double lo, double hi);

  // True iff the raw cell value satisfies the condition. Numeric kinds parse
  // the cell as a double and throw DataError on failure.
  bool evaluate(const std::string& raw_value) const;

  // Deterministic text form: "f=v", "f>=t", "f<t", "lo<f<=hi", "f<=hi", "f>lo".
  std::string render() const;
  static Item parse(const std::string& text);

  bool operator==(const Item&) const = default;
};

}  // namespace brl

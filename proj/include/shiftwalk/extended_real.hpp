#pragma once

#include <cmath>
#include <limits>

namespace shiftwalk {

// Value in R union {+inf, -inf}. The infinities are symbolic markers for
// singular branch values: they are compared and printed but never used in
// arithmetic by the library.
struct ExtendedReal {
  double v = 0.0;

  ExtendedReal() = default;
  explicit ExtendedReal(double x) : v(x) {}

  static ExtendedReal finite(double x) { return ExtendedReal(x); }
  static ExtendedReal pos_inf() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }
  static ExtendedReal neg_inf() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }

  bool is_finite() const { return std::isfinite(v); }
  bool is_pos_inf() const { return std::isinf(v) && v > 0; }
  bool is_neg_inf() const { return std::isinf(v) && v < 0; }

  // Finite value accessor; only meaningful when is_finite().
  double value() const { return v; }

  bool operator==(const ExtendedReal& o) const { return v == o.v; }
};

inline bool is_integer_or_infinite(const ExtendedReal& x, double tol) {
  if (!x.is_finite()) return true;
  return std::abs(x.v - std::round(x.v)) <= tol;
}

}  // namespace shiftwalk

#pragma once

#include <cmath>
#include <compare>
#include <ostream>

namespace pvi {

// Real number extended with explicit +inf / -inf states. Infinity is a tag,
// never the result of a floating overflow.
class ExtReal {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : kind_(Kind::Finite), value_(v) {}  // NOLINT

  static constexpr ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
  static constexpr ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  // Finite payload; 0 for the infinite states.
  constexpr double value() const { return value_; }

  // IEEE view, for arithmetic on reports.
  double to_double() const {
    switch (kind_) {
      case Kind::PosInf: return INFINITY;
      case Kind::NegInf: return -INFINITY;
      default: return value_;
    }
  }

  friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.kind_ == b.kind_ && a.value_ == b.value_;
  }
  friend constexpr std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    return a.value_ <=> b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& v) {
    if (v.is_pos_inf()) return os << "+inf";
    if (v.is_neg_inf()) return os << "-inf";
    return os << v.value_;
  }

 private:
  constexpr explicit ExtReal(Kind k) : kind_(k), value_(0.0) {}

  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

}  // namespace pvi

#pragma once

#include <compare>
#include <ostream>
#include <stdexcept>

namespace vacant {

/// A value on [-inf, +inf] where infinity is carried by an explicit tag.
///
/// Rate functions take the value +inf on whole half-lines, so infinity is a
/// first-class result here rather than a float sentinel.
class ExtendedReal {
  public:
    constexpr ExtendedReal() = default;

    static constexpr ExtendedReal finite(double v) { return ExtendedReal(v, Kind::Finite); }
    static constexpr ExtendedReal infinity() { return ExtendedReal(0.0, Kind::PosInf); }

    constexpr bool is_finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_infinite() const { return kind_ == Kind::PosInf; }

    /// Finite payload; throws for +inf.
    double value() const {
        if (!is_finite()) throw std::domain_error("ExtendedReal: value() of +inf");
        return value_;
    }

    friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ == Kind::PosInf || a.value_ == b.value_;
    }

    friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.is_infinite() && b.is_infinite()) return std::partial_ordering::equivalent;
        if (a.is_infinite()) return std::partial_ordering::greater;
        if (b.is_infinite()) return std::partial_ordering::less;
        return a.value_ <=> b.value_;
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
        if (x.is_infinite()) return os << "inf";
        return os << x.value_;
    }

  private:
    enum class Kind { Finite, PosInf };
    constexpr ExtendedReal(double v, Kind k) : value_(v), kind_(k) {}

    double value_ = 0.0;
    Kind kind_ = Kind::Finite;
};

}  // namespace vacant

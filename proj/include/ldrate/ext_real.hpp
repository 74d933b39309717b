#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ldrate {

// Value in (-inf, +inf] : either finite or +infinity. NaN is rejected at
// construction so that domain violations never propagate silently.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw std::domain_error("ExtReal: NaN");
    if (v == -std::numeric_limits<double>::infinity())
      throw std::domain_error("ExtReal: -inf is not representable");
    if (std::isinf(v)) {
      infinite_ = true;
    } else {
      value_ = v;
    }
  }

  static ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  bool is_finite() const { return !infinite_; }
  bool is_inf() const { return infinite_; }

  double value() const {
    if (infinite_) throw std::domain_error("ExtReal: value() of +inf");
    return value_;
  }

  // +inf maps to IEEE infinity; convenient for comparisons and output.
  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtReal(a.value_ + b.value_);
  }
  friend ExtReal operator+(ExtReal a, double b) { return a + ExtReal(b); }

  friend bool operator==(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend bool operator<(ExtReal a, ExtReal b) { return a.to_double() < b.to_double(); }
  friend bool operator<=(ExtReal a, ExtReal b) { return a.to_double() <= b.to_double(); }
  friend bool operator>(ExtReal a, ExtReal b) { return b < a; }

  friend std::ostream& operator<<(std::ostream& os, ExtReal x) {
    if (x.infinite_) return os << "inf";
    return os << x.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace ldrate

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace drrp {

/// Currency amount stored as an integer number of micro-units, so that
/// flow costs and optimality certificates compare exactly.
class Money {
 public:
  constexpr Money() = default;
  static constexpr Money from_micros(std::int64_t m) { return Money(m); }
  static Money from_dollars(double d) {
    return Money(static_cast<std::int64_t>(std::llround(d * 1e6)));
  }

  constexpr std::int64_t micros() const { return micros_; }
  double dollars() const { return static_cast<double>(micros_) * 1e-6; }

  constexpr auto operator<=>(const Money&) const = default;

  constexpr Money operator+(Money o) const { return Money(micros_ + o.micros_); }
  constexpr Money operator-(Money o) const { return Money(micros_ - o.micros_); }
  constexpr Money operator-() const { return Money(-micros_); }
  constexpr Money operator*(std::int64_t k) const { return Money(micros_ * k); }
  Money& operator+=(Money o) { micros_ += o.micros_; return *this; }
  Money& operator-=(Money o) { micros_ -= o.micros_; return *this; }

  std::string str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", dollars());
    return buf;
  }

 private:
  constexpr explicit Money(std::int64_t m) : micros_(m) {}
  std::int64_t micros_ = 0;
};

}  // namespace drrp

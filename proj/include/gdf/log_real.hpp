#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>

#include "gdf/errors.hpp"

namespace gdf {

/// Signed real stored as (sign, ln|value|). All probabilities, security
/// parameters and tail bounds in this library live in this representation so
/// that quantities like 2^-128 survive products and sums without underflow.
///
/// Invariant: sign == 0  <=>  log_magnitude == -infinity.
class LogReal {
 public:
  constexpr LogReal() : log_(-std::numeric_limits<double>::infinity()), sign_(0) {}

  static LogReal from_double(double v) {
    if (v == 0.0) return LogReal();
    return LogReal(v > 0 ? +1 : -1, std::log(std::abs(v)));
  }

  /// exp(log_magnitude) with positive sign.
  static LogReal exp_of(double log_magnitude) { return LogReal(+1, log_magnitude); }

  static LogReal from_parts(int sign, double log_magnitude) {
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity())
      return LogReal();
    require(sign == 1 || sign == -1, "domain", "LogReal sign must be -1, 0 or +1");
    return LogReal(sign, log_magnitude);
  }

  static LogReal zero() { return LogReal(); }
  static LogReal one() { return LogReal(+1, 0.0); }

  int sign() const { return sign_; }
  /// ln|value|; -inf when the value is zero.
  double log_magnitude() const { return log_; }
  bool is_zero() const { return sign_ == 0; }

  /// May underflow to 0 or overflow to +/-inf; the representation itself is lossless.
  double value() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_); }

  LogReal operator-() const { return sign_ == 0 ? LogReal() : LogReal(-sign_, log_); }

  friend LogReal operator*(const LogReal& a, const LogReal& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return LogReal();
    return LogReal(a.sign_ * b.sign_, a.log_ + b.log_);
  }

  friend LogReal operator/(const LogReal& a, const LogReal& b) {
    require(b.sign_ != 0, "domain", "LogReal division by zero");
    if (a.sign_ == 0) return LogReal();
    return LogReal(a.sign_ * b.sign_, a.log_ - b.log_);
  }

  friend LogReal operator+(const LogReal& a, const LogReal& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    const LogReal* hi = &a;
    const LogReal* lo = &b;
    if (lo->log_ > hi->log_) std::swap(hi, lo);
    const double d = lo->log_ - hi->log_;  // <= 0
    if (a.sign_ == b.sign_) {
      return LogReal(a.sign_, hi->log_ + std::log1p(std::exp(d)));
    }
    // Opposite signs: |hi| - |lo| = |hi| (1 - e^d), sign of the larger magnitude.
    const double m = -std::expm1(d);  // in [0, 1); 0 on exact cancellation
    return LogReal(hi->sign_, hi->log_ + std::log(m));
  }

  friend LogReal operator-(const LogReal& a, const LogReal& b) { return a + (-b); }

  /// value^e for real exponent; requires a nonnegative base unless e is integral.
  LogReal pow(double e) const {
    if (sign_ == 0) {
      require(e > 0, "domain", "0 raised to a nonpositive power");
      return LogReal();
    }
    if (sign_ < 0) {
      require(std::nearbyint(e) == e, "domain", "negative base needs an integral exponent");
      const bool odd = std::fmod(std::abs(e), 2.0) == 1.0;
      return LogReal(odd ? -1 : +1, log_ * e);
    }
    return LogReal(+1, log_ * e);
  }

  friend bool operator==(const LogReal& a, const LogReal& b) {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.log_ == b.log_);
  }

  friend std::partial_ordering operator<=>(const LogReal& a, const LogReal& b) {
    if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
    if (a.sign_ == 0) return std::partial_ordering::equivalent;
    return a.sign_ > 0 ? a.log_ <=> b.log_ : b.log_ <=> a.log_;
  }

  friend std::ostream& operator<<(std::ostream& os, const LogReal& v) {
    if (v.sign_ == 0) return os << "0";
    if (v.sign_ < 0) os << "-";
    return os << "exp(" << v.log_ << ")";
  }

 private:
  LogReal(int sign, double log_magnitude) : log_(log_magnitude), sign_(sign) {
    if (log_ == -std::numeric_limits<double>::infinity()) sign_ = 0;
  }

  double log_;
  int sign_;
};

inline LogReal one_minus(const LogReal& p) { return LogReal::one() - p; }

}  // namespace gdf

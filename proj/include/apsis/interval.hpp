#pragma once

// Closed real intervals with outward rounding.
//
// Every arithmetic result is first computed in round-to-nearest and then
// widened by stepping each endpoint to the adjacent representable double.
// The step is skipped when an error-free transformation (TwoSum, or an FMA
// residual) shows the nearest result already lies on the safe side. No
// rounding-mode state is touched, so Interval values can be used freely
// from concurrent workers.
//
// Elementary functions (exp, log, pow) rely on libm being accurate to
// within one ulp; the result is widened by kLibmGuardUlps on each side.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "apsis/error.hpp"

namespace apsis {

inline constexpr int kLibmGuardUlps = 2;

inline double next_up(double x) {
  if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) return x;
  if (x == 0.0) return std::numeric_limits<double>::denorm_min();
  auto bits = std::bit_cast<std::uint64_t>(x);
  bits = x > 0.0 ? bits + 1 : bits - 1;
  return std::bit_cast<double>(bits);
}

inline double next_down(double x) { return -next_up(-x); }

inline double step_up(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_up(x);
  return x;
}

inline double step_down(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_down(x);
  return x;
}

namespace detail {

// Below this magnitude FMA residuals may themselves be rounded.
inline constexpr double kExactResidualFloor = 0x1p-960;

// Round-to-nearest a + b, with a certified lower / upper bound.
inline double add_down(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0.0 ? next_down(s) : s;
}
inline double add_up(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0.0 ? next_up(s) : s;
}

inline double mul_down(double a, double b) {
  const double p = a * b;
  if (a == 0.0 || b == 0.0) return p;
  if (std::abs(p) < kExactResidualFloor) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}
inline double mul_up(double a, double b) {
  const double p = a * b;
  if (a == 0.0 || b == 0.0) return p;
  if (std::abs(p) < kExactResidualFloor) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

// a / b for b != 0; the residual a - q b has the sign of (a/b - q) * b.
inline double div_down(double a, double b) {
  const double q = a / b;
  if (a == 0.0) return q;
  if (std::abs(q) < kExactResidualFloor || std::abs(a) < kExactResidualFloor) return next_down(q);
  const double r = std::fma(-q, b, a);
  return (b > 0.0 ? r < 0.0 : r > 0.0) ? next_down(q) : q;
}
inline double div_up(double a, double b) {
  const double q = a / b;
  if (a == 0.0) return q;
  if (std::abs(q) < kExactResidualFloor || std::abs(a) < kExactResidualFloor) return next_up(q);
  const double r = std::fma(-q, b, a);
  return (b > 0.0 ? r > 0.0 : r < 0.0) ? next_up(q) : q;
}

}  // namespace detail

class Interval {
 public:
  constexpr Interval() = default;

  // Implicit on purpose: lets generic code mix double literals with
  // Interval operands. The double must be the intended value exactly.
  Interval(double x) : lo_(x), hi_(x) { check(); }  // NOLINT

  Interval(double lo, double hi) : lo_(lo), hi_(hi) { check(); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /// hi - lo, rounded up.
  double width() const { return next_up(hi_ - lo_); }
  double mid() const { return 0.5 * (lo_ + hi_); }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const {
    return lo_ <= o.lo_ && o.hi_ <= hi_;
  }
  bool contains_zero() const { return contains(0.0); }
  bool is_positive() const { return lo_ > 0.0; }
  bool is_point() const { return lo_ == hi_; }

  Interval operator-() const { return Interval(-hi_, -lo_); }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return Interval(detail::add_down(a.lo_, b.lo_), detail::add_up(a.hi_, b.hi_));
  }

  friend Interval operator-(const Interval& a, const Interval& b) {
    return Interval(detail::add_down(a.lo_, -b.hi_), detail::add_up(a.hi_, -b.lo_));
  }

  friend Interval operator*(const Interval& a, const Interval& b) {
    if (a.lo_ >= 0.0 && b.lo_ >= 0.0) {
      return Interval(std::max(detail::mul_down(a.lo_, b.lo_), 0.0), detail::mul_up(a.hi_, b.hi_));
    }
    double lo = detail::mul_down(a.lo_, b.lo_);
    double hi = detail::mul_up(a.lo_, b.lo_);
    for (const auto& [x, y] : {std::pair{a.lo_, b.hi_}, std::pair{a.hi_, b.lo_},
                               std::pair{a.hi_, b.hi_}}) {
      lo = std::min(lo, detail::mul_down(x, y));
      hi = std::max(hi, detail::mul_up(x, y));
    }
    return Interval(lo, hi);
  }

  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) {
      throw DomainError("interval division by " + b.str() +
                        " which contains zero");
    }
    double lo = detail::div_down(a.lo_, b.lo_);
    double hi = detail::div_up(a.lo_, b.lo_);
    for (const auto& [x, y] : {std::pair{a.lo_, b.hi_}, std::pair{a.hi_, b.lo_},
                               std::pair{a.hi_, b.hi_}}) {
      lo = std::min(lo, detail::div_down(x, y));
      hi = std::max(hi, detail::div_up(x, y));
    }
    return Interval(lo, hi);
  }

  friend bool operator==(const Interval& a, const Interval& b) = default;

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    os << '[' << lo_ << ", " << hi_ << ']';
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
    return os << x.str();
  }

  /// Widen round-to-nearest endpoints by `ulps` steps each.
  static Interval rounded(double lo, double hi, int ulps = 1) {
    return Interval(step_down(lo, ulps), step_up(hi, ulps));
  }

 private:
  void check() const {
    if (!(std::isfinite(lo_) && std::isfinite(hi_))) {
      throw DomainError("non-finite interval endpoint (overflow or NaN)");
    }
    if (lo_ > hi_) {
      std::ostringstream os;
      os.precision(17);
      os << "interval with lo " << lo_ << " > hi " << hi_;
      throw DomainError(os.str());
    }
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

struct IntervalSummary {
  double width;
  bool contains_zero;
  bool is_positive;
};

inline IntervalSummary hull_width_contains(const Interval& x) {
  return {x.width(), x.contains_zero(), x.is_positive()};
}

inline Interval exp(const Interval& x) {
  const double lo = step_down(std::exp(x.lo()), kLibmGuardUlps);
  const double hi = step_up(std::exp(x.hi()), kLibmGuardUlps);
  return Interval(std::max(lo, 0.0), hi);
}

inline Interval log(const Interval& x) {
  if (!(x.lo() > 0.0)) {
    throw DomainError("log of " + x.str() + " which is not strictly positive");
  }
  return Interval(step_down(std::log(x.lo()), kLibmGuardUlps),
                  step_up(std::log(x.hi()), kLibmGuardUlps));
}

inline Interval sqrt(const Interval& x) {
  if (x.lo() < 0.0) {
    throw DomainError("sqrt of " + x.str() + " which has negative elements");
  }
  // IEEE sqrt is correctly rounded, one step suffices.
  return Interval(std::max(next_down(std::sqrt(x.lo())), 0.0),
                  next_up(std::sqrt(x.hi())));
}

namespace detail {

// Enclosure of m^n for m >= 0 by binary powering of the point interval.
inline Interval power_of_nonneg(double m, unsigned n) {
  Interval result(1.0);
  Interval base(m);
  while (n != 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n != 0) base = base * base;
  }
  return Interval(std::max(result.lo(), 0.0), result.hi());
}

}  // namespace detail

inline Interval pow_int(const Interval& x, int n) {
  if (n < 0) throw DomainError("pow_int with negative exponent");
  if (n == 0) return Interval(1.0);
  const auto un = static_cast<unsigned>(n);
  if (x.lo() >= 0.0) {
    return Interval(detail::power_of_nonneg(x.lo(), un).lo(),
                    detail::power_of_nonneg(x.hi(), un).hi());
  }
  if (x.hi() <= 0.0) {
    const Interval a = detail::power_of_nonneg(-x.hi(), un);
    const Interval b = detail::power_of_nonneg(-x.lo(), un);
    if (n % 2 == 0) return Interval(a.lo(), b.hi());
    return Interval(-b.hi(), -a.lo());
  }
  // Straddles zero.
  if (n % 2 == 0) {
    const double m = std::max(-x.lo(), x.hi());
    return Interval(0.0, detail::power_of_nonneg(m, un).hi());
  }
  return Interval(-detail::power_of_nonneg(-x.lo(), un).hi(),
                  detail::power_of_nonneg(x.hi(), un).hi());
}

inline Interval sqr(const Interval& x) { return pow_int(x, 2); }

/// base^exponent for a strictly positive base, as exp(exponent * log(base)).
inline Interval pow_real(const Interval& base, const Interval& exponent) {
  if (!(base.lo() > 0.0)) {
    throw DomainError("pow_real base " + base.str() +
                      " is not strictly positive");
  }
  if (base.is_point() && exponent.is_point()) {
    return Interval::rounded(std::pow(base.lo(), exponent.lo()), std::pow(base.lo(), exponent.lo()),
                             kLibmGuardUlps);
  }
  return exp(exponent * log(base));
}

/// base^exponent for base >= 0 (possibly touching zero) and a strictly
/// positive exponent. Continuous extension with 0^y = 0.
inline Interval pow_nonneg(const Interval& base, const Interval& exponent) {
  if (base.lo() < 0.0) {
    throw DomainError("pow_nonneg base " + base.str() + " has negative part");
  }
  if (base.lo() > 0.0) return pow_real(base, exponent);
  if (!(exponent.lo() > 0.0)) {
    throw DomainError("pow_nonneg with base touching zero needs exponent > 0");
  }
  if (base.hi() == 0.0) return Interval(0.0);
  // x^y is increasing in x for y > 0; the maximum sits at x = base.hi().
  return Interval(0.0, pow_real(Interval(base.hi()), exponent).hi());
}

// Plain-double counterparts so generic code can call the same names.
inline double pow_int(double x, int n) {
  if (n < 0) throw DomainError("pow_int with negative exponent");
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}
inline double sqr(double x) { return x * x; }
inline double pow_real(double base, double exponent) {
  if (!(base > 0.0)) throw DomainError("pow_real base is not strictly positive");
  return std::pow(base, exponent);
}
inline double pow_nonneg(double base, double exponent) {
  if (base < 0.0) throw DomainError("pow_nonneg base is negative");
  return std::pow(base, exponent);
}

}  // namespace apsis

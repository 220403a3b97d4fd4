#pragma once

// Scalar semantics shared by double and Interval so every bound function
// can be written once and evaluated in either mode.

#include <cmath>
#include <string>
#include <type_traits>

#include "apsis/interval.hpp"

namespace apsis {

template <class S>
inline constexpr bool is_interval_v = std::is_same_v<S, Interval>;

template <class S>
concept Scalar = std::is_same_v<S, double> || std::is_same_v<S, Interval>;

inline double lower(double x) { return x; }
inline double upper(double x) { return x; }
inline double lower(const Interval& x) { return x.lo(); }
inline double upper(const Interval& x) { return x.hi(); }

/// Enclosure of num/den. In double mode just the rounded quotient.
template <Scalar S>
S ratio(long num, long den) {
  return S(static_cast<double>(num)) / S(static_cast<double>(den));
}

/// Euler's number e = exp(1).
template <Scalar S>
S euler() {
  using std::exp;
  return exp(S(1.0));
}

/// Checks that x lies inside [lo, hi]; in interval mode the whole interval
/// must be contained.
template <Scalar S>
void require_within(const S& x, double lo, double hi, const char* what) {
  if (!(lower(x) >= lo) || !(upper(x) <= hi)) {
    throw DomainError(std::string(what) + " outside its admissible range");
  }
}

}  // namespace apsis

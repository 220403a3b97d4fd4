#pragma once

// The named functions of the apsidal-angle monotonicity argument: binomial
// weights, the A/K polynomial families, the eccentricity function E and its
// q-derivative, and the bound functions whose positivity is certified by the
// verification campaigns.
//
// Functions templated on `Scalar S` evaluate in plain double or in Interval
// arithmetic. Interval mode never divides by an s-interval: A and K are
// evaluated as polynomials in s.
//
// Notation: alpha is the power-law exponent, s in [0,1] the normalised
// radial variable, q = 1 - r_-/r_+.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "apsis/error.hpp"
#include "apsis/interval.hpp"
#include "apsis/scalar.hpp"

namespace apsis {

// ---------------------------------------------------------------------------
// Constants

struct BoundConstants {
  double alpha_bar = 0.15;  // N0 / N_mid split
  double alpha_hat = 0.8;   // N_mid / N1 split
  double q_bar = 0.4;       // M_f / (Z_f, I_tilde_f) split in q
  double alpha_0 = 0.4;     // Z_f / I_tilde_f split in alpha

  void validate() const {
    if (!(0.0 < alpha_bar && alpha_bar < alpha_hat && alpha_hat < 1.0)) {
      throw DomainError("need 0 < alpha_bar < alpha_hat < 1");
    }
    if (!(0.0 < q_bar && q_bar < 0.9)) throw DomainError("need 0 < q_bar < 0.9");
    if (!(0.0 < alpha_0 && alpha_0 < 1.0)) {
      throw DomainError("need 0 < alpha_0 < 1");
    }
  }
};

/// q at which -(1-q)^((1-alpha)/4) log(1-q) peaks: 1 - exp(-4/(1-alpha)).
template <Scalar S>
S q_max(const S& alpha) {
  using std::exp;
  if (!(upper(alpha) < 1.0)) throw DomainError("q_max needs alpha < 1");
  return S(1.0) - exp(-S(4.0) / (S(1.0) - alpha));
}

/// 1 - exp(-4/alpha_hat).
template <Scalar S>
S q_hat(double alpha_hat) {
  using std::exp;
  return S(1.0) - exp(-S(4.0) / S(alpha_hat));
}

// ---------------------------------------------------------------------------
// Binomial weights

/// Exact integer binomial coefficient; n <= 62.
inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// omega_n = -binom(alpha, n) (-1)^n via omega_n / omega_{n-1} = (n-1-alpha)/n.
template <class T>
T omega(const T& alpha, int n) {
  if (n < 1) throw DomainError("omega needs n >= 1");
  T w = alpha;
  for (int k = 2; k <= n; ++k) w = w * (T(k - 1) - alpha) / T(k);
  return w;
}

/// omega_n / (alpha (1 - alpha)), started from omega~_2 = 1/2.
template <class T>
T omega_tilde(const T& alpha, int n) {
  if (n < 2) throw DomainError("omega_tilde needs n >= 2");
  T w = T(1) / T(2);
  for (int k = 3; k <= n; ++k) w = w * (T(k - 1) - alpha) / T(k);
  return w;
}

/// omega~_0 .. omega~_{n_max}; entries 0 and 1 are unused (zero).
template <class T>
std::vector<T> omega_tilde_table(const T& alpha, int n_max) {
  std::vector<T> w(static_cast<std::size_t>(n_max) + 1, T(0));
  if (n_max < 2) return w;
  w[2] = T(1) / T(2);
  for (int k = 3; k <= n_max; ++k) w[k] = w[k - 1] * (T(k - 1) - alpha) / T(k);
  return w;
}

// ---------------------------------------------------------------------------
// A_n and K_n

template <class T>
T horner(const std::vector<T>& coeffs, const T& x) {
  T acc = coeffs.back();
  for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

/// Coefficients of A_n(s) = sum_{j=1}^{n-1} binom(n-1,j) (-1)^{j+1} s^{j-1}.
template <class T>
std::vector<T> a_poly_coefficients(int n) {
  std::vector<T> c;
  for (int j = 1; j <= n - 1; ++j) {
    const auto b = binomial(n - 1, j);
    c.push_back(T(j % 2 == 1 ? b : -b));
  }
  return c;
}

template <class T>
T A_poly(int n, const T& s) {
  if (n < 2) throw DomainError("A_n needs n >= 2");
  return horner(a_poly_coefficients<T>(n), s);
}

/// A_n(s) = (1 - (1-s)^{n-1}) / s with A_n(0) = n - 1. Interval mode uses
/// the expanded polynomial.
template <Scalar S>
S A(int n, const S& s) {
  if (n < 2) throw DomainError("A_n needs n >= 2");
  require_within(s, 0.0, 1.0, "A_n: s");
  if constexpr (is_interval_v<S>) {
    return A_poly(n, s);
  } else {
    if (n == 2) return 1.0;
    if (s == 0.0) return n - 1.0;
    return -std::expm1((n - 1) * std::log1p(-s)) / s;
  }
}

/// Coefficients (powers of s) of K_n^alpha in its s = 0 regular form:
///   sum_{k=2}^{n-1} binom(n-1,k) s^{k-1} (-1)^k (1 - 2(n-alpha)/(n+1) n/(n-k))
///   - 2(n-alpha)/(n+1) s^{n-1} (-1)^n + (n^2 + 1 - 2 n alpha)/(n+1).
template <class T>
std::vector<T> k_poly_coefficients(const T& alpha, int n) {
  if (n < 2) throw DomainError("K_n needs n >= 2");
  std::vector<T> c(static_cast<std::size_t>(n), T(0));
  const T n_minus_alpha = T(n) - alpha;
  c[0] = T(n * n + 1) / T(n + 1) - T(2 * n) / T(n + 1) * alpha;
  for (int k = 2; k <= n - 1; ++k) {
    const T factor = T(1) - T(2 * n) / T((n + 1) * (n - k)) * n_minus_alpha;
    const auto b = binomial(n - 1, k);
    c[k - 1] = T(k % 2 == 0 ? b : -b) * factor;
  }
  const T top = T(2) * n_minus_alpha / T(n + 1);
  c[n - 1] = c[n - 1] + (n % 2 == 0 ? -top : top);
  return c;
}

template <class T>
T K_poly(const T& alpha, int n, const T& s) {
  return horner(k_poly_coefficients(alpha, n), s);
}

/// A_n(s) = (1 - (1-s)^{n-1}) / s for s bounded away from 0.
template <Scalar S>
S A_closed(int n, const S& s) {
  if (n < 2) throw DomainError("A_n needs n >= 2");
  if (!(lower(s) > 0.0)) throw DomainError("closed-form A_n needs s > 0");
  if constexpr (is_interval_v<S>) {
    return (S(1.0) - pow_int(S(1.0) - s, n - 1)) / s;
  } else {
    return A(n, s);
  }
}

/// K_n = 2 (n-alpha)/(n+1) A_{n+1} - A_n with closed-form A; s > 0.
template <Scalar S>
S K_closed(const S& alpha, int n, const S& s) {
  return 2.0 * (S(double(n)) - alpha) / S(n + 1.0) * A_closed(n + 1, s) - A_closed(n, s);
}

/// K_n = (n-1-2alpha)/(n+1) A_n + 2(n-alpha)/(n+1) (1-s)^{n-1} with
/// A_n = sum_{j<n-1} (1-s)^j. Every term is monotone in s, so interval
/// enclosures stay tight even for large n.
template <Scalar S>
S K_geometric(const S& alpha, int n, const S& s) {
  if (n < 2) throw DomainError("K_n needs n >= 2");
  const S t = S(1.0) - s;
  S a = S(1.0);
  for (int j = 1; j <= n - 2; ++j) a = a * t + S(1.0);
  return (S(n - 1.0) - 2.0 * alpha) / S(n + 1.0) * a +
         2.0 * (S(double(n)) - alpha) / S(n + 1.0) * pow_int(t, n - 1);
}

enum class KForm { closed, expanded, geometric };

template <Scalar S>
S K(const S& alpha, int n, const S& s, KForm form) {
  require_within(s, 0.0, 1.0, "K_n: s");
  switch (form) {
    case KForm::closed:
      if constexpr (is_interval_v<S>) {
        return K_closed(alpha, n, s);
      } else {
        return s == 0.0 ? K_poly(alpha, n, s) : K_closed(alpha, n, s);
      }
    case KForm::expanded:
      return K_poly(alpha, n, s);
    case KForm::geometric:
      return K_geometric(alpha, n, s);
  }
  throw DomainError("unknown KForm");
}

template <Scalar S>
S K(const S& alpha, int n, const S& s) {
  return K(alpha, n, s, is_interval_v<S> ? KForm::expanded : KForm::closed);
}

/// K_2 .. K_{n_max} at a fixed alpha, reusable across s values.
template <Scalar S>
class KTable {
 public:
  KTable(const S& alpha, int n_max) {
    coeffs_.resize(static_cast<std::size_t>(n_max) + 1);
    for (int n = 2; n <= n_max; ++n) coeffs_[n] = k_poly_coefficients(alpha, n);
  }
  S operator()(int n, const S& s) const { return horner(coeffs_.at(n), s); }

 private:
  std::vector<std::vector<S>> coeffs_;
};

// ---------------------------------------------------------------------------
// E and its relatives (float mode unless stated)

namespace detail {

// 1 - (1 - q c)^alpha, or -log(1 - q c) on the logarithmic branch.
inline double g_fun(double alpha, double q, double c) {
  if (alpha == 0.0) return -std::log1p(-q * c);
  return -std::expm1(alpha * std::log1p(-q * c));
}

}  // namespace detail

/// E(1,q) (which = 1) and E(0,q) (which = 0). Both are regular for q in
/// (0,1), alpha != 0.
template <Scalar S>
S E_boundary(const S& alpha, const S& q, int which) {
  if (which != 0 && which != 1) throw DomainError("E_boundary: which is 0 or 1");
  if (lower(q) <= 0.0 || upper(q) >= 1.0) {
    throw DomainError("E_boundary needs q in (0,1)");
  }
  if (lower(alpha) <= 0.0 && upper(alpha) >= 0.0) {
    throw DomainError("E_boundary is indeterminate at alpha = 0");
  }
  const S one(1.0);
  const S one_minus_q = one - q;
  const S denom = one - pow_real(one_minus_q, alpha);
  const S prefactor = (2.0 - q) / q;
  if (which == 1) return prefactor * (one - alpha * q / denom);
  return prefactor *
         (-one + alpha * q * pow_real(one_minus_q, alpha - one) / denom);
}

/// E_alpha(s,q) by the closed form, for any alpha < 2 (alpha = 0 is the
/// logarithmic branch). Cancelling differences are rearranged through
/// expm1/log1p so the value stays accurate as s -> 0, s -> 1 and q -> 0.
inline double E(double alpha, double s, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("E closed form needs q in (0,1); the q -> 0 limit is 1-alpha");
  }
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("E: s outside [0,1]");
  if (!(alpha < 2.0)) throw DomainError("E: alpha must be < 2");
  const double c = 1.0 - s;
  const double pre = (2.0 - q) / q;
  const double g1 = detail::g_fun(alpha, q, 1.0);
  if (s == 0.0) {
    const double slope =
        alpha == 0.0 ? q / (1.0 - q) : alpha * q * std::pow(1.0 - q, alpha - 1.0);
    return pre * (slope - g1) / g1;
  }
  if (c == 0.0) {
    const double slope = alpha == 0.0 ? q : alpha * q;
    return pre * (g1 - slope) / g1;
  }
  if (s <= 0.5) {
    // X = g1 - g(c) = (1-qc)^alpha - (1-q)^alpha, formed without cancellation.
    const double x = q * s / (1.0 - q);
    const double big_x = alpha == 0.0
                             ? std::log1p(x)
                             : std::pow(1.0 - q, alpha) * std::expm1(alpha * std::log1p(x));
    return pre * (big_x / s - g1) / (c * g1);
  }
  const double gc = detail::g_fun(alpha, q, c);
  return pre * (g1 - gc / c) / (s * g1);
}

/// C_alpha(q) = q / (1 - (1-q)^alpha), the reciprocal of sum omega_n q^{n-1}.
template <Scalar S>
S C_norm(const S& alpha, const S& q) {
  if (lower(q) <= 0.0 || upper(q) >= 1.0) throw DomainError("C_norm needs q in (0,1)");
  require_within(alpha, 0.0, 1.0, "C_norm: alpha");
  if (lower(alpha) <= 0.0) throw DomainError("C_norm needs alpha > 0");
  if constexpr (is_interval_v<S>) {
    return q / (S(1.0) - pow_real(S(1.0) - q, alpha));
  } else {
    return q / -std::expm1(alpha * std::log1p(-q));
  }
}

/// Truncated power series value with a geometric estimate of the omitted tail.
struct SeriesValue {
  double value;
  double tail_estimate;
};

/// E = C(q) sum_{n>=2} omega_n (2-q) q^{n-2} A_n(s), truncated at n = terms+1.
inline SeriesValue E_series(double alpha, double s, double q, int terms) {
  double sum = 0.0;
  double w = alpha;  // omega_1
  double last = 0.0;
  for (int n = 2; n <= terms + 1; ++n) {
    w = w * (n - 1 - alpha) / n;
    last = w * (2.0 - q) * std::pow(q, n - 2) * A(n, s);
    sum += last;
  }
  const double cn = C_norm(alpha, q);
  return {cn * sum, std::abs(cn * last) * q / (1.0 - q)};
}

/// d/dq E by the double series
///   C(q)^2 sum_{n>=2,m>=1} omega_n omega_m ((2-q)(n-m) - 2) A_n(s) q^{n+m-4}
/// keeping all terms with n + m <= order.
inline SeriesValue dqE(double alpha, double s, double q, int order = 60) {
  if (order < 4) throw DomainError("dqE needs order >= 4");
  std::vector<double> w(static_cast<std::size_t>(order) + 1);
  std::vector<double> a(static_cast<std::size_t>(order) + 1);
  for (int n = 1; n <= order; ++n) w[n] = omega(alpha, n);
  for (int n = 2; n <= order; ++n) a[n] = A(n, s);
  double sum = 0.0;
  double last_group = 0.0;
  for (int total = 3; total <= order; ++total) {
    double group = 0.0;
    for (int m = 1; m <= total - 2; ++m) {
      const int n = total - m;
      const double d = n - m;
      const double coeff = (2.0 * d - 2.0) * std::pow(q, total - 4.0) - d * std::pow(q, total - 3.0);
      group += w[n] * w[m] * a[n] * coeff;
    }
    sum += group;
    last_group = group;
  }
  const double c2 = sqr(C_norm(alpha, q));
  return {c2 * sum, std::abs(c2 * last_group) * q / (1.0 - q)};
}

/// Central difference of the closed-form E in q.
inline double dqE_numeric(double alpha, double s, double q, double h = 1e-6) {
  return (E(alpha, s, q + h) - E(alpha, s, q - h)) / (2.0 * h);
}

/// I = dE(s)(1 + E(1-s))^2 + dE(1-s)(1 + E(s))^2; positivity of I on
/// (0,1) x (0,1/2) x (0,1) gives monotonicity of the apsidal angle.
inline double I_direct(double alpha, double s, double q) {
  const double h = std::min(1e-6, 0.5 * std::min(q, 1.0 - q));
  return dqE_numeric(alpha, s, q, h) * sqr(1.0 + E(alpha, 1.0 - s, q)) +
         dqE_numeric(alpha, 1.0 - s, q, h) * sqr(1.0 + E(alpha, s, q));
}

// ---------------------------------------------------------------------------
// Series coefficients of I

/// T^p(alpha,s) = sum_{n>=2,m>=1,n+m=p-1} omega_n omega_m (n-m) K_n(s)
///               - 2 omega_2 omega_{p-2} (p-3).
template <Scalar S>
S T_coeff(const S& alpha, int p, const S& s, KForm form) {
  if (p < 4) throw DomainError("T_coeff needs p >= 4");
  S sum(0.0);
  for (int m = 1; m <= p - 3; ++m) {
    const int n = p - 1 - m;
    sum = sum + omega(alpha, n) * omega(alpha, m) * S(double(n - m)) * K(alpha, n, s, form);
  }
  return sum - 2.0 * omega(alpha, 2) * omega(alpha, p - 2) * S(p - 3.0);
}

template <Scalar S>
S T_coeff(const S& alpha, int p, const S& s) {
  return T_coeff(alpha, p, s, is_interval_v<S> ? KForm::expanded : KForm::closed);
}

/// T^p / (alpha^2 (1-alpha)):
///   sum_{n,m>=2} (1-alpha) w~_n w~_m (n-m) K_n + w~_{p-2} (p-3) (K_{p-2} - (1-alpha)).
/// Regular and generally nonzero at alpha in {0, 1}.
template <Scalar S>
S T_tilde(const S& alpha, int p, const S& s, KForm form) {
  if (p < 4) throw DomainError("T_tilde needs p >= 4");
  const auto wt = omega_tilde_table(alpha, p);
  const S one_minus_alpha = S(1.0) - alpha;
  S inner(0.0);
  for (int m = 2; m <= p - 3; ++m) {
    const int n = p - 1 - m;
    if (n < 2 || n == m) continue;
    inner = inner + wt[n] * wt[m] * S(double(n - m)) * K(alpha, n, s, form);
  }
  return one_minus_alpha * inner +
         wt[p - 2] * S(p - 3.0) * (K(alpha, p - 2, s, form) - one_minus_alpha);
}

/// Q^p(s,q) = T^p(s)(1 + E(1-s,q))^2 + T^p(1-s)(1 + E(s,q))^2.
inline double Q_coeff(double alpha, int p, double s, double q) {
  return T_coeff(alpha, p, s) * sqr(1.0 + E(alpha, 1.0 - s, q)) +
         T_coeff(alpha, p, 1.0 - s) * sqr(1.0 + E(alpha, s, q));
}

/// C(q)^2 sum_{p=4}^{p_max} Q^p q^{p-4}.
inline double I_series(double alpha, double s, double q, int p_max) {
  const double es = E(alpha, s, q);
  const double ec = E(alpha, 1.0 - s, q);
  double sum = 0.0;
  for (int p = 4; p <= p_max; ++p) {
    sum += (T_coeff(alpha, p, s) * sqr(1.0 + ec) + T_coeff(alpha, p, 1.0 - s) * sqr(1.0 + es)) *
           std::pow(q, p - 4);
  }
  return sqr(C_norm(alpha, q)) * sum;
}

// ---------------------------------------------------------------------------
// Bound functions for q >= 0.9

/// N(alpha,q); d_q E(1,q) = N / (q (1-q) (1-(1-q)^alpha)^2).
template <Scalar S>
S N_fun(const S& alpha, const S& q) {
  require_within(alpha, 0.0, 1.0, "N: alpha");
  if (!(lower(q) >= 0.9) || !(upper(q) < 1.0)) {
    throw DomainError("N needs q in [0.9, 1); use N_tilde near q = 1");
  }
  const S one(1.0);
  const S x = one - q;
  const S xa = pow_real(x, alpha);
  const S g = one - xa;
  return -2.0 / q * x * sqr(g) + alpha * q * x * g + (2.0 - q) * sqr(alpha) * q * xa;
}

enum class BandForm { plain, tilde };

/// Chord through (q_max, 4/(e(1-alpha))) and (1, 0).
template <Scalar S>
S chord_N0(const S& alpha, const S& q) {
  using std::exp;
  const S one(1.0);
  const S k = 4.0 / (one - alpha);
  return k * exp(k - 1.0) * (one - q);
}

/// Chord through (q_hat, 4/(e alpha_hat)) and (1, 0).
template <Scalar S>
S chord_N1(const S& q, double alpha_hat) {
  using std::exp;
  const S k = S(4.0) / S(alpha_hat);
  return -k * exp(k - 1.0) * (q - 1.0 + exp(-k)) + k / euler<S>();
}

/// Lower bounds for N / (alpha^2 (1-q)^alpha) on alpha in [0, alpha_bar]:
/// plain on q in [0.9, q_max(alpha)], tilde on q in [q_max(alpha), 1].
template <Scalar S>
S N0_pair(const S& alpha, const S& q, const BoundConstants& consts, BandForm form) {
  require_within(alpha, 0.0, consts.alpha_bar, "N0: alpha");
  const S qm = q_max(alpha);
  const S one(1.0);
  const S x = one - q;
  const S abar(consts.alpha_bar);
  if (form == BandForm::plain) {
    require_within(q, 0.9, upper(qm), "N0: q");
    using std::log;
    const S l = log(x);
    const S x1a = pow_real(x, one - alpha);
    return -2.0 / q * x1a * sqr(l) * sqr(one + 0.5 * alpha * l) -
           x1a * l * (one + 0.5 * pow_real(x, abar) * alpha * l) + (2.0 - q) * q;
  }
  require_within(q, lower(qm), 1.0, "N0_tilde: q");
  const S fmax = 4.0 / (euler<S>() * (one - alpha));
  const S r = chord_N0(alpha, q);
  const S e_quarter = (one - alpha) / 4.0;
  return -sqr(alpha) / (2.0 * q) * pow_int(fmax, 4) +
         2.0 * alpha / q * pow_nonneg(x, e_quarter) * pow_int(r, 3) -
         pow_nonneg(x, 2.0 * e_quarter) * (2.0 / q + 0.5 * alpha * pow_nonneg(x, abar)) * sqr(fmax) +
         pow_nonneg(x, 3.0 * e_quarter) * r + (2.0 - q) * q;
}

/// Lower bounds for N / ((1-alpha)(1-q)) on alpha in [alpha_hat, 1]:
/// plain on q in [0.9, q_hat], tilde on q in [q_hat, 1].
template <Scalar S>
S N1_pair(const S& alpha, const S& q, const BoundConstants& consts, BandForm form) {
  require_within(alpha, consts.alpha_hat, 1.0, "N1: alpha");
  const double ah = consts.alpha_hat;
  const S qh = q_hat<S>(ah);
  const S one(1.0);
  const S x = one - q;
  const S b = one - alpha;
  const S first = -2.0 * q * (one + alpha) + alpha * sqr(q);
  using std::log;
  if (form == BandForm::plain) {
    require_within(q, 0.9, upper(qh), "N1: q");
    const S l = log(x);
    const S l2 = sqr(l);
    return first + l * (-4.0 * x + alpha * q * x - sqr(alpha) * q * (2.0 - q)) +
           b * l2 *
               (-2.0 * sqr(x) / q + 2.0 * x - 0.5 * alpha * q * pow_real(x, S(ah)) +
                (2.0 - q) / 2.0 * q * sqr(alpha)) +
           sqr(b) * (2.0 / q * sqr(x) * pow_int(l, 3)) -
           pow_int(b, 3) * (sqr(x) / (2.0 * q) * pow_int(l, 4));
  }
  require_within(q, lower(qh), 1.0, "N1_tilde: q");
  const S r2 = chord_N1(q, ah);
  const S gmax = S(4.0) / (euler<S>() * S(ah));
  const S lh = log(one - qh);
  const S a4 = S(ah) / 4.0;
  const S a2 = S(ah) / 2.0;
  return first + r2 * (4.0 - alpha * q) * pow_nonneg(x, one - a4) +
         b * sqr(r2) *
             (-2.0 / q * pow_nonneg(x, 2.0 - a2) + 2.0 * pow_nonneg(x, one - a2) +
              alpha / 2.0 * q * pow_nonneg(x, a2)) -
         sqr(b) * 2.0 / q * pow_nonneg(x, 2.0 - 3.0 * a4) * pow_int(gmax, 3) -
         pow_int(b, 3) * pow_nonneg(x, 2.0 - S(ah)) / (2.0 * q) * pow_int(gmax, 4) -
         (2.0 - q) * alpha * q * lh + b * sqr(alpha) * q * (2.0 - q) / 2.0 * sqr(lh);
}

/// (q / alpha^2) N~(alpha,q) where N = (1-q)^alpha N~; regular at q = 1.
template <Scalar S>
S N_tilde(const S& alpha, const S& q, const BoundConstants& consts = {}) {
  require_within(alpha, consts.alpha_bar, consts.alpha_hat, "N_tilde: alpha");
  require_within(q, 0.9, 1.0, "N_tilde: q");
  const S one(1.0);
  const S x = one - q;
  const S x1a = pow_nonneg(x, one - alpha);
  const S g = one - pow_nonneg(x, alpha);
  return -2.0 / sqr(alpha) * x1a * sqr(g) + sqr(q) / alpha * x1a * g + (2.0 - q) * sqr(q);
}

// ---------------------------------------------------------------------------
// Finite part, q <= 0.9

inline constexpr int kFinitePartMaxP = 10;

/// c_p(s) = w~_{p-2} (p-3) (K_{p-2}(s) - (1-alpha)) for p = 4..10; R~ is
/// sum_p c_p(s) q^{p-4}. Index i holds p = i + 4.
template <Scalar S>
std::array<S, kFinitePartMaxP - 3> r_tilde_coefficients(const S& alpha, const S& s,
                                                        const KTable<S>& ktab,
                                                        const std::vector<S>& wt) {
  std::array<S, kFinitePartMaxP - 3> c{};
  const S one_minus_alpha = S(1.0) - alpha;
  for (int p = 4; p <= kFinitePartMaxP; ++p) {
    c[p - 4] = wt[p - 2] * S(p - 3.0) * (ktab(p - 2, s) - one_minus_alpha);
  }
  return c;
}

/// Same coefficients with K_n in the given form (no shared table).
template <Scalar S>
std::array<S, kFinitePartMaxP - 3> r_tilde_coefficients(const S& alpha, const S& s,
                                                        const std::vector<S>& wt, KForm form) {
  std::array<S, kFinitePartMaxP - 3> c{};
  const S one_minus_alpha = S(1.0) - alpha;
  for (int p = 4; p <= kFinitePartMaxP; ++p) {
    c[p - 4] = wt[p - 2] * S(p - 3.0) * (K(alpha, p - 2, s, form) - one_minus_alpha);
  }
  return c;
}

template <Scalar S, std::size_t N>
S horner(const std::array<S, N>& c, const S& x) {
  S acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

/// Alpha-dependent data shared by every (s, q) cell of one alpha-cell.
template <Scalar S>
struct AlphaData {
  explicit AlphaData(const S& a)
      : alpha(a), wt(omega_tilde_table(a, kFinitePartMaxP - 2)), ktab(a, kFinitePartMaxP - 2) {}
  S alpha;
  std::vector<S> wt;
  KTable<S> ktab;
};

/// r~ coefficients at s in [0, 1/2] (expanded K, safe at s = 0) and at
/// 1 - s in [1/2, 1] (closed K, which keeps interval enclosures tight there).
template <Scalar S>
struct FinitePartCoefficients {
  std::array<S, kFinitePartMaxP - 3> at_s;
  std::array<S, kFinitePartMaxP - 3> at_complement;
};

template <Scalar S>
FinitePartCoefficients<S> finite_part_coefficients(const AlphaData<S>& ad, const S& s) {
  require_within(s, 0.0, 0.5, "finite part: s");
  return {r_tilde_coefficients(ad.alpha, s, ad.ktab, ad.wt),
          r_tilde_coefficients(ad.alpha, S(1.0) - s, ad.wt, KForm::closed)};
}

/// sum_{p=4}^{10} w~_{p-2} (p-3) (K_{p-2}(s) - (1-alpha)) q^{p-4}.
template <Scalar S>
S R_tilde(const S& alpha, const S& s, const S& q, KForm form = KForm::expanded) {
  require_within(alpha, 0.0, 1.0, "R_tilde: alpha");
  require_within(s, 0.0, 1.0, "R_tilde: s");
  require_within(q, 0.0, 0.9, "R_tilde: q");
  return horner(r_tilde_coefficients(alpha, s, omega_tilde_table(alpha, kFinitePartMaxP - 2), form), q);
}

/// R~(s,q)(1 + E(1,q))^2 + R~(1-s,q)(1 + E(0,q))^2, given the r~
/// coefficients at s and at 1 - s.
template <Scalar S>
S I_tilde_f_from_coefficients(const S& alpha, const std::array<S, kFinitePartMaxP - 3>& cs,
                              const std::array<S, kFinitePartMaxP - 3>& cc, const S& q,
                              const BoundConstants& consts = {}) {
  require_within(alpha, consts.alpha_0, 1.0, "I_tilde_f: alpha");
  require_within(q, consts.q_bar, 0.9, "I_tilde_f: q");
  const S one(1.0);
  return horner(cs, q) * sqr(one + E_boundary(alpha, q, 1)) +
         horner(cc, q) * sqr(one + E_boundary(alpha, q, 0));
}

template <Scalar S>
S I_tilde_f(const AlphaData<S>& ad, const S& s, const S& q, const BoundConstants& consts = {}) {
  const auto fc = finite_part_coefficients(ad, s);
  return I_tilde_f_from_coefficients(ad.alpha, fc.at_s, fc.at_complement, q, consts);
}

template <Scalar S>
S I_tilde_f(const S& alpha, const S& s, const S& q, const BoundConstants& consts = {}) {
  return I_tilde_f(AlphaData<S>(alpha), s, q, consts);
}

/// Lower bound for I~f / q on alpha in [0,1], s in [0,1/2], q in [0, q_bar],
/// from E(0,q) < (1-alpha) + q E0(q) and E(1,q) > (1-alpha) + q E1(q).
template <Scalar S>
S M_f_from_coefficients(const S& alpha, const S& s, const std::array<S, kFinitePartMaxP - 3>& cs,
                        const std::array<S, kFinitePartMaxP - 3>& cc, const S& q,
                        const BoundConstants& consts = {}) {
  require_within(alpha, 0.0, 1.0, "M_f: alpha");
  require_within(s, 0.0, 0.5, "M_f: s");
  require_within(q, 0.0, consts.q_bar, "M_f: q");
  const S one(1.0);
  const S two_minus_alpha = 2.0 - alpha;
  const S sixth = ratio<S>(1, 6);
  const S base = sixth * (one - alpha) * two_minus_alpha;
  const S e0 = base * (one + pow_real(S(1.0) - S(consts.q_bar), alpha - 3.0) * q);
  const S e1 = -base;
  const S lead = sixth * (one - 2.0 * s) * two_minus_alpha *
                 (2.0 * two_minus_alpha * (e1 - e0) + q * (sqr(e1) - sqr(e0)));
  // Drop p = 4 and shift: sum_{p=5}^{10} c_p q^{p-5}.
  std::array<S, kFinitePartMaxP - 4> ts{};
  std::array<S, kFinitePartMaxP - 4> tc{};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ts[i] = cs[i + 1];
    tc[i] = cc[i + 1];
  }
  return lead + horner(ts, q) * sqr(two_minus_alpha + q * e1) +
         horner(tc, q) * sqr(two_minus_alpha + q * e0);
}

template <Scalar S>
S M_f(const AlphaData<S>& ad, const S& s, const S& q, const BoundConstants& consts = {}) {
  const auto fc = finite_part_coefficients(ad, s);
  return M_f_from_coefficients(ad.alpha, s, fc.at_s, fc.at_complement, q, consts);
}

template <Scalar S>
S M_f(const S& alpha, const S& s, const S& q, const BoundConstants& consts = {}) {
  return M_f(AlphaData<S>(alpha), s, q, consts);
}

/// Z^f with the denominator q^2 (log(1-q) + alpha/2 log^2(1-q))^2 cleared:
///   R~(s,q) (2D - q(2-q))^2 + R~(1-s,q) ((2-q) q (1-q)^{alpha-1} - 2(1-q) D)^2,
/// D = -log(1-q) - alpha/2 log^2(1-q). Regular at alpha = 0.
template <Scalar S>
S Z_f_from_coefficients(const S& alpha, const std::array<S, kFinitePartMaxP - 3>& cs,
                        const std::array<S, kFinitePartMaxP - 3>& cc, const S& q,
                        const BoundConstants& consts = {}) {
  require_within(alpha, 0.0, consts.alpha_0, "Z_f: alpha");
  require_within(q, consts.q_bar, 0.9, "Z_f: q");
  using std::log;
  const S one(1.0);
  const S x = one - q;
  const S l = log(x);
  const S d = -l - 0.5 * alpha * sqr(l);
  const S two_minus_q = 2.0 - q;
  return horner(cs, q) * sqr(2.0 * d - q * two_minus_q) +
         horner(cc, q) * sqr(two_minus_q * q * pow_real(x, alpha - one) - 2.0 * x * d);
}

template <Scalar S>
S Z_f(const AlphaData<S>& ad, const S& s, const S& q, const BoundConstants& consts = {}) {
  const auto fc = finite_part_coefficients(ad, s);
  return Z_f_from_coefficients(ad.alpha, fc.at_s, fc.at_complement, q, consts);
}

template <Scalar S>
S Z_f(const S& alpha, const S& s, const S& q, const BoundConstants& consts = {}) {
  return Z_f(AlphaData<S>(alpha), s, q, consts);
}

}  // namespace apsis

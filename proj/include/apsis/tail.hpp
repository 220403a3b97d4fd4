#pragma once

// Tail positivity: the quintic F(alpha, p) behind T^p > 0 for p >= 11, its
// derivative ladder, and a direct interval check of T^p on a grid.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "apsis/error.hpp"
#include "apsis/funcs.hpp"
#include "apsis/grid.hpp"
#include "apsis/interval.hpp"
#include "apsis/scalar.hpp"

namespace apsis {

/// Integer coefficients of F(alpha, p) = sum_{i,j} kFCoefficients[i][j] alpha^i p^j.
inline constexpr std::array<std::array<std::int64_t, 6>, 5> kFCoefficients{{
    {-39416, 58344, -31700, 7860, -884, 36},
    {-49920, 60450, -28620, 6940, -900, 50},
    {-12380, -1000, 7855, -3405, 565, -35},
    {-6240, 6870, -4140, 1280, -180, 10},
    {-44, -464, 385, -135, 19, -1},
}};

/// Polynomial in p with integer coefficients (constant term first).
using PPoly = std::vector<std::int64_t>;

inline PPoly p_derivative(const PPoly& c, int order = 1) {
  PPoly d = c;
  for (int k = 0; k < order; ++k) {
    if (d.size() <= 1) return {0};
    PPoly next(d.size() - 1);
    for (std::size_t j = 1; j < d.size(); ++j) next[j - 1] = d[j] * static_cast<std::int64_t>(j);
    d = std::move(next);
  }
  return d;
}

/// Coefficient in p of d^k F / d alpha^k evaluated at alpha = a (a in {0, 1}).
inline PPoly alpha_derivative_at(int k, int a) {
  if (a != 0 && a != 1) throw DomainError("alpha_derivative_at: a is 0 or 1");
  PPoly out(6, 0);
  for (int i = k; i < 5; ++i) {
    std::int64_t falling = 1;
    for (int r = 0; r < k; ++r) falling *= i - r;
    const std::int64_t apow = (a == 1 || i == k) ? 1 : 0;
    for (int j = 0; j < 6; ++j) out[j] += falling * apow * kFCoefficients[i][j];
  }
  return out;
}

/// f(p): the alpha^4 coefficient of F.
inline PPoly f_quartic() {
  return PPoly(kFCoefficients[4].begin(), kFCoefficients[4].end());
}

/// F(1, p) - F(0, p).
inline PPoly F_endpoint_difference() {
  PPoly out(6, 0);
  for (int i = 1; i < 5; ++i) {
    for (int j = 0; j < 6; ++j) out[j] += kFCoefficients[i][j];
  }
  return out;
}

template <Scalar S>
S eval_ppoly(const PPoly& c, const S& p) {
  S acc(static_cast<double>(c.back()));
  for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * p + S(static_cast<double>(*it));
  return acc;
}

/// F(alpha, p), Horner in p for each alpha power, then Horner in alpha.
template <Scalar S>
S F_poly(const S& alpha, long p) {
  if (p < 4) throw DomainError("F_poly needs p >= 4");
  const S ps(static_cast<double>(p));
  S acc = eval_ppoly(f_quartic(), ps);
  for (int i = 3; i >= 0; --i) {
    acc = acc * alpha +
          eval_ppoly(PPoly(kFCoefficients[i].begin(), kFCoefficients[i].end()), ps);
  }
  return acc;
}

/// F(alpha, p) from its definition through the weights omega_n (p >= 10):
///   2(1+alpha)[w_{p-3} w_2 (p-5)^2/(3(p-2)) + w_{p-4} w_3 (p-7)^2/(4(p-3))
///              + w_{p-5} w_4 (p-9)^2/(5(p-4))] - w_{p-2} (p-3) alpha (2(1+alpha)/(p-1) - alpha).
inline double F_definition(double alpha, long p) {
  if (p < 10) throw DomainError("F_definition needs p >= 10");
  auto w = [alpha](long n) { return omega(alpha, static_cast<int>(n)); };
  const double pd = static_cast<double>(p);
  const double bracket = w(p - 3) * w(2) * sqr(pd - 5) / (3 * (pd - 2)) +
                         w(p - 4) * w(3) * sqr(pd - 7) / (4 * (pd - 3)) +
                         w(p - 5) * w(4) * sqr(pd - 9) / (5 * (pd - 4));
  return 2 * (1 + alpha) * bracket - w(p - 2) * (pd - 3) * alpha * (2 * (1 + alpha) / (pd - 1) - alpha);
}

/// The polynomial rescaled to the definition:
///   alpha w_{p-5} F_poly / (60 (p-1)(p-2)(p-3)(p-4)).
inline double F_reconstructed(double alpha, long p) {
  const double pd = static_cast<double>(p);
  return alpha * omega(alpha, static_cast<int>(p - 5)) * F_poly(alpha, p) /
         (60 * (pd - 1) * (pd - 2) * (pd - 3) * (pd - 4));
}

struct TailRecord {
  std::string check;     // "sign_ladder", "F_alpha_sweep", "tail_coeff", "reconstruction"
  long p = 0;
  std::string quantity;  // what was evaluated
  std::string expected;  // "> 0", "< 0" or "match"
  Interval value;
  bool ok = true;
};

struct TailReport {
  std::vector<TailRecord> records;  // every violation plus the base checks
  std::size_t checks = 0;
  std::size_t violations = 0;
  long p_min = 0;
  long p_max = 0;
  double wall_time_s = 0.0;

  bool passed() const { return violations == 0; }

  void add(TailRecord r, bool keep_when_ok = true) {
    ++checks;
    if (!r.ok) ++violations;
    if (!r.ok || keep_when_ok) records.push_back(std::move(r));
  }
};

namespace detail {

inline TailRecord sign_record(std::string check, long p, std::string quantity, const Interval& v,
                              bool want_positive) {
  const bool ok = want_positive ? v.lo() > 0.0 : v.hi() < 0.0;
  return {std::move(check), p, std::move(quantity), want_positive ? "> 0" : "< 0", v, ok};
}

inline std::string violation_text(const TailReport& r) {
  std::string s = std::to_string(r.violations) + " tail check violation(s):";
  std::size_t shown = 0;
  for (const auto& rec : r.records) {
    if (rec.ok) continue;
    s += " (p=" + std::to_string(rec.p) + ", " + rec.quantity + ", " + rec.value.str() + ")";
    if (++shown == 10) break;
  }
  return s;
}

}  // namespace detail

/// Base inequalities of the derivative ladder for 11 <= p <= p_max, in
/// interval arithmetic on integer p, plus an alpha-interval sweep of F on
/// [0, 1] with step `alpha_step`. Never throws on a violation.
inline TailReport sign_ladder_report(long p_max, double alpha_step = 0.01) {
  if (p_max < 11) throw DomainError("sign_ladder needs p_max >= 11");
  const auto t0 = std::chrono::steady_clock::now();
  TailReport rep;
  rep.p_min = 11;
  rep.p_max = p_max;
  const PPoly d3 = alpha_derivative_at(3, 1);
  const PPoly d2 = alpha_derivative_at(2, 1);
  const PPoly f = f_quartic();
  const PPoly g = F_endpoint_difference();
  const PPoly f0 = alpha_derivative_at(0, 0);
  const PPoly f1 = alpha_derivative_at(0, 1);

  // Derivatives in p at p = 11 anchor the induction for each polynomial.
  const Interval p11(11.0);
  for (int k = 1; k <= 5; ++k) {
    const std::string dk = "d^" + std::to_string(k) + "/dp^" + std::to_string(k) + " ";
    rep.add(detail::sign_record("sign_ladder", 11, dk + "f(p)", eval_ppoly(p_derivative(f, k), p11), false));
    rep.add(detail::sign_record("sign_ladder", 11, dk + "[F(1,p)-F(0,p)]",
                                eval_ppoly(p_derivative(g, k), p11), true));
    if (k <= 4) {
      rep.add(detail::sign_record("sign_ladder", 11, dk + "d3F/da3(1,p)",
                                  eval_ppoly(p_derivative(d3, k), p11), true));
      rep.add(detail::sign_record("sign_ladder", 11, dk + "d2F/da2(1,p)",
                                  eval_ppoly(p_derivative(d2, k), p11), false));
    }
  }

  const Axis alpha_axis = build_axis("alpha", {AxisSegment::stepped(0.0, 1.0, alpha_step)});
  for (long p = 11; p <= p_max; ++p) {
    const Interval pi(static_cast<double>(p));
    rep.add(detail::sign_record("sign_ladder", p, "d3F/da3(1,p)", eval_ppoly(d3, pi), true), false);
    rep.add(detail::sign_record("sign_ladder", p, "d2F/da2(1,p)", eval_ppoly(d2, pi), false), false);
    rep.add(detail::sign_record("sign_ladder", p, "f(p)", eval_ppoly(f, pi), false), false);
    rep.add(detail::sign_record("sign_ladder", p, "F(1,p)-F(0,p)", eval_ppoly(g, pi), true), false);
    rep.add(detail::sign_record("sign_ladder", p, "F(0,p)", eval_ppoly(f0, pi), true), false);
    rep.add(detail::sign_record("sign_ladder", p, "F(1,p)", eval_ppoly(f1, pi), true), false);
    for (std::size_t i = 0; i < alpha_axis.cells(); ++i) {
      const Interval a = alpha_axis.cell(i);
      rep.add(detail::sign_record("F_alpha_sweep", p, "F(" + a.str() + ",p)", F_poly(a, p), true),
              false);
    }
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Throws VerificationFailure listing (p, quantity, value) on any violation.
inline TailReport sign_ladder(long p_max) {
  TailReport rep = sign_ladder_report(p_max);
  if (!rep.passed()) throw VerificationFailure(detail::violation_text(rep));
  return rep;
}

/// Interval check of T^p > 0 through T~ = T^p / (alpha^2 (1-alpha)) with the
/// geometric K form, on every (alpha-cell, s-cell) pair and every p in
/// [p_lo, p_hi]. Also compares F_poly against F_definition at the alpha
/// breakpoints. Never throws on a violation.
inline TailReport tail_coeff_check_report(const GridSpec& alpha_grid, const GridSpec& s_grid,
                                          long p_lo, long p_hi) {
  if (p_lo < 11 || p_hi < p_lo) throw DomainError("tail_coeff_check needs 11 <= p_lo <= p_hi");
  if (alpha_grid.dim() != 1 || s_grid.dim() != 1) {
    throw DomainError("tail_coeff_check takes one-axis alpha and s grids");
  }
  const Axis& aa = alpha_grid.axes()[0];
  const Axis& sa = s_grid.axes()[0];
  if (aa.min() < 0.0 || aa.max() > 1.0 || sa.min() < 0.0 || sa.max() > 1.0) {
    throw DomainError("tail_coeff_check grids must lie in [0, 1]");
  }
  const auto t0 = std::chrono::steady_clock::now();
  TailReport rep;
  rep.p_min = p_lo;
  rep.p_max = p_hi;
  const int n_max = static_cast<int>(p_hi) - 2;
  std::vector<Interval> k(static_cast<std::size_t>(n_max) + 1);
  for (std::size_t i = 0; i < aa.cells(); ++i) {
    const Interval alpha = aa.cell(i);
    const auto wt = omega_tilde_table(alpha, n_max);
    const Interval one_minus_alpha = Interval(1.0) - alpha;
    for (std::size_t j = 0; j < sa.cells(); ++j) {
      const Interval s = sa.cell(j);
      for (int n = 2; n <= n_max; ++n) k[n] = K_geometric(alpha, n, s);
      for (long p = p_lo; p <= p_hi; ++p) {
        Interval inner(0.0);
        for (long m = 2; m <= p - 3; ++m) {
          const long n = p - 1 - m;
          if (n < 2 || n == m) continue;
          inner = inner + wt[n] * wt[m] * Interval(static_cast<double>(n - m)) * k[n];
        }
        const Interval tt =
            one_minus_alpha * inner + wt[p - 2] * Interval(p - 3.0) * (k[p - 2] - one_minus_alpha);
        rep.add(detail::sign_record("tail_coeff", p,
                                    "T~(" + alpha.str() + "," + s.str() + ")", tt, true),
                false);
      }
    }
  }
  for (double a : aa.breakpoints) {
    if (a <= 0.0 || a >= 1.0) continue;
    for (long p = p_lo; p <= p_hi; ++p) {
      const double def = F_definition(a, p);
      const double rec = F_reconstructed(a, p);
      const bool ok = std::abs(def - rec) <= 1e-10 * std::max(std::abs(def), 1e-300);
      rep.add({"reconstruction", p, "F(" + std::to_string(a) + ",p)", "match",
               Interval(std::min(def, rec), std::max(def, rec)), ok},
              false);
    }
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline TailReport tail_coeff_check(const GridSpec& alpha_grid, const GridSpec& s_grid, long p_lo,
                                   long p_hi) {
  TailReport rep = tail_coeff_check_report(alpha_grid, s_grid, p_lo, p_hi);
  if (!rep.passed()) throw VerificationFailure(detail::violation_text(rep));
  return rep;
}

/// The default check: alpha and s over [0, 1] with step 0.02, p in [11, 40].
inline TailReport default_tail_coeff_check_report(long p_lo = 11, long p_hi = 40) {
  const GridSpec ag({build_axis("alpha", {AxisSegment::stepped(0.0, 1.0, 0.02)})});
  const GridSpec sg({build_axis("s", {AxisSegment::stepped(0.0, 1.0, 0.02)})});
  return tail_coeff_check_report(ag, sg, p_lo, p_hi);
}

}  // namespace apsis

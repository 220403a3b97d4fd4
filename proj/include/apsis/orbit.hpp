#pragma once

// Floating-point orbit computations for the power-law potential
// V(r) = r^{-alpha} / alpha (V(r) = -log r for alpha = 0): apsidal radii,
// the apsidal angle, its limits, small-q expansion and the dual pairing.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "apsis/error.hpp"
#include "apsis/funcs.hpp"
#include "apsis/quadrature.hpp"

namespace apsis {

// ---------------------------------------------------------------------------
// Parametrisations

/// q = 1 - r_-/r_+ from e = (r_+ - r_-)/(r_+ + r_-).
inline double e_to_q(double e) {
  if (!(e >= 0.0 && e < 1.0)) throw DomainError("eccentricity e must lie in [0, 1)");
  return 2.0 * e / (1.0 + e);
}

inline double q_to_e(double q) {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("q must lie in [0, 1)");
  return q / (2.0 - q);
}

inline double potential(double alpha, double r) {
  if (alpha == 0.0) return -std::log(r);
  return std::pow(r, -alpha) / alpha;
}

/// (l^2/2) r^-2 - V(r) - E; negative strictly between the apsides.
inline double apsidal_function(double alpha, double energy, double ell, double r) {
  return 0.5 * ell * ell / (r * r) - potential(alpha, r) - energy;
}

/// Largest angular momentum of a bounded orbit at energy E (the circular one).
inline double ell_max(double alpha, double energy) {
  if (!(alpha < 2.0)) throw DomainError("bounded orbits need alpha < 2");
  if (alpha == 0.0) return std::exp(energy - 0.5);
  const double base = 2.0 * alpha * energy / (alpha - 2.0);
  if (!(base > 0.0)) {
    throw NoBoundedOrbit(alpha > 0.0 ? "bounded orbits need E < 0 for alpha in (0, 2)"
                                     : "bounded orbits need E > 0 for alpha < 0");
  }
  return std::pow(base, (alpha - 2.0) / (2.0 * alpha));
}

struct ApsidalRadii {
  double r_minus;
  double r_plus;
};

/// Roots of the apsidal function on either side of the circular radius
/// l^{2/(2-alpha)}, by bisection to relative tolerance `rel_tol`.
inline ApsidalRadii apsidal_radii(double alpha, double energy, double ell, double rel_tol = 1e-12) {
  if (ell == 0.0) throw DegenerateOrbit("l = 0: the orbit falls into the centre (r_- = 0)");
  if (!(ell > 0.0)) throw DomainError("angular momentum must be positive");
  const double lmax = ell_max(alpha, energy);
  if (!(ell < lmax)) throw NoBoundedOrbit("l >= l_max: no bounded non-circular orbit");
  auto f = [&](double r) { return apsidal_function(alpha, energy, ell, r); };
  const double rc = std::pow(ell, 2.0 / (2.0 - alpha));
  if (!(f(rc) < 0.0)) throw NoBoundedOrbit("energy does not exceed the circular-orbit value");

  auto bisect = [&](double inside, double outside) {
    // f(inside) < 0 <= f(outside)
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (std::abs(outside - inside) <= rel_tol * std::abs(mid)) break;
      if (f(mid) < 0.0) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return 0.5 * (inside + outside);
  };
  double lo = rc;
  for (int k = 0; f(lo) < 0.0; ++k) {
    if (k > 2000) throw NoBoundedOrbit("could not bracket r_-");
    lo *= 0.5;
  }
  double hi = rc;
  for (int k = 0; f(hi) < 0.0; ++k) {
    if (k > 2000) throw NoBoundedOrbit("could not bracket r_+");
    hi *= 2.0;
  }
  return {bisect(rc, lo), bisect(rc, hi)};
}

// ---------------------------------------------------------------------------
// Apsidal angle

struct QuadratureOptions {
  int nodes = 256;       // initial order per panel
  int max_nodes = 4096;  // escalation limit
  double tolerance = 1e-12;
};

struct AngleResult {
  double value;
  double error_estimate;  // |I_n - I_{2n}| at the accepted order
  int nodes;
  std::size_t panels;
};

namespace detail {

// Panels in t for the boundary layer at t = 0 (s ~ t^2/4 ~ 1 - q).
inline std::vector<double> angle_panels(double q) {
  std::vector<double> b{0.0};
  if (q > 0.9) {
    for (double t = 2.0 * std::sqrt(1.0 - q); t < 0.5 * std::numbers::pi; t *= 4.0) b.push_back(t);
  }
  b.push_back(std::numbers::pi);
  return b;
}

}  // namespace detail

/// Delta theta = int_0^1 ds / (sqrt(s(1-s)) sqrt(1 + E(s,q))), computed as
/// int_0^pi dt / sqrt(1 + E(sin^2(t/2), q)). The order doubles from
/// `nodes` until two consecutive orders agree to `tolerance`.
inline AngleResult apsidal_angle_detailed(double alpha, double q, const QuadratureOptions& opt = {}) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("apsidal_angle needs q in (0, 1); see limit_values");
  if (!(alpha < 2.0)) throw DomainError("apsidal_angle needs alpha < 2");
  auto integrand = [alpha, q](double t) {
    const double sh = std::sin(0.5 * t);
    const double s = std::min(1.0, sh * sh);
    const double e = E(alpha, s, q);
    return 1.0 / std::sqrt(1.0 + e);
  };
  const auto panels = detail::angle_panels(q);
  int n = std::max(2, opt.nodes);
  double prev = integrate_panels(integrand, panels, n);
  double diff = 0.0;
  while (true) {
    const int n2 = 2 * n;
    const double next = integrate_panels(integrand, panels, n2);
    diff = std::abs(next - prev);
    if (diff <= opt.tolerance * std::max(1.0, std::abs(next)) || n2 >= opt.max_nodes) {
      return {next, diff, n2, panels.size() - 1};
    }
    prev = next;
    n = n2;
  }
}

inline double apsidal_angle(double alpha, double q, const QuadratureOptions& opt = {}) {
  return apsidal_angle_detailed(alpha, q, opt).value;
}

/// Delta theta straight from the radial integral
///   int_{r_-}^{r_+} l dr / (r^2 sqrt(2(E + V(r)) - l^2/r^2)),
/// with r = r_- + (r_+ - r_-)(1 - cos t)/2 removing the endpoint singularities.
inline double apsidal_angle_from_energy(double alpha, double energy, double ell, int nodes = 512) {
  const auto [rm, rp] = apsidal_radii(alpha, energy, ell, 1e-15);
  const double half = 0.5 * (rp - rm);
  auto integrand = [&](double t) {
    const double r = rm + half * (1.0 - std::cos(t));
    const double rad = 2.0 * (energy + potential(alpha, r)) - ell * ell / (r * r);
    const double dr = half * std::sin(t);
    if (!(rad > 0.0) || dr == 0.0) return 0.0;
    return ell * dr / (r * r * std::sqrt(rad));
  };
  std::vector<double> panels{0.0};
  for (int k = 1; k < 16; ++k) panels.push_back(std::numbers::pi * k / 16);
  panels.push_back(std::numbers::pi);
  return integrate_panels(integrand, panels, nodes);
}

enum class LimitEnd { q_to_0, q_to_1 };

/// Limits of Delta theta as q -> 0 and q -> 1.
inline double limit_values(double alpha, LimitEnd end) {
  if (!(alpha < 2.0)) throw DomainError("limit_values needs alpha < 2");
  if (end == LimitEnd::q_to_0) return std::numbers::pi / std::sqrt(2.0 - alpha);
  if (alpha > 0.0) return std::numbers::pi / (2.0 - alpha);
  return 0.5 * std::numbers::pi;
}

/// pi / sqrt(2-alpha) (1 + (alpha-1)(alpha+2)(q^2 + q^3)/96), valid for small q.
inline double asymptotic_expansion(double alpha, double q) {
  if (!(alpha < 2.0)) throw DomainError("asymptotic_expansion needs alpha < 2");
  const double c = (alpha - 1.0) * (alpha + 2.0) / 96.0;
  return std::numbers::pi / std::sqrt(2.0 - alpha) * (1.0 + c * q * q + c * q * q * q);
}

// ---------------------------------------------------------------------------
// Duality (2 - alpha)(2 - alpha_bar) = 4

inline double dual_exponent(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("duality check needs alpha in (0, 2)");
  return 2.0 - 4.0 / (2.0 - alpha);
}

/// Orbit parameter of the dual problem: radii map as r_bar = r^{(2-alpha)/2},
/// so 1 - q_bar = (1 - q)^{(2-alpha)/2}.
inline double dual_q(double alpha, double q) {
  return -std::expm1(0.5 * (2.0 - alpha) * std::log1p(-q));
}

struct DualityResult {
  double alpha_bar;
  double q_bar;             // dual orbit parameter
  double delta_direct;      // Delta_alpha(q)
  double delta_dual;        // (2 - alpha_bar)/2 * Delta_alpha_bar(q_bar)
  double discrepancy;       // |delta_direct - delta_dual|
  double delta_dual_same_q; // (2 - alpha_bar)/2 * Delta_alpha_bar(q)
  double discrepancy_same_q;
};

inline DualityResult duality_check(double alpha, double q, const QuadratureOptions& opt = {}) {
  const double ab = dual_exponent(alpha);
  const double qb = dual_q(alpha, q);
  const double scale = 0.5 * (2.0 - ab);
  const double direct = apsidal_angle(alpha, q, opt);
  const double dual = scale * apsidal_angle(ab, qb, opt);
  const double same = scale * apsidal_angle(ab, q, opt);
  return {ab, qb, direct, dual, std::abs(direct - dual), same, std::abs(direct - same)};
}

// ---------------------------------------------------------------------------
// Monotonicity sweep

struct SweepRow {
  double alpha;
  double e;
  double q;
  double delta_theta;
  double finite_difference;  // d(Delta theta)/de, centred (one-sided at the ends)
};

struct MonotonicityResult {
  std::vector<SweepRow> rows;
  struct PerAlpha {
    double alpha;
    int expected_sign;  // -1 decreasing, +1 increasing, 0 constant
    bool consistent;
    std::size_t violations;
  };
  std::vector<PerAlpha> summary;

  bool all_consistent() const {
    return std::all_of(summary.begin(), summary.end(), [](const PerAlpha& p) { return p.consistent; });
  }
};

/// e_j = j/(n+1), j = 1..n.
inline std::vector<double> default_e_grid(int n) {
  if (n < 3) throw DomainError("e grid needs at least 3 points");
  std::vector<double> e;
  for (int j = 1; j <= n; ++j) e.push_back(static_cast<double>(j) / (n + 1));
  return e;
}

/// Sign of d(Delta theta)/de: negative for alpha < 1, positive for alpha in (1, 2),
/// zero at alpha = 1 (and alpha = -2).
inline int expected_monotonicity(double alpha) {
  if (alpha == 1.0 || alpha == -2.0) return 0;
  return alpha < 1.0 && alpha > -2.0 ? -1 : 1;
}

inline MonotonicityResult monotonicity_sweep(const std::vector<double>& alphas,
                                             const std::vector<double>& e_grid,
                                             double zero_tolerance = 1e-8) {
  if (e_grid.size() < 3) throw DomainError("monotonicity_sweep needs at least 3 e points");
  for (std::size_t i = 0; i < e_grid.size(); ++i) {
    if (!(e_grid[i] > 0.0 && e_grid[i] < 1.0)) throw DomainError("e grid must lie in (0, 1)");
    if (i > 0 && !(e_grid[i] > e_grid[i - 1])) throw DomainError("e grid must be ascending");
  }
  MonotonicityResult out;
  for (double a : alphas) {
    if (!(a < 2.0 && a > -2.0) ) throw DomainError("monotonicity_sweep needs alpha in (-2, 2)");
    std::vector<double> d;
    for (double e : e_grid) d.push_back(apsidal_angle(a, e_to_q(e)));
    const int sign = expected_monotonicity(a);
    std::size_t bad = 0;
    const std::size_t n = e_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = i == 0 ? 0 : i - 1;
      const std::size_t r = i + 1 == n ? n - 1 : i + 1;
      const double fd = (d[r] - d[l]) / (e_grid[r] - e_grid[l]);
      out.rows.push_back({a, e_grid[i], e_to_q(e_grid[i]), d[i], fd});
      const bool ok = sign < 0 ? fd < 0.0 : sign > 0 ? fd > 0.0 : std::abs(fd) <= zero_tolerance;
      if (!ok) ++bad;
    }
    out.summary.push_back({a, sign, bad == 0, bad});
  }
  return out;
}

inline void write_monotonicity_csv(std::ostream& os, const MonotonicityResult& m) {
  os << "alpha,e,q,delta_theta,finite_difference\n";
  const auto old = os.precision(17);
  for (const auto& r : m.rows) {
    os << r.alpha << ',' << r.e << ',' << r.q << ',' << r.delta_theta << ',' << r.finite_difference
       << '\n';
  }
  os.precision(old);
}

}  // namespace apsis

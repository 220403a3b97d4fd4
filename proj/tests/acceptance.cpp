// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "apsis/apsis.hpp"

using namespace apsis;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1 ---------------------------------------------------------------------------

void campaigns(Criterion& c) {
  for (const auto& info : kCampaigns) {
    const auto r = run_campaign(info.name);
    const double ref = info.reference_min;
    const double rel = (r.min_lower - ref) / ref;
    c.check(r.passed() && r.min_lower > 0.0,
            fmt("%-9s positive: min %.6g over %zu cells (%.1f s)", std::string(info.name).c_str(), r.min_lower,
                r.cell_count, r.wall_time_s));
    c.check(std::abs(rel) <= 0.10,
            fmt("%-9s reference %.6g, deviation %+.1f%% (band +-10%%)", std::string(info.name).c_str(), ref,
                100 * rel));
  }
}

// ---- 2 ---------------------------------------------------------------------------

void tail(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ladder = sign_ladder(200);
  c.check(ladder.passed() && ladder.violations == 0,
          fmt("sign_ladder(200): %zu checks, %zu violations", ladder.checks, ladder.violations));
  const auto coeff = default_tail_coeff_check_report(11, 40);
  c.check(coeff.passed() && coeff.violations == 0,
          fmt("tail_coeff_check p in [11, 40]: %zu checks, %zu violations", coeff.checks, coeff.violations));
  const double t = seconds_since(t0);
  c.check(t < 60.0, fmt("runtime %.2f s (limit 60 s)", t));
}

// ---- 3 ---------------------------------------------------------------------------

void exact_angles(Criterion& c) {
  double worst1 = 0.0, worst2 = 0.0;
  for (int k = 1; k <= 9; ++k) {
    worst1 = std::max(worst1, std::abs(apsidal_angle(1.0, k / 10.0) - kPi));
    worst2 = std::max(worst2, std::abs(apsidal_angle(-2.0, k / 10.0) - kPi / 2));
  }
  c.check(worst1 < 1e-9, fmt("alpha = 1:  max |angle - pi|   = %.2e (tol 1e-9)", worst1));
  c.check(worst2 < 1e-9, fmt("alpha = -2: max |angle - pi/2| = %.2e (tol 1e-9)", worst2));
}

// ---- 4 ---------------------------------------------------------------------------

void limits(Criterion& c) {
  for (double a : {-1.5, -0.5, 0.0, 0.3, 0.5, 0.9, 1.5}) {
    const double d0 = std::abs(apsidal_angle(a, 1e-4) - kPi / std::sqrt(2.0 - a));
    const auto r1 = apsidal_angle_detailed(a, 1.0 - 1e-6);
    const double d1 = std::abs(r1.value - limit_values(a, LimitEnd::q_to_1));
    c.check(d0 < 1e-4, fmt("alpha = %+.1f  q = 1e-4:     |angle - limit| = %.2e (tol 1e-4)", a, d0));
    c.check(d1 < 1e-3, fmt("alpha = %+.1f  q = 1 - 1e-6: |angle - limit| = %.2e (tol 1e-3, quadrature est %.1e)", a,
                           d1, r1.error_estimate));
  }
}

// ---- 5 ---------------------------------------------------------------------------

void asymptotics(Criterion& c) {
  for (double a : {-1.0, 0.5}) {
    const double r1 = apsidal_angle(a, 0.1) - asymptotic_expansion(a, 0.1);
    const double r2 = apsidal_angle(a, 0.05) - asymptotic_expansion(a, 0.05);
    const double ratio = r1 / r2;
    c.check(ratio >= 14.0 && ratio <= 18.0,
            fmt("alpha = %+.1f: residual(0.1)/residual(0.05) = %.3f (band [14, 18])", a, ratio));
  }
}

// ---- 6 ---------------------------------------------------------------------------

void monotonicity(Criterion& c) {
  const auto m = monotonicity_sweep({-1.9, -1.0, -0.5, 0.0, 0.3, 0.5, 0.9, 1.2, 1.5}, default_e_grid(50));
  for (const auto& s : m.summary) {
    c.check(s.consistent && s.expected_sign == (s.alpha < 1.0 ? -1 : 1),
            fmt("alpha = %+.1f: %s over 50 e-points, %zu violations", s.alpha,
                s.expected_sign < 0 ? "decreasing" : "increasing", s.violations));
  }
  const char* path = "monotonicity.csv";
  std::ofstream os(path);
  write_monotonicity_csv(os, m);
  os.close();
  c.check(static_cast<bool>(os), fmt("CSV written to %s (%zu rows)", path, m.rows.size()));
}

// ---- 7 ---------------------------------------------------------------------------

bool inside(const Interval& x, const Big& v) { return Big(x.lo()) <= v && v <= Big(x.hi()); }

Interval random_interval(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  double a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  return {a, b};
}

Interval random_sub(std::mt19937_64& rng, const Interval& x) { return random_interval(rng, x.lo(), x.hi()); }

std::size_t interval_inclusion() {
  std::mt19937_64 rng(20240601);
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const Interval a = random_interval(rng, -10, 10), b = random_interval(rng, -10, 10);
    const Interval a2 = random_sub(rng, a), b2 = random_sub(rng, b);
    const Interval p = random_interval(rng, 0.1, 10), p2 = random_sub(rng, p);
    const Interval e = random_interval(rng, -2, 2), e2 = random_sub(rng, e);
    bad += !(a + b).contains(a2 + b2);
    bad += !(a - b).contains(a2 - b2);
    bad += !(a * b).contains(a2 * b2);
    bad += !(a / p).contains(a2 / p2);
    bad += !exp(a).contains(exp(a2));
    bad += !log(p).contains(log(p2));
    bad += !sqrt(p).contains(sqrt(p2));
    bad += !pow_int(a, 3).contains(pow_int(a2, 3));
    bad += !pow_real(p, e).contains(pow_real(p2, e2));
  }
  return bad;
}

std::size_t interval_point_consistency() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100, 100);
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    double y = u(rng);
    if (y == 0.0) y = 1.0;
    const Interval X(x), Y(y);
    bad += !inside(X + Y, Big(x) + Big(y));
    bad += !inside(X - Y, Big(x) - Big(y));
    bad += !inside(X * Y, Big(x) * Big(y));
    bad += !inside(X / Y, Big(x) / Big(y));
    const double ax = std::abs(x) + 1e-3;
    bad += !inside(log(Interval(ax)), boost::multiprecision::log(Big(ax)));
    bad += !inside(sqrt(Interval(ax)), boost::multiprecision::sqrt(Big(ax)));
    bad += !inside(exp(Interval(x / 10)), boost::multiprecision::exp(Big(x / 10)));
    bad += !inside(pow_int(X, 5), boost::multiprecision::pow(Big(x), 5));
  }
  return bad;
}

// A_n decreasing and convex in s; K_n decreasing, convex, increasing in n.
std::size_t a_k_shape_violations() {
  const double h = 1e-3;
  std::size_t bad = 0;
  for (int n = 3; n <= 25; ++n) {
    for (double s = 0.01; s < 0.99; s += 0.01) {
      const double l = A(n, s - h), m = A(n, s), r = A(n, s + h);
      bad += !(r < m) + !(l + r - 2 * m >= -1e-14);
    }
  }
  for (double a = 0.05; a < 1.0; a += 0.1) {
    for (int n = 2; n <= 20; ++n) {
      for (double s = 0.01; s < 0.99; s += 0.02) {
        const double l = K(a, n, s - h), m = K(a, n, s), r = K(a, n, s + h);
        bad += !(r < m) + !(l + r - 2 * m >= -1e-12) + !(K(a, n + 1, s) > m);
      }
    }
  }
  return bad;
}

// [(K5 - K3)(s) - (K5 - K3)(1)] / (1-s) against its factored form, and its sign.
std::size_t k5_k3_violations() {
  std::size_t bad = 0;
  for (double a = 0.0; a <= 1.0; a += 0.05) {
    for (double s = 0.0; s < 0.999; s += 0.01) {
      const double lhs = ((K(a, 5, s) - K(a, 3, s)) - (K(a, 5, 1.0) - K(a, 3, 1.0))) / (1 - s);
      const double rhs = (2 - s) / 6 * (10 * s * s - 2 * a * s * s + 4 * a * s - 14 * s + 5 - a);
      bad += !(std::abs(lhs - rhs) <= 1e-12 / (1 - s)) + !(rhs >= 0.0);
    }
  }
  return bad;
}

// E positive, decreasing and convex in s; E -> 1 - alpha as q -> 0.
std::size_t prop_e() {
  const double h = 1e-3;
  std::size_t bad = 0;
  for (double a = 0.05; a < 1.0; a += 0.1) {
    for (double q = 0.05; q < 1.0; q += 0.1) {
      for (double s = 0.01; s < 0.99; s += 0.02) {
        const double l = E(a, s - h, q), m = E(a, s, q), r = E(a, s + h, q);
        bad += !(m > 0.0) + !(r < m) + !(l + r - 2 * m > 0.0);
      }
    }
    for (double s : {0.1, 0.5, 0.8}) bad += !(std::abs(E(a, s, 1e-8) - (1 - a)) < 1e-6);
  }
  return bad;
}

void properties(Criterion& c) {
  const auto inc = interval_inclusion();
  c.check(inc == 0, fmt("interval inclusion monotonicity: 10^4 cases x 9 ops, %zu violations", inc));
  const auto pc = interval_point_consistency();
  c.check(pc == 0, fmt("interval point consistency: 10^4 cases x 8 ops, %zu violations", pc));
  const auto ak = a_k_shape_violations();
  c.check(ak == 0, fmt("A_n / K_n monotonicity and convexity samples: %zu violations", ak));
  const auto ex = k5_k3_violations();
  c.check(ex == 0, fmt("K_5 - K_3 factorisation and sign: %zu violations", ex));
  const auto pe = prop_e();
  c.check(pe == 0, fmt("E positivity, monotonicity, convexity, q -> 0 limit: %zu violations", pe));

  double e_worst = 0.0, c_worst = 0.0, d_worst = 0.0, i_worst = 0.0;
  for (double a : {0.1, 0.4, 0.7, 0.9}) {
    for (double s : {0.1, 0.3, 0.5}) {
      for (double q : {0.1, 0.5, 0.9}) {
        e_worst = std::max(e_worst, std::abs(E_series(a, s, q, 400).value - E(a, s, q)));
      }
    }
    for (double q : {0.1, 0.5, 0.8, 0.9}) {
      const int terms = q < 0.85 ? 100 : 400;
      double sum = 0.0;
      for (int n = 1; n <= terms; ++n) sum += omega(a, n) * std::pow(q, n - 1);
      c_worst = std::max(c_worst, std::abs(C_norm(a, q) * sum - 1.0));
    }
  }
  for (double a : {0.2, 0.5, 0.8}) {
    for (double s : {0.1, 0.3, 0.5, 0.7}) {
      for (double q : {0.1, 0.3, 0.5}) {
        const double fd = dqE_numeric(a, s, q, 1e-6);
        d_worst = std::max(d_worst, std::abs(dqE(a, s, q, 60).value - fd) / std::abs(fd));
      }
    }
    for (double s : {0.1, 0.25, 0.45}) {
      for (double q : {0.1, 0.3, 0.5}) {
        const double direct = I_direct(a, s, q);
        i_worst = std::max(i_worst, std::abs(I_series(a, s, q, 40) - direct) / std::abs(direct));
      }
    }
  }
  c.check(e_worst < 1e-9, fmt("E series vs closed form: max abs diff %.2e (tol 1e-9)", e_worst));
  c.check(c_worst < 1e-8, fmt("C_norm times truncated series: max |x - 1| %.2e (tol 1e-8)", c_worst));
  c.check(d_worst < 1e-4, fmt("dqE series vs central difference: max rel diff %.2e (tol 1e-4)", d_worst));
  c.check(i_worst < 1e-3, fmt("I direct vs series splitting (p <= 40): max rel diff %.2e (tol 1e-3)", i_worst));
}

}  // namespace

int main() {
  std::vector<std::pair<Criterion, std::function<void(Criterion&)>>> all;
  all.push_back({{1, "campaign replication (8 grids, positivity, +-10% of reference minima)"}, campaigns});
  all.push_back({{2, "tail ladder and coefficient check"}, tail});
  all.push_back({{3, "exact angles alpha = 1, -2"}, exact_angles});
  all.push_back({{4, "limit values at q = 1e-4 and q = 1 - 1e-6"}, limits});
  all.push_back({{5, "fourth-order residual of the small-q expansion"}, asymptotics});
  all.push_back({{6, "monotonicity in e"}, monotonicity});
  all.push_back({{7, "property suites"}, properties});

  int failed = 0;
  for (auto& [c, fn] : all) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s [%.1f s]\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds_since(t0));
    for (const auto& d : c.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += !c.pass;
  }
  std::printf("acceptance: %d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "apsis/orbit.hpp"

using namespace apsis;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

constexpr double kPi = std::numbers::pi;

Big big_potential(double alpha, const Big& r) {
  if (alpha == 0.0) return -log(r);
  return pow(r, Big(-alpha)) / Big(alpha);
}

// Angle swept between the apsides r_- and r_+, from the radial integral of
// the orbit equation. E and l are recovered from the radii in 50 digits.
double radial_angle_oracle(double alpha, const Big& rm, const Big& rp, double tol = 1e-14) {
  const Big l2 = 2 * (big_potential(alpha, rm) - big_potential(alpha, rp)) / (1 / (rm * rm) - 1 / (rp * rp));
  const Big energy = l2 / (2 * rp * rp) - big_potential(alpha, rp);
  const Big ell = sqrt(l2);
  const Big half = (rp - rm) / 2;
  auto f = [&](const Big& t) -> Big {
    const Big r = rm + half * (1 - cos(t));
    const Big rad = 2 * (energy + big_potential(alpha, r)) - l2 / (r * r);
    if (rad <= 0) return Big(0);
    return ell * half * sin(t) / (r * r * sqrt(rad));
  };
  const Big v = boost::math::quadrature::gauss_kronrod<Big, 31>::integrate(
      f, Big(0), boost::math::constants::pi<Big>(), 20, tol);
  return static_cast<double>(v);
}

// Same oracle from (E, l): radii by 50-digit bisection on the apsidal function.
double energy_angle_oracle(double alpha, double energy, double ell) {
  auto g = [&](const Big& r) { return Big(ell) * ell / (2 * r * r) - big_potential(alpha, r) - energy; };
  const auto approx = apsidal_radii(alpha, energy, ell);
  auto refine = [&](double guess) {
    Big lo = guess * (1 - 1e-9);
    Big hi = guess * (1 + 1e-9);
    const bool lo_neg = g(lo) < 0;
    for (int i = 0; i < 140; ++i) {
      const Big m = (lo + hi) / 2;
      ((g(m) < 0) == lo_neg ? lo : hi) = m;
    }
    return (lo + hi) / 2;
  };
  return radial_angle_oracle(alpha, refine(approx.r_minus), refine(approx.r_plus));
}

}  // namespace

// ---- parametrisations ----------------------------------------------------------

TEST(Convert, Examples) {
  EXPECT_EQ(e_to_q(0.0), 0.0);
  EXPECT_EQ(q_to_e(0.0), 0.0);
  EXPECT_NEAR(e_to_q(1.0 / 3.0), 0.5, 1e-16);
  EXPECT_NEAR(q_to_e(0.5), 1.0 / 3.0, 1e-16);
  EXPECT_GT(e_to_q(1.0 - 1e-12), 1.0 - 1e-11);
  EXPECT_THROW(e_to_q(1.0), DomainError);
  EXPECT_THROW(e_to_q(-0.1), DomainError);
  EXPECT_THROW(q_to_e(1.0), DomainError);
}

TEST(Convert, RoundTripAndOrdering) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double e = u(rng);
    const double q = e_to_q(e);
    EXPECT_LE(e, q);
    const double back = q_to_e(q);
    ASSERT_LE(std::abs(back - e), 2 * std::numeric_limits<double>::epsilon() * std::max(e, 1e-300)) << e;
  }
}

// ---- radii ------------------------------------------------------------------------

TEST(Radii, KeplerClosedForm) {
  // E = -1/2: semi-major axis 1, e = sqrt(1 - l^2).
  EXPECT_NEAR(ell_max(1.0, -0.5), 1.0, 1e-15);
  for (double ell : {0.2, 0.5, 0.8, 0.99}) {
    const auto r = apsidal_radii(1.0, -0.5, ell);
    const double e = std::sqrt(1.0 - ell * ell);
    EXPECT_NEAR(r.r_minus, 1.0 - e, 1e-11) << ell;
    EXPECT_NEAR(r.r_plus, 1.0 + e, 1e-11) << ell;
  }
  const auto c = apsidal_radii(1.0, -0.5, 1.0 - 1e-9);
  EXPECT_NEAR(c.r_minus, 1.0, 1e-4);
  EXPECT_NEAR(c.r_plus, 1.0, 1e-4);
  EXPECT_LT(1.0 - c.r_minus / c.r_plus, 1e-4);
}

TEST(Radii, ResidualOfApsidalEquation) {
  const double lm = ell_max(0.5, -0.5);
  const auto r = apsidal_radii(0.5, -0.5, 0.8 * lm);
  EXPECT_LT(r.r_minus, r.r_plus);
  EXPECT_LT(std::abs(apsidal_function(0.5, -0.5, 0.8 * lm, r.r_minus)), 1e-10);
  EXPECT_LT(std::abs(apsidal_function(0.5, -0.5, 0.8 * lm, r.r_plus)), 1e-10);
}

TEST(Radii, BranchesAndErrors) {
  // alpha = 0: any E; alpha < 0: E > 0.
  for (auto [a, E] : {std::pair{0.0, 0.3}, std::pair{0.0, -2.0}, std::pair{-1.0, 1.5}, std::pair{1.5, -0.7}}) {
    const double lm = ell_max(a, E);
    const auto r = apsidal_radii(a, E, 0.6 * lm);
    EXPECT_LT(std::abs(apsidal_function(a, E, 0.6 * lm, r.r_minus)), 1e-10) << a;
    EXPECT_LT(std::abs(apsidal_function(a, E, 0.6 * lm, r.r_plus)), 1e-10) << a;
  }
  EXPECT_THROW(apsidal_radii(0.5, -0.5, 0.0), DegenerateOrbit);
  EXPECT_THROW(apsidal_radii(0.5, -0.5, ell_max(0.5, -0.5)), NoBoundedOrbit);
  EXPECT_THROW(apsidal_radii(0.5, 0.5, 0.1), NoBoundedOrbit);
  EXPECT_THROW(apsidal_radii(-1.0, -0.5, 0.1), NoBoundedOrbit);
}

TEST(Radii, QDecreasesWithAngularMomentum) {
  for (auto [a, E] : {std::pair{0.5, -0.5}, std::pair{0.0, 0.0}, std::pair{-1.0, 2.0}, std::pair{1.5, -1.0}}) {
    const double lm = ell_max(a, E);
    double prev = 1.0;
    for (int k = 1; k < 40; ++k) {
      const auto r = apsidal_radii(a, E, lm * k / 40.0);
      const double q = 1.0 - r.r_minus / r.r_plus;
      ASSERT_LT(q, prev) << a << ' ' << k;
      prev = q;
    }
  }
}

// ---- apsidal angle ----------------------------------------------------------------

TEST(ApsidalAngle, ClosedFormCases) {
  for (int k = 1; k <= 9; ++k) {
    EXPECT_NEAR(apsidal_angle(1.0, k / 10.0), kPi, 1e-9) << k;
    EXPECT_NEAR(apsidal_angle(-2.0, k / 10.0), kPi / 2, 1e-9) << k;
  }
  EXPECT_NEAR(apsidal_angle(1.0, 0.999), kPi, 1e-9);
}

TEST(ApsidalAngle, MatchesRadialOracle) {
  // q = 1/2 means r_- = 1/2, r_+ = 1.
  const double oracle = radial_angle_oracle(0.5, Big(0.5), Big(1), 1e-20);
  EXPECT_NEAR(apsidal_angle(0.5, 0.5), oracle, 1e-12);
  for (double a : {-1.5, 0.0, 0.9, 1.5}) {
    for (double q : {0.2, 0.7, 0.95}) {
      EXPECT_NEAR(apsidal_angle(a, q), radial_angle_oracle(a, Big(1) - Big(q), Big(1)), 1e-10) << a << ' ' << q;
    }
  }
}

TEST(ApsidalAngle, NearCollisionMatchesRadialOracle) {
  // The slow approach to the q -> 1 limit is a property of the integral, not of the quadrature.
  for (double a : {0.0, 0.5, 1.5}) {
    const double q = 1.0 - 1e-6;
    EXPECT_NEAR(apsidal_angle(a, q), radial_angle_oracle(a, Big(1) - Big(q), Big(1), 1e-16), 1e-9) << a;
  }
}

TEST(ApsidalAngle, DoublingNodesConverges) {
  for (double a : {-1.9, -1.0, 0.0, 0.5, 0.9, 1.5}) {
    for (double q : {0.01, 0.3, 0.7, 0.9, 0.99}) {
      QuadratureOptions o;
      o.nodes = 256;
      o.max_nodes = 512;
      const auto r = apsidal_angle_detailed(a, q, o);
      EXPECT_LT(r.error_estimate, 1e-9) << a << ' ' << q;
    }
  }
}

TEST(ApsidalAngle, EnergyFormComposition) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(-1.8, 1.8), uf(0.05, 0.95);
  for (int i = 0; i < 20; ++i) {
    const double a = ua(rng);
    const double E = a > 0.0 ? -0.5 - uf(rng) : a < 0.0 ? 0.5 + uf(rng) : uf(rng) - 0.5;
    const double ell = uf(rng) * ell_max(a, E);
    const auto r = apsidal_radii(a, E, ell);
    const double q = 1.0 - r.r_minus / r.r_plus;
    const double composed = apsidal_angle(a, q);
    EXPECT_NEAR(composed, energy_angle_oracle(a, E, ell), 1e-7) << a << ' ' << E << ' ' << ell;
    EXPECT_NEAR(composed, apsidal_angle_from_energy(a, E, ell), 1e-7) << a << ' ' << E << ' ' << ell;
  }
}

TEST(ApsidalAngle, Errors) {
  EXPECT_THROW(apsidal_angle(0.5, 0.0), DomainError);
  EXPECT_THROW(apsidal_angle(0.5, 1.0), DomainError);
  EXPECT_THROW(apsidal_angle(2.0, 0.5), DomainError);
}

// ---- limits and expansion ----------------------------------------------------------

TEST(Limits, Values) {
  EXPECT_NEAR(limit_values(0.0, LimitEnd::q_to_0), kPi / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(limit_values(0.0, LimitEnd::q_to_1), kPi / 2, 1e-15);
  EXPECT_NEAR(limit_values(1.0, LimitEnd::q_to_0), kPi, 1e-15);
  EXPECT_NEAR(limit_values(1.0, LimitEnd::q_to_1), kPi, 1e-15);
  EXPECT_NEAR(limit_values(-1.0, LimitEnd::q_to_1), kPi / 2, 1e-15);
  EXPECT_NEAR(limit_values(1.5, LimitEnd::q_to_1), 2 * kPi, 1e-15);
  EXPECT_THROW(limit_values(2.0, LimitEnd::q_to_0), DomainError);
}

TEST(Limits, CircularEnd) {
  for (double a : {-1.5, -0.5, 0.0, 0.3, 0.5, 0.9, 1.5}) {
    EXPECT_LT(std::abs(apsidal_angle(a, 1e-4) - limit_values(a, LimitEnd::q_to_0)), 1e-4) << a;
  }
}

TEST(Limits, CollisionEndApproachedMonotonically) {
  for (double a : {-1.5, -0.5, 0.0, 0.3, 0.5, 0.9, 1.5}) {
    const double lim = limit_values(a, LimitEnd::q_to_1);
    double prev = INFINITY;
    for (double gap : {1e-2, 1e-3, 1e-4, 1e-6, 1e-9}) {
      const double d = std::abs(apsidal_angle(a, 1.0 - gap) - lim);
      EXPECT_LT(d, prev) << a << ' ' << gap;
      prev = d;
    }
  }
  // Fast-converging cases meet the 1e-3 band at q = 1 - 1e-6.
  for (double a : {-1.5, -0.5, 0.9}) {
    EXPECT_LT(std::abs(apsidal_angle(a, 1.0 - 1e-6) - limit_values(a, LimitEnd::q_to_1)), 1e-3) << a;
  }
}

TEST(Expansion, TrivialCases) {
  for (double q : {0.0, 0.1, 0.5}) {
    EXPECT_NEAR(asymptotic_expansion(1.0, q), kPi, 1e-15);
    EXPECT_NEAR(asymptotic_expansion(-2.0, q), kPi / 2, 1e-15);
  }
}

TEST(Expansion, ResidualIsFourthOrder) {
  for (double a : {-1.0, 0.5, 0.0, 1.5}) {
    std::vector<double> res;
    for (double q : {0.1, 0.05, 0.025}) res.push_back(apsidal_angle(a, q) - asymptotic_expansion(a, q));
    EXPECT_GE(res[0] / res[1], 14.0) << a;
    EXPECT_LE(res[0] / res[1], 18.0) << a;
    EXPECT_GE(res[1] / res[2], 14.0) << a;
    EXPECT_LE(res[1] / res[2], 18.0) << a;
    EXPECT_LT(std::abs(res[2] / std::pow(0.025, 4)), 2.0 * std::abs(res[0] / std::pow(0.1, 4))) << a;
  }
}

// ---- duality ---------------------------------------------------------------------

TEST(Duality, KeplerHarmonic) {
  EXPECT_EQ(dual_exponent(1.0), -2.0);
  const auto d = duality_check(1.0, 0.4);
  EXPECT_NEAR(d.delta_direct, kPi, 1e-9);
  EXPECT_NEAR(d.delta_dual, kPi, 1e-9);
  EXPECT_LT(d.discrepancy, 1e-8);
}

TEST(Duality, RadiusRatioPairing) {
  EXPECT_NEAR(dual_exponent(0.5), -2.0 / 3.0, 1e-15);
  for (double a : {0.5, 0.3, 1.2, 1.7}) {
    for (double q : {0.1, 0.5, 0.9}) {
      const auto d = duality_check(a, q);
      EXPECT_NEAR((2.0 - a) * (2.0 - d.alpha_bar), 4.0, 1e-13);
      EXPECT_NEAR(1.0 - d.q_bar, std::pow(1.0 - q, 1.0 - a / 2.0), 1e-15);
      EXPECT_LT(d.discrepancy, 1e-8) << a << ' ' << q;
    }
  }
  // Holding q itself fixed across the pair does not give the identity.
  EXPECT_GT(duality_check(0.5, 0.5).discrepancy_same_q, 1e-3);
}

TEST(Duality, DomainEdges) {
  EXPECT_THROW(dual_exponent(2.0), DomainError);
  EXPECT_THROW(duality_check(2.0, 0.5), DomainError);
  EXPECT_THROW(duality_check(0.0, 0.5), DomainError);
  EXPECT_THROW(duality_check(-1.0, 0.5), DomainError);
}

// ---- monotonicity ------------------------------------------------------------------

TEST(Monotonicity, SignsOverFiftyPoints) {
  const auto e = default_e_grid(50);
  ASSERT_EQ(e.size(), 50u);
  const auto m = monotonicity_sweep({-1.9, -1.0, -0.5, 0.0, 0.3, 0.5, 0.9, 1.2, 1.5}, e);
  EXPECT_TRUE(m.all_consistent());
  EXPECT_EQ(m.rows.size(), 9u * 50u);
  for (const auto& s : m.summary) {
    EXPECT_EQ(s.expected_sign, s.alpha < 1.0 ? -1 : 1);
    EXPECT_EQ(s.violations, 0u) << s.alpha;
  }
}

TEST(Monotonicity, EndpointsBracketTheRange) {
  const auto m = monotonicity_sweep({0.5}, default_e_grid(20));
  const double hi = limit_values(0.5, LimitEnd::q_to_0);
  const double lo = limit_values(0.5, LimitEnd::q_to_1);
  for (const auto& r : m.rows) {
    EXPECT_LT(r.delta_theta, hi);
    EXPECT_GT(r.delta_theta, lo);
    EXPECT_NEAR(r.q, e_to_q(r.e), 1e-15);
  }
}

TEST(Monotonicity, KeplerIsFlat) {
  const auto m = monotonicity_sweep({1.0}, default_e_grid(10));
  EXPECT_TRUE(m.all_consistent());
  EXPECT_EQ(m.summary[0].expected_sign, 0);
  for (const auto& r : m.rows) EXPECT_LT(std::abs(r.finite_difference), 1e-8);
}

TEST(Monotonicity, CsvAndErrors) {
  const auto m = monotonicity_sweep({0.0, 1.5}, default_e_grid(5));
  std::ostringstream os;
  write_monotonicity_csv(os, m);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "alpha,e,q,delta_theta,finite_difference");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 10);
  EXPECT_THROW(monotonicity_sweep({0.5}, {0.1, 0.2}), DomainError);
  EXPECT_THROW(monotonicity_sweep({0.5}, {0.3, 0.2, 0.4}), DomainError);
  EXPECT_THROW(monotonicity_sweep({2.0}, default_e_grid(5)), DomainError);
  EXPECT_THROW(default_e_grid(2), DomainError);
}

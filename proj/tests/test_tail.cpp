#include <cmath>

#include <gtest/gtest.h>

#include "apsis/tail.hpp"

using namespace apsis;

namespace {

std::int64_t eval_exact(const PPoly& c, std::int64_t p) {
  std::int64_t acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * p + *it;
  return acc;
}

// Exact F(alpha, p) at alpha in {0, 1} from the coefficient table, no Horner in alpha.
std::int64_t F_exact(int a, std::int64_t p) {
  std::int64_t total = 0;
  std::int64_t apow = 1;
  for (int i = 0; i < 5; ++i) {
    std::int64_t row = 0;
    std::int64_t pp = 1;
    for (int j = 0; j < 6; ++j) {
      row += kFCoefficients[i][j] * pp;
      pp *= p;
    }
    total += apow * row;
    apow *= a;
  }
  return total;
}

}  // namespace

TEST(FPolynomial, EndpointDifferenceMatchesPrinted) {
  const PPoly printed{-68584, 65856, -24520, 4680, -496, 24};
  EXPECT_EQ(F_endpoint_difference(), printed);
  for (std::int64_t p = 11; p <= 200; ++p) {
    EXPECT_EQ(F_exact(1, p) - F_exact(0, p), eval_exact(printed, p));
    EXPECT_GT(eval_exact(printed, p), 0);
  }
}

TEST(FPolynomial, AlphaDerivativesMatchPrinted) {
  const PPoly d3{-38496, 30084, -15600, 4440, -624, 36};
  const PPoly d2{-62728, 33652, -4510, -750, 278, -22};
  EXPECT_EQ(alpha_derivative_at(3, 1), d3);
  EXPECT_EQ(alpha_derivative_at(2, 1), d2);
  EXPECT_LT(eval_exact(d2, 11), 0);
  EXPECT_THROW(alpha_derivative_at(1, 2), DomainError);
}

TEST(FPolynomial, QuarticCoefficient) {
  const PPoly f{-44, -464, 385, -135, 19, -1};
  EXPECT_EQ(f_quartic(), f);
  for (std::int64_t p = 11; p <= 500; ++p) ASSERT_LT(eval_exact(f, p), 0) << p;
  for (int k = 1; k <= 4; ++k) EXPECT_LT(eval_exact(p_derivative(f, k), 11), 0) << k;
}

TEST(FPolynomial, IntervalEvaluationIsExactOnIntegers) {
  for (long p = 11; p <= 200; ++p) {
    EXPECT_EQ(F_poly(Interval(0.0), p), Interval(static_cast<double>(F_exact(0, p)))) << p;
    EXPECT_EQ(F_poly(Interval(1.0), p), Interval(static_cast<double>(F_exact(1, p)))) << p;
  }
}

TEST(FPolynomial, ReconstructionFromWeights) {
  for (double a : {0.05, 0.3, 0.5, 0.77, 0.95}) {
    for (long p = 11; p <= 60; ++p) {
      const double def = F_definition(a, p);
      EXPECT_NEAR(F_reconstructed(a, p), def, 1e-10 * std::abs(def)) << a << ' ' << p;
    }
  }
  EXPECT_THROW(F_definition(0.5, 9), DomainError);
  EXPECT_THROW(F_poly(0.5, 3), DomainError);
}

TEST(FPolynomial, PositiveOnAlphaSweep) {
  for (long p = 11; p <= 200; ++p) {
    for (int k = 0; k < 100; ++k) {
      const Interval a(k / 100.0, (k + 1) / 100.0);
      ASSERT_GT(F_poly(a, p).lo(), 0.0) << p << ' ' << a;
    }
  }
}

TEST(SignLadder, PassesTo200) {
  const TailReport r = sign_ladder(200);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.violations, 0u);
  EXPECT_GT(r.checks, 190u * 6u);
  EXPECT_EQ(r.p_min, 11);
  EXPECT_EQ(r.p_max, 200);
  EXPECT_THROW(sign_ladder(10), DomainError);
}

TEST(SignLadder, Reproducible) {
  const TailReport a = sign_ladder_report(60);
  const TailReport b = sign_ladder_report(60);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].value, b.records[i].value);
    EXPECT_EQ(a.records[i].quantity, b.records[i].quantity);
  }
}

TEST(TailCoeffCheck, DefaultGridPasses) {
  const TailReport r = default_tail_coeff_check_report(11, 40);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.checks, 50u * 50u * 30u);
}

TEST(TailCoeffCheck, RejectsBelowTail) {
  const GridSpec g({build_axis("alpha", {AxisSegment::stepped(0.0, 1.0, 0.1)})});
  const GridSpec s({build_axis("s", {AxisSegment::stepped(0.0, 1.0, 0.1)})});
  EXPECT_THROW(tail_coeff_check(g, s, 4, 20), DomainError);
  EXPECT_THROW(tail_coeff_check(g, s, 20, 11), DomainError);
}

TEST(TailCoeffCheck, CoarseGridReportsViolations) {
  // Cells of width 0.1 are too wide for the enclosure near s = 0.8.
  const GridSpec g({build_axis("alpha", {AxisSegment::stepped(0.0, 1.0, 0.1)})});
  const GridSpec s({build_axis("s", {AxisSegment::stepped(0.0, 1.0, 0.1)})});
  const TailReport r = tail_coeff_check_report(g, s, 11, 20);
  EXPECT_FALSE(r.passed());
  EXPECT_THROW(tail_coeff_check(g, s, 11, 20), VerificationFailure);
  const GridSpec gf({build_axis("alpha", {AxisSegment::stepped(0.0, 1.0, 0.02)})});
  const GridSpec sf({build_axis("s", {AxisSegment::stepped(0.0, 1.0, 0.02)})});
  EXPECT_NO_THROW(tail_coeff_check(gf, sf, 11, 20));
}

TEST(TailCoeffCheck, PointValuesMatchFloat) {
  // The interval check uses T~ = T / (alpha^2 (1-alpha)); compare at points.
  for (double a : {0.2, 0.6}) {
    for (int p = 11; p <= 30; ++p) {
      for (double s : {0.1, 0.5, 0.9}) {
        const Interval tt = T_tilde(Interval(a), p, Interval(s), KForm::geometric);
        const double t = T_coeff(a, p, s);
        EXPECT_GT(t, 0.0);
        EXPECT_TRUE(Interval(tt.lo() - 1e-12, tt.hi() + 1e-12).contains(t / (a * a * (1 - a))));
      }
    }
  }
}

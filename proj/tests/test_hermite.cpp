#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "mhfie/hermite.hpp"
#include "test_util.hpp"

using namespace mhfie;
using mhfie::test::uniform_points;

TEST(HermiteEval, SmallDegrees) {
  EXPECT_EQ(hermite_eval(0, 3.7), 1.0);
  EXPECT_EQ(hermite_eval(3, 0.0), 0.0);
  EXPECT_EQ(hermite_eval(2, 1.0), 2.0);
  EXPECT_EQ(hermite_eval(1, 1.5), 3.0);
}

TEST(HermiteEval, MatchesExplicitPolynomials) {
  for (double z : {-2.3, -0.4, 0.0, 0.9, 3.1}) {
    EXPECT_NEAR(hermite_eval(2, z), 4 * z * z - 2, 1e-12);
    EXPECT_NEAR(hermite_eval(3, z), 8 * z * z * z - 12 * z, 1e-11);
    EXPECT_NEAR(hermite_eval(4, z), 16 * std::pow(z, 4) - 48 * z * z + 12, 1e-10);
  }
}

TEST(HermiteEval, OverflowIsRangeError) {
  EXPECT_THROW(hermite_eval(400, 50.0), RangeError);
  EXPECT_THROW(hermite_eval(-1, 0.0), DomainError);
}

TEST(HermiteEval, DerivativeRelation) {
  for (int n = 1; n <= 20; ++n) {
    for (double z : uniform_points(20, -3.0, 3.0)) {
      const double h = 1e-6 * std::max(1.0, std::abs(z));
      const double fd = (hermite_eval(n, z + h) - hermite_eval(n, z - h)) / (2 * h);
      const double exact = 2.0 * n * hermite_eval(n - 1, z);
      const double scale = std::max(std::abs(exact), 1e-3 * std::abs(2.0 * n * hermite_eval(n - 1, 3.0)));
      EXPECT_LE(std::abs(fd - exact) / scale, 1e-6) << "n=" << n << " z=" << z;
    }
  }
}

TEST(HermiteScaled, BaseValues) {
  EXPECT_NEAR(hermite_eval_scaled(0, 0.0), 0.7511255445, 1e-10);
  EXPECT_EQ(hermite_eval_scaled(1, 0.0), 0.0);
}

TEST(HermiteScaled, AgreesWithUnscaledForModerateDegree) {
  for (int n = 0; n <= 30; ++n)
    for (double z : {-2.0, 0.3, 1.7}) {
      const double gamma = std::sqrt(std::numbers::pi) * std::pow(2.0, n) * std::tgamma(n + 1.0);
      const double want = hermite_eval(n, z) * std::exp(-z * z / 2) / std::sqrt(gamma);
      EXPECT_NEAR(hermite_eval_scaled(n, z), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST(HermiteScaled, DegreeTwoHundredAgainstExtendedPrecision) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const big z = 1;
  big prev = 1, cur = 2 * z;
  for (int k = 1; k < 200; ++k) {
    big next = 2 * z * cur - 2 * k * prev;
    prev = cur;
    cur = next;
  }
  big gamma = boost::multiprecision::sqrt(boost::math::constants::pi<big>()) * boost::multiprecision::pow(big(2), 200);
  for (int k = 2; k <= 200; ++k) gamma *= k;
  const big want = cur * boost::multiprecision::exp(big(-0.5)) / boost::multiprecision::sqrt(gamma);
  EXPECT_REL_NEAR(hermite_eval_scaled(200, 1.0), want.convert_to<double>(), 1e-11);
}

TEST(HermiteScaled, FiniteOverWholeRange) {
  for (int n : {0, 1, 500, 2000, 10000})
    for (double z : {-100.0, -37.5, 0.0, 1e-3, 12.0, 100.0}) EXPECT_TRUE(std::isfinite(hermite_eval_scaled(n, z)));
}

TEST(HermiteRule, SinglePoint) {
  const auto r = hermite_gauss_rule(0);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.nodes[0], 0.0);
  EXPECT_NEAR(r.weights[0], std::sqrt(std::numbers::pi), 1e-15);
}

TEST(HermiteRule, TwoPoints) {
  const auto r = hermite_gauss_rule(1);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.nodes[0], -0.7071067812, 1e-10);
  EXPECT_NEAR(r.nodes[1], 0.7071067812, 1e-10);
  EXPECT_NEAR(r.weights[0], 0.8862269255, 1e-10);
  EXPECT_NEAR(r.weights[1], 0.8862269255, 1e-10);
}

TEST(HermiteRule, StructuralInvariants) {
  for (int N : {2, 5, 16, 63, 100, 400, 1000}) {
    const auto r = hermite_gauss_rule(N);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(N) + 1);
    double sum = 0.0, second = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const std::size_t m = r.size() - 1 - j;
      if (j > 0) EXPECT_GT(r.nodes[j], r.nodes[j - 1]);
      EXPECT_NEAR(r.nodes[j], -r.nodes[m], 1e-13 * std::max(1.0, std::abs(r.nodes[j])));
      EXPECT_GE(r.weights[j], 0.0);
      EXPECT_TRUE(std::isfinite(r.log_weights[j]));
      EXPECT_REL_NEAR(r.log_weights[j], r.log_weights[m], 1e-12);
      sum += r.weights[j];
      second += r.weights[j] * r.nodes[j] * r.nodes[j];
    }
    EXPECT_REL_NEAR(sum, std::sqrt(std::numbers::pi), 1e-12) << "N=" << N;
    EXPECT_REL_NEAR(second, std::sqrt(std::numbers::pi) / 2, 1e-11) << "N=" << N;
  }
}

TEST(HermiteRule, NodesAreRootsOfNextPolynomial) {
  for (int N : {3, 10, 40}) {
    const auto r = hermite_gauss_rule(N);
    for (double z : r.nodes) EXPECT_NEAR(hermite_eval_scaled(N + 1, z), 0.0, 1e-13);
  }
}

TEST(HermiteRule, GaussianMoments) {
  for (int N : {1, 4, 16, 64}) {
    const auto r = hermite_gauss_rule(N);
    for (int k = 0; k <= 2 * N + 1; ++k) {
      double m = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) m += r.weights[j] * std::pow(r.nodes[j], k);
      if (k % 2 == 1)
        EXPECT_NEAR(m, 0.0, 1e-12 * std::max(1.0, std::tgamma((k + 2) / 2.0))) << "N=" << N << " k=" << k;
      else
        EXPECT_REL_NEAR(m, std::tgamma((k + 1) / 2.0), 1e-11) << "N=" << N << " k=" << k;
    }
  }
}

TEST(HermiteRule, Orthogonality) {
  const auto r = hermite_gauss_rule(16);
  for (int m = 0; m <= 15; ++m)
    for (int n = 0; n <= 15; ++n) {
      double s = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) s += r.weights[j] * hermite_eval(m, r.nodes[j]) * hermite_eval(n, r.nodes[j]);
      auto gamma = [](int k) { return std::sqrt(std::numbers::pi) * std::pow(2.0, k) * std::tgamma(k + 1.0); };
      if (m == n)
        EXPECT_REL_NEAR(s, gamma(n), 1e-10);
      else
        EXPECT_LE(std::abs(s), 1e-10 * std::sqrt(gamma(m) * gamma(n))) << m << "," << n;
    }
}

TEST(HermiteRule, RejectsOutOfRangeDegree) {
  EXPECT_THROW(hermite_gauss_rule(-1), DomainError);
  EXPECT_THROW(hermite_gauss_rule(2001), DomainError);
}

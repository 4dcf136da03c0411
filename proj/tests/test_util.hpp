#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace mhfie::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline std::vector<double> uniform_points(int n, double a, double b) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(uniform(a, b));
  return out;
}

inline double rel_err(double got, double want) {
  const double d = std::abs(got - want);
  return want == 0.0 ? d : d / std::abs(want);
}

}  // namespace mhfie::test

#define EXPECT_REL_NEAR(got, want, tol) EXPECT_LE(::mhfie::test::rel_err((got), (want)), (tol)) << "got " << (got) << ", want " << (want)

#pragma once

// Reference integrals for manufactured forcings and quadrature tests.
//
// Double-exponential (tanh-sinh) quadrature, split at the kernel singularity so
// that every singular point sits at an interval end where the rule clusters.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "mhfie/error.hpp"
#include "mhfie/mhf.hpp"

namespace mhfie {

struct OracleOptions {
  double abs_tol = 1e-12;
  std::size_t max_depth = 12;
};

namespace detail {

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_engine(std::size_t depth) {
  thread_local boost::math::quadrature::tanh_sinh<double> engine12(12);
  thread_local boost::math::quadrature::tanh_sinh<double> engine15(15);
  return depth <= 12 ? engine12 : engine15;
}

}  // namespace detail

/// Integral over [a, b] of f(s, d), where d = a - s near a (d <= 0) and
/// d = b - s near b (d >= 0), exact even where s itself has lost precision.
/// Throws OracleError when the error estimate stays above the tolerance at the
/// maximum refinement depth.
template <class F>
double tanh_sinh_integral(F&& f, double a, double b, const OracleOptions& opt = {}) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw DomainError("tanh_sinh_integral: empty or reversed interval");
  }
  auto& engine = detail::tanh_sinh_engine(opt.max_depth);
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  double value = 0.0;
  try {
    value = engine.integrate(f, a, b, 0.1 * opt.abs_tol, &err, &l1, &levels);
  } catch (const std::exception& e) {
    throw OracleError("reference quadrature on [" + detail::format_g(a) + ", " + detail::format_g(b) +
                      "] failed: " + e.what());
  }
  // Boost reports the estimate for the integral mapped to unit length.
  err *= std::min(1.0, b - a);
  if (!std::isfinite(value) || !(err <= opt.abs_tol))
    throw OracleError("reference quadrature on [" + detail::format_g(a) + ", " + detail::format_g(b) +
                      "] did not converge: value " + detail::format_g(value) + ", error estimate " +
                      detail::format_g(err) + " after " + std::to_string(levels) + " levels");
  return value;
}

/// Integral over (0,1) of f(s, |x - s|) for a kernel singular at s = x.
///
/// f receives s as a UnitPoint with an accurate complement, and the exact
/// separation |x - s|, so integrands like log|x - s| or log(1 - s) stay
/// accurate arbitrarily close to the singular points.
template <class F>
double singular_split_integral(F&& f, const UnitPoint& x, const OracleOptions& opt = {}) {
  // Abscissae of very short intervals can underflow onto an endpoint; those
  // carry no weight and are skipped.
  auto g = [&](const UnitPoint& s, double sep) -> double {
    if (sep == 0.0 || s.x == 0.0 || s.xc == 0.0) return 0.0;
    return f(s, sep);
  };
  auto left = [&](double, double d) -> double {
    if (d <= 0.0) return g(UnitPoint{-d, 1.0 + d}, x.x + d);  // near 0: s = -d
    return g(UnitPoint{x.x - d, x.xc + d}, d);                  // near x: x - s = d
  };
  // The right half runs over the offset s - x in [0, 1 - x].
  auto right = [&](double, double d) -> double {
    if (d <= 0.0) return g(UnitPoint{x.x - d, x.xc + d}, -d);  // near x: s - x = -d
    return g(UnitPoint{1.0 - d, d}, x.xc - d);                   // near 1: 1 - s = d
  };
  return tanh_sinh_integral(left, 0.0, x.x, opt) + tanh_sinh_integral(right, 0.0, x.xc, opt);
}

}  // namespace mhfie

#pragma once

// Built-in test problems with known solutions singular at the endpoints.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mhfie/problem.hpp"

namespace mhfie {

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"ex1-log", "ex1-alg", "ex2-sqrt", "ex3-log", "ex3-alg"};
  return names;
}

namespace detail {

// log(x) log(1-x)
inline double log_log(const UnitPoint& p) { return p.log_x() * p.log_xc(); }
// sqrt(x (1-x))
inline double sqrt_bump(const UnitPoint& p) { return std::sqrt(p.x * p.xc); }

}  // namespace detail

/// Problem by registry name, or nullopt for an unknown name.
///
///   ex1-log   lambda=10, log|x-s|,        psi=u,   u = log(x) log(1-x)
///   ex1-alg   lambda=10, |x-s|^{-1/2},    psi=u,   u = sqrt(x(1-x))
///   ex2-sqrt  lambda=1,  (1-s)^{-1/2},    psi=u,   u = sqrt(x), g = sqrt(x) - pi/2
///   ex3-log   lambda=10, log|x-s|log|y-t|, psi=u^2, u = a(x) + a(y), a = log(x) log(1-x)
///   ex3-alg   lambda=10, |x-s|^{-1/2}|y-t|^{-1/2}, psi=u^2, u = p(x) p(y), p = sqrt(x(1-x))
inline std::optional<ProblemSpec> make_problem(const std::string& name) {
  ProblemSpec p;
  p.name = name;
  if (name == "ex1-log") {
    p.lambda = 10.0;
    p.kernel = KernelSpec::logarithmic();
    p.exact_solution = [](Coords x) { return detail::log_log(x[0]); };
  } else if (name == "ex1-alg") {
    p.lambda = 10.0;
    p.kernel = KernelSpec::algebraic(0.5);
    p.exact_solution = [](Coords x) { return detail::sqrt_bump(x[0]); };
  } else if (name == "ex2-sqrt") {
    p.lambda = 1.0;
    p.kernel = KernelSpec::regular([](Coords s, Coords) { return 1.0 / std::sqrt(s[0].xc); });
    p.exact_solution = [](Coords x) { return std::sqrt(x[0].x); };
    p.forcing = [](Coords x) { return std::sqrt(x[0].x) - 0.5 * std::numbers::pi; };
  } else if (name == "ex3-log") {
    p.dimension = 2;
    p.lambda = 10.0;
    p.kernel = KernelSpec::logarithmic();
    p.nonlinearity = Nonlinearity::square();
    p.exact_solution = [](Coords x) { return detail::log_log(x[0]) + detail::log_log(x[1]); };
    // (a(s) + a(t))^2 = a(s)^2 + 2 a(s) a(t) + a(t)^2
    const Field1D one = [](const UnitPoint&) { return 1.0; };
    const Field1D a = [](const UnitPoint& q) { return detail::log_log(q); };
    const Field1D a2 = [](const UnitPoint& q) { const double v = detail::log_log(q); return v * v; };
    const Field1D two_a = [](const UnitPoint& q) { return 2.0 * detail::log_log(q); };
    p.separable_integrand = {{a2, one}, {two_a, a}, {one, a2}};
  } else if (name == "ex3-alg") {
    p.dimension = 2;
    p.lambda = 10.0;
    p.kernel = KernelSpec::algebraic(0.5, 0.5);
    p.nonlinearity = Nonlinearity::square();
    p.exact_solution = [](Coords x) { return detail::sqrt_bump(x[0]) * detail::sqrt_bump(x[1]); };
    // (p(s) p(t))^2 = s(1-s) t(1-t)
    const Field1D p2 = [](const UnitPoint& q) { return q.x * q.xc; };
    p.separable_integrand = {{p2, p2}};
  } else {
    return std::nullopt;
  }
  return p;
}

}  // namespace mhfie

#pragma once

// Mapped Hermite functions on (0,1).
//
// The logit map z = alpha * log(x / (1 - x)) carries (0,1) onto the real line.
// Q_n(x) = H_n(z(x)) are orthogonal under
//     chi(x) = exp(-alpha^2 log^2(x/(1-x))) / (x (1-x)),
// with squared norm gamma_n = sqrt(pi) 2^n n! / alpha.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "mhfie/error.hpp"
#include "mhfie/hermite.hpp"

namespace mhfie {

/// Logistic sigma(t) = 1 / (1 + e^{-t}), evaluated on the branch that cannot overflow.
inline double logistic(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// log(1 + e^t) without overflow.
inline double softplus(double t) noexcept {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

/// A point of (0,1) stored together with its distance to 1.
///
/// Near x = 1 the complement 1 - x cannot be recovered from x in double
/// precision, so points produced from the logit variable carry both.
struct UnitPoint {
  double x = 0.5;
  double xc = 0.5;  // 1 - x

  /// Point with logit t, i.e. x = sigma(t), 1 - x = sigma(-t).
  static UnitPoint from_logit(double t) noexcept { return {logistic(t), logistic(-t)}; }
  static UnitPoint from_value(double x) noexcept { return {x, 1.0 - x}; }

  double log_x() const { return x < 0.5 ? std::log(x) : std::log1p(-xc); }
  double log_xc() const { return xc < 0.5 ? std::log(xc) : std::log1p(-x); }
  /// log(x / (1 - x))
  double logit() const { return log_x() - log_xc(); }
};

/// |a - b| computed from whichever representation is accurate.
inline double separation(const UnitPoint& a, const UnitPoint& b) noexcept {
  if (a.x > 0.5 && b.x > 0.5) return std::abs(a.xc - b.xc);
  return std::abs(a.x - b.x);
}

/// separation(a, b) measured against the distance of the points from the nearer endpoint.
inline double relative_separation(const UnitPoint& a, const UnitPoint& b) noexcept {
  const double scale = std::max(std::min(a.x, a.xc), std::min(b.x, b.xc));
  return separation(a, b) / scale;
}

namespace detail {
inline void require_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError(std::string(who) + ": alpha must be positive, got " + detail::format_g(alpha));
}
inline void require_open_unit(double x, const char* who) {
  if (!(x > 0.0 && x < 1.0))
    throw DomainError(std::string(who) + ": x must lie in (0,1), got " + detail::format_g(x));
}
}  // namespace detail

/// z(x) = alpha log(x / (1 - x)).
inline double map_to_real(double alpha, double x) {
  detail::require_alpha(alpha, "map_to_real");
  detail::require_open_unit(x, "map_to_real");
  return alpha * (std::log(x) - std::log1p(-x));
}

/// Inverse map gamma(zhat) = e^{zhat/alpha} / (1 + e^{zhat/alpha}).
/// Saturates to exactly 0 or 1 for |zhat/alpha| beyond ~745 (and to 1 much
/// earlier on the right); use UnitPoint::from_logit when the complement matters.
inline double map_to_unit(double alpha, double zhat) {
  detail::require_alpha(alpha, "map_to_unit");
  return logistic(zhat / alpha);
}

/// log chi^alpha(p), finite wherever the point itself is representable.
inline double log_weight_chi(double alpha, const UnitPoint& p) {
  const double lx = p.log_x();
  const double lxc = p.log_xc();
  const double t = lx - lxc;
  return -alpha * alpha * t * t - lx - lxc;
}

/// chi^alpha(x) = exp(-alpha^2 log^2(x/(1-x))) / (x (1-x)), evaluated in log space.
inline double weight_chi(double alpha, double x) {
  detail::require_alpha(alpha, "weight_chi");
  detail::require_open_unit(x, "weight_chi");
  return std::exp(log_weight_chi(alpha, UnitPoint::from_value(x)));
}

/// Mapping parameter and truncation degree of a mapped Hermite family.
struct MhfBasis {
  double alpha = 1.0;
  int degree = 0;

  MhfBasis() = default;
  MhfBasis(double a, int n) : alpha(a), degree(n) {
    if (!(alpha > 0.0 && alpha <= 100.0))
      throw DomainError("MhfBasis: alpha must lie in (0, 100], got " + detail::format_g(alpha));
    if (degree < 0 || degree > 2000)
      throw DomainError("MhfBasis: degree must lie in [0, 2000], got " + std::to_string(degree));
  }
};

/// Q_n^{(alpha)}(x) = H_n(alpha log(x/(1-x))).
inline double mhf_eval(const MhfBasis& basis, int n, double x) {
  if (n < 0 || n > basis.degree)
    throw DomainError("mhf_eval: n=" + std::to_string(n) + " outside [0, " +
                      std::to_string(basis.degree) + "]");
  return hermite_eval(n, map_to_real(basis.alpha, x));
}

/// gamma_n^{(alpha)} = sqrt(pi) 2^n n! / alpha. Log space beyond n = 170.
inline double gamma_n(double alpha, int n) {
  detail::require_alpha(alpha, "gamma_n");
  if (n < 0) throw DomainError("gamma_n: negative n");
  if (n <= 170) {
    double v = std::sqrt(std::numbers::pi) / alpha;
    for (int k = 1; k <= n; ++k) v *= 2.0 * k;
    return v;
  }
  return std::exp(0.5 * std::log(std::numbers::pi) + n * std::numbers::ln2 + std::lgamma(n + 1.0) -
                  std::log(alpha));
}

/// Gauss rule for the weight chi^alpha: nodes sigma(z_j / alpha), weights omega_j / alpha,
/// from the Gauss-Hermite rule (z_j, omega_j) of the same degree.
struct MhfRule {
  MhfBasis basis;
  std::vector<double> hermite_nodes;  // z_j
  std::vector<UnitPoint> points;      // x_j with complements
  std::vector<double> nodes;          // x_j
  std::vector<double> weights;        // chi_j
  std::vector<double> log_weights;    // log chi_j

  std::size_t size() const noexcept { return nodes.size(); }
};

inline MhfRule mhf_gauss_rule(const MhfBasis& basis) {
  const HermiteRule h = hermite_gauss_rule(basis.degree);
  MhfRule rule;
  rule.basis = basis;
  rule.hermite_nodes = h.nodes;
  const double log_alpha = std::log(basis.alpha);
  for (std::size_t j = 0; j < h.size(); ++j) {
    const UnitPoint p = UnitPoint::from_logit(h.nodes[j] / basis.alpha);
    rule.points.push_back(p);
    rule.nodes.push_back(p.x);
    rule.log_weights.push_back(h.log_weights[j] - log_alpha);
    rule.weights.push_back(h.weights[j] / basis.alpha);
  }
  return rule;
}

/// sum_j f(x_j) chi_j, approximating the chi-weighted integral of f over (0,1).
template <class F>
double mhf_quadrature(const MhfRule& rule, F&& f) {
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double v = f(rule.nodes[j]);
    if (!std::isfinite(v))
      throw EvaluationError("mhf_quadrature: integrand non-finite at node " + std::to_string(j) +
                            " (x=" + detail::format_g(rule.nodes[j]) + ")");
    sum += v * rule.weights[j];
  }
  return sum;
}

/// Pseudo-derivative x(1-x) d/dx Q_n = 2 n alpha Q_{n-1}; zero for n = 0.
inline double mhf_pseudo_deriv(const MhfBasis& basis, int n, double x) {
  if (n > basis.degree || n < 0)
    throw DomainError("mhf_pseudo_deriv: n=" + std::to_string(n) + " outside [0, " +
                      std::to_string(basis.degree) + "]");
  if (n == 0) {
    detail::require_open_unit(x, "mhf_pseudo_deriv");
    return 0.0;
  }
  return 2.0 * n * basis.alpha * mhf_eval(basis, n - 1, x);
}

}  // namespace mhfie

#pragma once

// Physicists' Hermite polynomials H_n on the real line and Gauss-Hermite rules
// for the weight exp(-z^2).

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "mhfie/error.hpp"

namespace mhfie {

/// H_n(z) by the three-term recurrence H_{n+1} = 2z H_n - 2n H_{n-1}.
/// Throws RangeError when the value overflows; use hermite_eval_scaled for large n.
inline double hermite_eval(int n, double z) {
  if (n < 0) throw DomainError("hermite_eval: negative degree " + std::to_string(n));
  if (!std::isfinite(z)) throw DomainError("hermite_eval: non-finite argument");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * z;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * z * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(cur))
    throw RangeError("hermite_eval: H_" + std::to_string(n) + "(" + std::to_string(z) +
                     ") overflows double precision");
  return cur;
}

namespace detail {

inline constexpr double kPiQuarterInv = 0.75112554446494248286;  // pi^{-1/4}
inline constexpr double kRescaleAbove = 0x1p+500;
inline constexpr double kRescaleFactor = 0x1p-500;
inline const double kLogRescale = 500.0 * std::numbers::ln2;

/// Orthonormal Hermite polynomial p_n = H_n / sqrt(gamma_n) with a running
/// exponent so that p_n = mantissa * exp(log_scale) never overflows.
struct ScaledOrthonormal {
  double mantissa = 0.0;       // p_n
  double prev_mantissa = 0.0;  // p_{n-1}, same scale
  double log_scale = 0.0;
  double sum_squares = 0.0;  // sum_{k<=n} p_k^2, scale exp(2 log_scale)
};

/// Runs the normalized recurrence
///   p_0 = pi^{-1/4}, p_{k+1} = sqrt(2/(k+1)) z p_k - sqrt(k/(k+1)) p_{k-1}
/// up to degree n. When `accumulate` is set the Christoffel sum is tracked too.
inline ScaledOrthonormal orthonormal_scaled(int n, double z, bool accumulate = false) {
  ScaledOrthonormal s;
  s.mantissa = kPiQuarterInv;
  s.prev_mantissa = 0.0;
  if (accumulate) s.sum_squares = s.mantissa * s.mantissa;
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * z * s.mantissa -
                        std::sqrt(static_cast<double>(k) / (k + 1)) * s.prev_mantissa;
    s.prev_mantissa = s.mantissa;
    s.mantissa = next;
    if (accumulate) s.sum_squares += next * next;
    if (std::abs(s.mantissa) > kRescaleAbove) {
      s.mantissa *= kRescaleFactor;
      s.prev_mantissa *= kRescaleFactor;
      s.sum_squares *= kRescaleFactor * kRescaleFactor;
      s.log_scale += kLogRescale;
    }
  }
  return s;
}

}  // namespace detail

/// Normalized Hermite function H_n(z) exp(-z^2/2) / sqrt(sqrt(pi) 2^n n!).
/// Overflow free for n <= 1e4 and |z| <= 1e2.
inline double hermite_eval_scaled(int n, double z) {
  if (n < 0) throw DomainError("hermite_eval_scaled: negative degree " + std::to_string(n));
  const auto s = detail::orthonormal_scaled(n, z);
  if (s.mantissa == 0.0) return 0.0;
  return s.mantissa * std::exp(s.log_scale - 0.5 * z * z);
}

/// p_0(z), ..., p_n(z) for the orthonormal polynomials p_k = H_k / sqrt(gamma_k)
/// (no exponential weight). Intended for moderate n and |z|.
inline std::vector<double> orthonormal_hermite_values(int n, double z) {
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  p[0] = detail::kPiQuarterInv;
  if (n >= 1) p[1] = std::sqrt(2.0) * z * p[0];
  for (int k = 1; k < n; ++k)
    p[k + 1] = std::sqrt(2.0 / (k + 1)) * z * p[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * p[k - 1];
  return p;
}

/// Normalized Hermite functions p_k(z) exp(-z^2/2), k = 0..n, all at once.
inline std::vector<double> hermite_functions_scaled(int n, double z) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  const double half_z2 = 0.5 * z * z;
  double prev = 0.0;
  double cur = detail::kPiQuarterInv;
  double log_scale = 0.0;
  out[0] = cur * std::exp(-half_z2);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * z * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > detail::kRescaleAbove) {
      cur *= detail::kRescaleFactor;
      prev *= detail::kRescaleFactor;
      log_scale += detail::kLogRescale;
    }
    out[static_cast<std::size_t>(k) + 1] = cur == 0.0 ? 0.0 : cur * std::exp(log_scale - half_z2);
  }
  return out;
}

/// Gauss-Hermite rule with N+1 nodes, exact for polynomials of degree <= 2N+1
/// against exp(-z^2). Nodes ascending and symmetric about zero.
struct HermiteRule {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  /// log of the weights; finite even where the weights themselves underflow.
  std::vector<double> log_weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Builds the (N+1)-point Gauss-Hermite rule.
///
/// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix
/// (zero diagonal, off-diagonal sqrt(k/2)), symmetrized and refined by one
/// Newton step on the scaled recurrence. Weights come from the Christoffel
/// function 1 / sum_k p_k(z_j)^2, evaluated in log space so that tail
/// weights keep full relative accuracy.
inline HermiteRule hermite_gauss_rule(int N) {
  if (N < 0 || N > 2000)
    throw DomainError("hermite_gauss_rule: degree must be in [0, 2000], got " + std::to_string(N));
  const auto n = static_cast<std::size_t>(N) + 1;
  HermiteRule rule;
  rule.degree = N;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  rule.log_weights.assign(n, 0.0);

  if (N > 0) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(N));
    for (int k = 1; k <= N; ++k) sub[k - 1] = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
      throw ConstructionError("hermite_gauss_rule: tridiagonal eigensolver did not converge for N=" +
                              std::to_string(N));
    const Eigen::VectorXd& ev = eig.eigenvalues();
    for (std::size_t j = 0; j < n; ++j) rule.nodes[j] = ev[static_cast<Eigen::Index>(j)];
  }

  // Work on the upper half (z >= 0) and mirror.
  const std::size_t half = n / 2;
  for (std::size_t j = n - 1; j + 1 > half; --j) {
    const std::size_t m = n - 1 - j;
    double z = (m == j) ? 0.0 : 0.5 * (rule.nodes[j] - rule.nodes[m]);
    if (z != 0.0) {
      const auto s = detail::orthonormal_scaled(N + 1, z);
      // p_{N+1}' = sqrt(2(N+1)) p_N
      z -= s.mantissa / (std::sqrt(2.0 * (N + 1)) * s.prev_mantissa);
    }
    const auto s = detail::orthonormal_scaled(N, z, true);
    const double log_w = -(std::log(s.sum_squares) + 2.0 * s.log_scale);
    rule.nodes[j] = z;
    rule.nodes[m] = -z;
    rule.log_weights[j] = rule.log_weights[m] = log_w;
    rule.weights[j] = rule.weights[m] = std::exp(log_w);
    if (j == 0) break;
  }

  for (std::size_t j = 1; j < n; ++j) {
    if (!(rule.nodes[j] > rule.nodes[j - 1]))
      throw ConstructionError("hermite_gauss_rule: nodes not strictly increasing for N=" +
                              std::to_string(N));
  }
  return rule;
}

}  // namespace mhfie

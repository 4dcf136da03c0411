#pragma once

// Interpolation, projection and error norms on mapped Hermite node sets.
//
// A generalized Lagrange function on (0,1) is an ordinary Lagrange polynomial
// in the logit variable, so one barycentric implementation serves both the
// mapped basis on (0,1) and the plain Hermite basis on the real line.
//
// Cardinal functions come from the first (modified Lagrange) form, which is
// accurate entry by entry. Values use the quotient form, which is exact on
// constants, unless its rounding bound shows the cancellation that wide
// Gauss-Hermite node sets produce near their edges.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mhfie/error.hpp"
#include "mhfie/hermite.hpp"
#include "mhfie/mhf.hpp"

namespace mhfie {

enum class NodeDomain {
  Real,  // nodes and evaluation points on the real line
  Unit,  // points in (0,1), transformed by t = logit_scale * log(x/(1-x))
};

/// Barycentric Lagrange basis on distinct transformed nodes t_j.
class LagrangeBasis {
 public:
  LagrangeBasis() = default;

  NodeDomain domain() const noexcept { return domain_; }
  double logit_scale() const noexcept { return logit_scale_; }
  std::size_t size() const noexcept { return t_.size(); }
  const std::vector<double>& transformed_nodes() const noexcept { return t_; }
  const std::vector<double>& weights() const noexcept { return b_; }
  /// Nodes in (0,1); empty for a Real basis.
  const std::vector<double>& unit_nodes() const noexcept { return x_; }

  /// Transformed coordinate of a point in (0,1).
  double transform(const UnitPoint& p) const { return logit_scale_ * p.logit(); }
  double transform(double x) const {
    if (domain_ == NodeDomain::Real) return x;
    detail::require_open_unit(x, "LagrangeBasis::transform");
    return transform(UnitPoint::from_value(x));
  }

  /// Index of the node equal to t, if any.
  std::optional<std::size_t> node_index(double t) const {
    auto it = std::lower_bound(t_.begin(), t_.end(), t);
    if (it != t_.end() && *it == t) return static_cast<std::size_t>(it - t_.begin());
    return std::nullopt;
  }
  std::optional<std::size_t> unit_node_index(double x) const {
    auto it = std::lower_bound(x_.begin(), x_.end(), x);
    if (it != x_.end() && *it == x) return static_cast<std::size_t>(it - x_.begin());
    return std::nullopt;
  }
  /// Index of the node stored as exactly this (x, 1 - x) pair, or with this x
  /// when the complement was derived from x. Recomputing the logit of a node
  /// can miss t_j by an ulp, so node hits are matched on the stored values.
  std::optional<std::size_t> node_index(const UnitPoint& p) const {
    if (domain_ == NodeDomain::Real) return std::nullopt;
    auto [lo, hi] = std::equal_range(x_.begin(), x_.end(), p.x);
    for (auto it = lo; it != hi; ++it) {
      const auto k = static_cast<std::size_t>(it - x_.begin());
      if (xc_[k] == p.xc || p.xc == 1.0 - p.x) return k;
    }
    return node_index(transform(p));
  }

  /// l_0, ..., l_N at a point of (0,1).
  std::vector<double> row(const UnitPoint& p) const {
    if (auto k = node_index(p)) {
      std::vector<double> out(size(), 0.0);
      out[*k] = 1.0;
      return out;
    }
    return row(transform(p));
  }
  double eval(const std::vector<double>& values, const UnitPoint& p) const {
    if (auto k = node_index(p)) return values[*k];
    return eval_transformed(values, transform(p));
  }

  /// l_0(t), ..., l_N(t).
  std::vector<double> row(double t) const {
    std::vector<double> out(size(), 0.0);
    if (auto k = node_index(t)) {
      out[*k] = 1.0;
      return out;
    }
    // l_j(t) = prod_i (t - t_i) * b_j / (t - t_j), in log-magnitudes. Each entry
    // is accurate to a few ulps, which the quotient form is not far from the
    // centre of a wide node set.
    double log_prod = 0.0;
    bool negative = false;
    for (double tj : t_) {
      log_prod += std::log(std::abs(t - tj));
      negative ^= t < tj;
    }
    for (std::size_t j = 0; j < size(); ++j) {
      const bool neg = negative ^ (b_[j] < 0.0) ^ (t < t_[j]);
      const double mag = std::exp(log_prod + log_b_[j] - std::log(std::abs(t - t_[j])));
      out[j] = neg ? -mag : mag;
    }
    return out;
  }

  /// Interpolant value at transformed coordinate t.
  double eval_transformed(const std::vector<double>& values, double t) const {
    if (auto k = node_index(t)) return values[*k];
    double num = 0.0;
    double den = 0.0;
    double num_abs = 0.0;
    double den_abs = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      const double w = b_[j] / (t - t_[j]);
      num += w * values[j];
      den += w;
      num_abs += std::abs(w * values[j]);
      den_abs += std::abs(w);
    }
    const double p = num / den;
    // rounding bounds of both forms, in units of the machine epsilon
    const double bound = std::abs(p) * (num_abs / std::abs(num) + den_abs / std::abs(den));
    // the first form's bound is at least n |p|
    const double n = static_cast<double>(size());
    if (!(bound > kPreferQuotient * n * std::abs(p))) return p;
    const auto l = row(t);
    double q = 0.0;
    double q_bound = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      q += l[j] * values[j];
      q_bound += std::abs(l[j] * values[j]);
    }
    q_bound *= n;
    return std::isfinite(q) && q_bound * kPreferQuotient < bound ? q : p;
  }

  /// d/dt of the interpolant at transformed coordinate t.
  double derivative_transformed(const std::vector<double>& values, double t) const {
    if (auto k = node_index(t)) {
      double d = 0.0;
      for (std::size_t j = 0; j < size(); ++j) {
        if (j == *k) continue;
        d += (b_[j] / b_[*k]) * (values[j] - values[*k]) / (t_[*k] - t_[j]);
      }
      return d;
    }
    const double p = eval_transformed(values, t);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      const double dt = t - t_[j];
      num += b_[j] * (p - values[j]) / (dt * dt);
      den += b_[j] / dt;
    }
    return num / den;
  }

 private:
  friend LagrangeBasis lagrange_basis(std::vector<double> nodes_transformed);
  friend LagrangeBasis lagrange_basis_unit(std::vector<double> nodes_transformed, double logit_scale);


  // The first form is used only when its bound is this much smaller.
  static constexpr double kPreferQuotient = 1e2;

  NodeDomain domain_ = NodeDomain::Real;
  double logit_scale_ = 1.0;
  std::vector<double> t_;
  std::vector<double> b_;
  std::vector<double> log_b_;  // log |b_j| before normalization
  std::vector<double> x_;
  std::vector<double> xc_;
};

namespace detail {

inline void fill_barycentric(const std::vector<double>& t, std::vector<double>& b, std::vector<double>& log_b) {
  const std::size_t n = t.size();
  if (n == 0) throw ConstructionError("lagrange_basis: at least one node is required");
  for (std::size_t j = 1; j < n; ++j) {
    if (t[j] < t[j - 1] || std::isnan(t[j]))
      throw ContractError("lagrange_basis: nodes must be ascending");
    const double gap = t[j] - t[j - 1];
    if (gap < 1e-14 * std::max({1.0, std::abs(t[j]), std::abs(t[j - 1])}))
      throw ConstructionError("lagrange_basis: nodes " + std::to_string(j - 1) + " and " +
                              std::to_string(j) + " coincide");
  }
  // Products of pairwise differences overflow for large N; accumulate
  // log-magnitudes and recover the sign from the ordering.
  std::vector<double> log_mag(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) s -= std::log(std::abs(t[j] - t[i]));
    log_mag[j] = s;
  }
  log_b = log_mag;
  const double top = *std::max_element(log_mag.begin(), log_mag.end());
  b.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool negative = ((n - 1 - j) % 2) == 1;
    b[j] = (negative ? -1.0 : 1.0) * std::exp(log_mag[j] - top);
  }
}

}  // namespace detail

/// Basis on the real line (Hermite collocation).
inline LagrangeBasis lagrange_basis(std::vector<double> nodes_transformed) {
  LagrangeBasis basis;
  basis.domain_ = NodeDomain::Real;
  basis.t_ = std::move(nodes_transformed);
  detail::fill_barycentric(basis.t_, basis.b_, basis.log_b_);
  return basis;
}

/// Basis for points of (0,1), nodes given in t = logit_scale * log(x/(1-x)).
inline LagrangeBasis lagrange_basis_unit(std::vector<double> nodes_transformed, double logit_scale) {
  detail::require_alpha(logit_scale, "lagrange_basis_unit");
  LagrangeBasis basis;
  basis.domain_ = NodeDomain::Unit;
  basis.logit_scale_ = logit_scale;
  basis.t_ = std::move(nodes_transformed);
  detail::fill_barycentric(basis.t_, basis.b_, basis.log_b_);
  for (double t : basis.t_) {
    basis.x_.push_back(logistic(t / logit_scale));
    basis.xc_.push_back(logistic(-t / logit_scale));
  }
  return basis;
}

/// Generalized Lagrange basis at the nodes of an MHF-Gauss rule.
inline LagrangeBasis lagrange_basis(const MhfRule& rule) {
  std::vector<double> t;
  t.reserve(rule.size());
  for (double z : rule.hermite_nodes) t.push_back(z / rule.basis.alpha);
  return lagrange_basis_unit(std::move(t), 1.0);
}


/// I_N v: the interpolant with values v_j at the basis nodes.
class Interpolant1D {
 public:
  Interpolant1D() = default;
  Interpolant1D(LagrangeBasis basis, std::vector<double> values)
      : basis_(std::move(basis)), values_(std::move(values)) {
    if (values_.size() != basis_.size())
      throw ContractError("Interpolant1D: " + std::to_string(values_.size()) + " values for " +
                          std::to_string(basis_.size()) + " nodes");
  }

  const LagrangeBasis& basis() const noexcept { return basis_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(double x) const {
    if (basis_.domain() == NodeDomain::Unit) {
      detail::require_open_unit(x, "interp_eval");
      if (auto k = basis_.unit_node_index(x)) return values_[*k];
    }
    return basis_.eval_transformed(values_, basis_.transform(x));
  }
  double operator()(const UnitPoint& p) const {
    if (basis_.domain() == NodeDomain::Real)
      throw ContractError("Interpolant1D: UnitPoint given to a real-line interpolant");
    return basis_.eval(values_, p);
  }

  /// x(1-x) d/dx of the interpolant (plain d/dx for a Real basis).
  double pseudo_derivative(const UnitPoint& p) const {
    const auto k = basis_.node_index(p);
    const double t = k ? basis_.transformed_nodes()[*k] : basis_.transform(p);
    return basis_.logit_scale() * basis_.derivative_transformed(values_, t);
  }

 private:
  LagrangeBasis basis_;
  std::vector<double> values_;
};

inline double interp_eval(const Interpolant1D& f, double x) { return f(x); }

/// Tensor-product interpolant; V(i, j) is the value at (x_i, y_j).
class Interpolant2D {
 public:
  Interpolant2D() = default;
  Interpolant2D(LagrangeBasis bx, LagrangeBasis by, Eigen::MatrixXd values)
      : bx_(std::move(bx)), by_(std::move(by)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != bx_.size() ||
        static_cast<std::size_t>(values_.cols()) != by_.size())
      throw ContractError("tensor_interpolant: value matrix is " + std::to_string(values_.rows()) + "x" +
                          std::to_string(values_.cols()) + ", bases have " + std::to_string(bx_.size()) +
                          " and " + std::to_string(by_.size()) + " nodes");
  }

  const LagrangeBasis& basis_x() const noexcept { return bx_; }
  const LagrangeBasis& basis_y() const noexcept { return by_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  double operator()(const UnitPoint& x, const UnitPoint& y) const {
    // Contract along y first, then along x.
    std::vector<double> column(bx_.size());
    if (auto k = by_.node_index(y)) {
      for (std::size_t i = 0; i < bx_.size(); ++i) column[i] = values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*k));
    } else {
      std::vector<double> line(by_.size());
      for (std::size_t i = 0; i < bx_.size(); ++i) {
        for (std::size_t j = 0; j < by_.size(); ++j) line[j] = values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        column[i] = by_.eval(line, y);
      }
    }
    return bx_.eval(column, x);
  }
  double operator()(double x, double y) const {
    detail::require_open_unit(x, "Interpolant2D");
    detail::require_open_unit(y, "Interpolant2D");
    return (*this)(UnitPoint::from_value(x), UnitPoint::from_value(y));
  }

 private:
  LagrangeBasis bx_;
  LagrangeBasis by_;
  Eigen::MatrixXd values_;
};

inline Interpolant2D tensor_interpolant(LagrangeBasis basis_x, LagrangeBasis basis_y, Eigen::MatrixXd values) {
  if (basis_x.domain() != NodeDomain::Unit || basis_y.domain() != NodeDomain::Unit)
    throw ContractError("tensor_interpolant: both bases must live on (0,1)");
  return Interpolant2D(std::move(basis_x), std::move(basis_y), std::move(values));
}

/// Truncated expansion sum_n u_n Q_n^{(alpha)} from the discrete projection.
///
/// Stored internally in the orthonormal Hermite basis (c_n = sqrt(gamma_n^H) u_n)
/// so that nothing overflows at high degree.
class Projection {
 public:
  Projection(MhfBasis basis, std::vector<double> orthonormal_coeffs)
      : basis_(basis), c_(std::move(orthonormal_coeffs)) {}

  const MhfBasis& basis() const noexcept { return basis_; }
  std::size_t size() const noexcept { return c_.size(); }

  /// u_n, the coefficient of Q_n^{(alpha)}.
  double coefficient(int n) const {
    const double log_gamma_h = 0.5 * std::log(std::numbers::pi) + n * std::numbers::ln2 + std::lgamma(n + 1.0);
    return c_.at(static_cast<std::size_t>(n)) * std::exp(-0.5 * log_gamma_h);
  }
  std::vector<double> coefficients() const {
    std::vector<double> u(c_.size());
    for (std::size_t n = 0; n < c_.size(); ++n) u[n] = coefficient(static_cast<int>(n));
    return u;
  }

  double operator()(const UnitPoint& p) const {
    const double z = basis_.alpha * p.logit();
    const auto h = hermite_functions_scaled(basis_.degree, z);
    double s = 0.0;
    for (std::size_t n = 0; n < c_.size(); ++n) s += c_[n] * h[n];
    return s * std::exp(0.5 * z * z);
  }
  double operator()(double x) const {
    detail::require_open_unit(x, "Projection");
    return (*this)(UnitPoint::from_value(x));
  }

 private:
  MhfBasis basis_;
  std::vector<double> c_;
};

/// Discrete chi-weighted L2 projection onto span{Q_0..Q_N}:
///   u_n = gamma_n^{-1} sum_j f(x_j) Q_n(x_j) chi_j.
/// f is called with UnitPoint.
template <class F>
Projection project(const MhfBasis& basis, const MhfRule& rule, F&& f) {
  if (rule.basis.alpha != basis.alpha)
    throw ContractError("project: rule alpha " + detail::format_g(rule.basis.alpha) + " differs from basis alpha " +
                        detail::format_g(basis.alpha));
  if (rule.basis.degree < basis.degree)
    throw ContractError("project: rule degree " + std::to_string(rule.basis.degree) + " below basis degree " +
                        std::to_string(basis.degree));
  std::vector<double> c(static_cast<std::size_t>(basis.degree) + 1, 0.0);
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double fj = f(rule.points[j]);
    if (!std::isfinite(fj))
      throw EvaluationError("project: f non-finite at node " + std::to_string(j));
    const double z = rule.hermite_nodes[j];
    // chi_j Q_n(x_j) / sqrt(gamma_n) = omega_j p_n(z_j) = [p_n e^{-z^2/2}] * exp(log omega_j + z^2/2)
    const auto h = hermite_functions_scaled(basis.degree, z);
    const double w = std::exp(rule.log_weights[j] + std::log(rule.basis.alpha) + 0.5 * z * z);
    for (std::size_t n = 0; n < c.size(); ++n) c[n] += fj * h[n] * w;
  }
  return Projection(basis, std::move(c));
}

struct ErrorNorms {
  double err_inf = 0.0;
  double err_l2chi = 0.0;
};

/// Fixed L-infinity grid on (0,1): 2001 points sigma(z/alpha) for z uniform on
/// [-8 alpha, 8 alpha] and 999 uniform points on [1e-3, 1 - 1e-3], sorted.
inline std::vector<UnitPoint> evaluation_grid(double alpha) {
  detail::require_alpha(alpha, "evaluation_grid");
  std::vector<UnitPoint> pts;
  pts.reserve(3000);
  for (int i = 0; i < 2001; ++i) pts.push_back(UnitPoint::from_logit(-8.0 + 16.0 * i / 2000.0));
  for (int i = 0; i < 999; ++i) pts.push_back(UnitPoint::from_value(1e-3 + (1.0 - 2e-3) * i / 998.0));
  std::sort(pts.begin(), pts.end(), [](const UnitPoint& a, const UnitPoint& b) { return a.x < b.x; });
  return pts;
}

/// One axis of the 101 x 101 grid used for 2D norms: 51 logistic-spaced plus
/// 50 uniform points, same ranges as the 1D grid.
inline std::vector<UnitPoint> evaluation_grid_axis_2d(double alpha) {
  detail::require_alpha(alpha, "evaluation_grid_axis_2d");
  std::vector<UnitPoint> pts;
  pts.reserve(101);
  for (int i = 0; i < 51; ++i) pts.push_back(UnitPoint::from_logit(-8.0 + 16.0 * i / 50.0));
  for (int i = 0; i < 50; ++i) pts.push_back(UnitPoint::from_value(1e-3 + (1.0 - 2e-3) * i / 49.0));
  std::sort(pts.begin(), pts.end(), [](const UnitPoint& a, const UnitPoint& b) { return a.x < b.x; });
  return pts;
}

/// Oversampled rule degree used for chi-weighted L2 errors of a degree-N approximation.
inline int l2chi_rule_degree(int N) { return 2 * N + 16; }

/// Max error on the fixed grid and chi-weighted L2 error (rule degree 2N+16).
/// approx and exact are called with UnitPoint.
template <class A, class E>
ErrorNorms error_norms(const A& approx, const E& exact, double alpha, int N) {
  ErrorNorms out;
  for (const UnitPoint& p : evaluation_grid(alpha)) out.err_inf = std::max(out.err_inf, std::abs(approx(p) - exact(p)));
  const MhfRule rule = mhf_gauss_rule(MhfBasis(alpha, l2chi_rule_degree(N)));
  double s = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double d = approx(rule.points[j]) - exact(rule.points[j]);
    s += d * d * rule.weights[j];
  }
  out.err_l2chi = std::sqrt(s);
  return out;
}

/// 2D analogue: 101 x 101 tensor grid and the tensor chi^{alpha1} chi^{alpha2} rule.
/// approx and exact are called with (UnitPoint, UnitPoint).
template <class A, class E>
ErrorNorms error_norms_2d(const A& approx, const E& exact, double alpha_x, double alpha_y, int N) {
  ErrorNorms out;
  const auto gx = evaluation_grid_axis_2d(alpha_x);
  const auto gy = evaluation_grid_axis_2d(alpha_y);
  for (const auto& px : gx)
    for (const auto& py : gy) out.err_inf = std::max(out.err_inf, std::abs(approx(px, py) - exact(px, py)));
  const MhfRule rx = mhf_gauss_rule(MhfBasis(alpha_x, l2chi_rule_degree(N)));
  const MhfRule ry = mhf_gauss_rule(MhfBasis(alpha_y, l2chi_rule_degree(N)));
  double s = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i)
    for (std::size_t j = 0; j < ry.size(); ++j) {
      const double d = approx(rx.points[i], ry.points[j]) - exact(rx.points[i], ry.points[j]);
      s += d * d * rx.weights[i] * ry.weights[j];
    }
  out.err_l2chi = std::sqrt(s);
  return out;
}

}  // namespace mhfie

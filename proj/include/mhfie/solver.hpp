#pragma once

// Nystrom-collocation solvers for weakly singular Fredholm-Hammerstein equations.
//
// Two discretizations are provided:
//
//  * MhfCollocation: collocate at MHF-Gauss nodes x_i in (0,1), expand the
//    solution in generalized Lagrange functions, and replace the integral by
//        sum_k Theta(s_k, x) psi(s_k, u(s_k)) chi_k / chi(s_k)
//    over an MHF-Gauss rule of degree NI.
//  * SmoothedHermite: substitute x = gamma(xhat) = sigma(xhat/alpha), which
//    moves the problem to the real line, then collocate at Hermite-Gauss
//    nodes with the modified weights omega_k e^{s_k^2} and the Jacobian
//    sigma'(s/alpha)/alpha folded into the nonlinearity.
//
// The two produce the same discrete system up to rounding.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mhfie/approx.hpp"
#include "mhfie/error.hpp"
#include "mhfie/hermite.hpp"
#include "mhfie/mhf.hpp"
#include "mhfie/newton.hpp"
#include "mhfie/problem.hpp"

namespace mhfie {

enum class Method { MhfCollocation, SmoothedHermite };

inline std::string to_string(Method m) {
  return m == Method::MhfCollocation ? "mhf" : "smoothed";
}

/// Accepts "mhf" / "smoothed" and the enumerator names.
inline std::optional<Method> method_from_string(const std::string& s) {
  if (s == "mhf" || s == "MhfCollocation") return Method::MhfCollocation;
  if (s == "smoothed" || s == "SmoothedHermite") return Method::SmoothedHermite;
  return std::nullopt;
}

struct SolverConfig {
  int N = 16;       // collocation degree, N + 1 nodes per dimension
  int NI = -1;      // quadrature degree; negative selects N + 1
  std::array<double, 2> alpha{1.0, 1.0};
  Method method = Method::MhfCollocation;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  Damping damping = Damping::Halving;
  int max_halvings = 30;

  int quadrature_degree() const noexcept { return NI >= 0 ? NI : N + 1; }

  void validate(int dimension) const {
    const int ni = quadrature_degree();
    if (N < 0 || ni < 0) throw ContractError("SolverConfig: N and NI must be non-negative");
    if (dimension == 1 && (N > 400 || ni > 400))
      throw ContractError("SolverConfig: N and NI are limited to 400 in 1D");
    if (dimension == 2 && (N > 48 || ni > 64))
      throw ContractError("SolverConfig: 2D solves are limited to N <= 48, NI <= 64");
    for (int d = 0; d < dimension; ++d)
      if (!(alpha[static_cast<std::size_t>(d)] > 0.0 && alpha[static_cast<std::size_t>(d)] <= 100.0))
        throw ContractError("SolverConfig: alpha must lie in (0, 100]");
    if (!(newton_tol > 0.0)) throw ContractError("SolverConfig: newton_tol must be positive");
  }
};

/// Collocation and quadrature data along one coordinate.
struct AxisDiscretization {
  double alpha = 1.0;
  std::vector<UnitPoint> colloc;        // x_i
  std::vector<UnitPoint> quad;          // s_k
  std::vector<double> log_quad_weight;  // log of the factor multiplying Theta(s_k, x) psi(...)
  LagrangeBasis basis;                  // collocation basis
  Eigen::MatrixXd interp;               // (NI+1) x (N+1): l_j(s_k)
};

/// MHF collocation axis: weights chi_k / chi(s_k), Lagrange basis in log(x/(1-x)).
inline AxisDiscretization make_axis_mhf(double alpha, int N, int NI) {
  const MhfRule colloc = mhf_gauss_rule(MhfBasis(alpha, N));
  const MhfRule quad = mhf_gauss_rule(MhfBasis(alpha, NI));
  AxisDiscretization ax;
  ax.alpha = alpha;
  ax.colloc = colloc.points;
  ax.quad = quad.points;
  for (std::size_t k = 0; k < quad.size(); ++k)
    ax.log_quad_weight.push_back(quad.log_weights[k] - log_weight_chi(alpha, quad.points[k]));
  ax.basis = lagrange_basis(colloc);
  ax.interp.resize(static_cast<Eigen::Index>(quad.size()), static_cast<Eigen::Index>(colloc.size()));
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const auto row = ax.basis.row(quad.hermite_nodes[k] / alpha);
    for (std::size_t j = 0; j < row.size(); ++j) ax.interp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = row[j];
  }
  return ax;
}

/// Smoothing-transformation axis: Hermite-Gauss nodes on the real line, weights
/// omega_k e^{s_k^2} sigma'(s_k/alpha)/alpha, Lagrange basis in xhat.
inline AxisDiscretization make_axis_smoothed(double alpha, int N, int NI) {
  const HermiteRule colloc = hermite_gauss_rule(N);
  const HermiteRule quad = hermite_gauss_rule(NI);
  AxisDiscretization ax;
  ax.alpha = alpha;
  for (double xh : colloc.nodes) ax.colloc.push_back(UnitPoint::from_logit(xh / alpha));
  const double log_alpha = std::log(alpha);
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const double sh = quad.nodes[k];
    ax.quad.push_back(UnitPoint::from_logit(sh / alpha));
    // log sigma'(t) = log sigma(t) + log sigma(-t) = -softplus(-t) - softplus(t)
    const double t = sh / alpha;
    const double log_jac = -softplus(-t) - softplus(t) - log_alpha;
    ax.log_quad_weight.push_back(quad.log_weights[k] + sh * sh + log_jac);
  }
  ax.basis = lagrange_basis_unit(colloc.nodes, alpha);
  ax.interp.resize(static_cast<Eigen::Index>(quad.size()), static_cast<Eigen::Index>(colloc.size()));
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const auto row = ax.basis.row(quad.nodes[k]);
    for (std::size_t j = 0; j < row.size(); ++j) ax.interp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = row[j];
  }
  return ax;
}

inline AxisDiscretization make_axis(Method m, double alpha, int N, int NI) {
  return m == Method::MhfCollocation ? make_axis_mhf(alpha, N, NI) : make_axis_smoothed(alpha, N, NI);
}

/// Quadrature-kernel weights W[row = collocation point][col = quadrature point].
/// 2D rows and columns are flattened as i * (N+1) + j and k * (NI+1) + l.
struct NystromMatrix {
  int dimension = 1;
  Eigen::MatrixXd W;
};

namespace detail {

inline void check_node_separation(const KernelSpec& kernel, const AxisDiscretization& ax, int NI) {
  if (!kernel.diagonal_singular()) return;
  for (std::size_t i = 0; i < ax.colloc.size(); ++i)
    for (std::size_t k = 0; k < ax.quad.size(); ++k)
      if (relative_separation(ax.colloc[i], ax.quad[k]) <= 1e-12)
        throw AssemblyError("assemble_nystrom: collocation node " + std::to_string(i) + " coincides with quadrature node " +
                            std::to_string(k) + " (x=" + detail::format_g(ax.colloc[i].x) + "); the kernel is singular there. "
                            "Choose a different NI (current NI=" + std::to_string(NI) + ", e.g. NI = N + 1)");
}

/// theta_d(s_k, x_i) * exp(log_w_k) for one axis, formed in log space for algebraic kernels.
inline Eigen::MatrixXd axis_kernel_matrix(const KernelSpec& kernel, int dim, const AxisDiscretization& ax) {
  const auto n = static_cast<Eigen::Index>(ax.colloc.size());
  const auto q = static_cast<Eigen::Index>(ax.quad.size());
  Eigen::MatrixXd a(n, q);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < q; ++k) {
      const double lw = ax.log_quad_weight[static_cast<std::size_t>(k)];
      const double sep = separation(ax.colloc[static_cast<std::size_t>(i)], ax.quad[static_cast<std::size_t>(k)]);
      double v = 0.0;
      switch (kernel.kind) {
        case KernelKind::Algebraic: v = std::exp(lw - kernel.mu[static_cast<std::size_t>(dim)] * std::log(sep)); break;
        case KernelKind::Logarithmic: v = std::log(sep) * std::exp(lw); break;
        case KernelKind::Regular: v = std::exp(lw); break;
      }
      a(i, k) = v;
    }
  return a;
}

}  // namespace detail

/// Discrete collocation system F(U) = lambda U - g - W psi(S, E U).
class DiscreteSystem {
 public:
  DiscreteSystem(const ProblemSpec& problem, const SolverConfig& config)
      : problem_(&problem), config_(config), dim_(problem.dimension) {
    problem.validate();
    config.validate(dim_);
    const int N = config.N;
    const int NI = config.quadrature_degree();
    for (int d = 0; d < dim_; ++d) {
      axes_[static_cast<std::size_t>(d)] = make_axis(config.method, config.alpha[static_cast<std::size_t>(d)], N, NI);
      detail::check_node_separation(problem.kernel, axes_[static_cast<std::size_t>(d)], NI);
    }
    n_ = static_cast<Eigen::Index>(N) + 1;
    nq_ = static_cast<Eigen::Index>(NI) + 1;
    assemble();
    forcing_.resize(rows());
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const auto pt = colloc_point(r);
      forcing_[r] = problem.forcing_at(Coords(pt.data(), static_cast<std::size_t>(dim_)));
      if (!std::isfinite(forcing_[r]))
        throw EvaluationError("forcing non-finite at collocation point " + std::to_string(r));
    }
  }

  int dimension() const noexcept { return dim_; }
  Eigen::Index rows() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  Eigen::Index cols() const noexcept { return dim_ == 1 ? nq_ : nq_ * nq_; }
  const Eigen::MatrixXd& weights() const noexcept { return w_; }
  const Eigen::VectorXd& forcing() const noexcept { return forcing_; }
  const AxisDiscretization& axis(int d) const { return axes_.at(static_cast<std::size_t>(d)); }
  const SolverConfig& config() const noexcept { return config_; }

  std::array<UnitPoint, 2> colloc_point(Eigen::Index r) const {
    if (dim_ == 1) return {axes_[0].colloc[static_cast<std::size_t>(r)], UnitPoint{}};
    return {axes_[0].colloc[static_cast<std::size_t>(r / n_)], axes_[1].colloc[static_cast<std::size_t>(r % n_)]};
  }
  std::array<UnitPoint, 2> quad_point(Eigen::Index c) const {
    if (dim_ == 1) return {axes_[0].quad[static_cast<std::size_t>(c)], UnitPoint{}};
    return {axes_[0].quad[static_cast<std::size_t>(c / nq_)], axes_[1].quad[static_cast<std::size_t>(c % nq_)]};
  }

  /// Collocation interpolant evaluated at the quadrature points.
  Eigen::VectorXd quad_values(const Eigen::VectorXd& u) const {
    if (dim_ == 1) return axes_[0].interp * u;
    const Eigen::MatrixXd um = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(u.data(), n_, n_);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> q = axes_[0].interp * um * axes_[1].interp.transpose();
    return Eigen::Map<const Eigen::VectorXd>(q.data(), q.size());
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd uq = quad_values(u);
    Eigen::VectorXd psi(cols());
    for (Eigen::Index c = 0; c < cols(); ++c) {
      const auto pt = quad_point(c);
      psi[c] = problem_->nonlinearity.psi(Coords(pt.data(), static_cast<std::size_t>(dim_)), uq[c]);
    }
    return problem_->lambda * u - forcing_ - w_ * psi;
  }

  /// lambda I - W diag(dpsi/du) E, with E the (tensor) interpolation matrix.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd uq = quad_values(u);
    Eigen::VectorXd d(cols());
    for (Eigen::Index c = 0; c < cols(); ++c) {
      const auto pt = quad_point(c);
      d[c] = problem_->nonlinearity.dpsi_du(Coords(pt.data(), static_cast<std::size_t>(dim_)), uq[c]);
    }
    return jacobian_from_derivative(d);
  }

  /// lambda I - W E, the matrix of the linear problem.
  Eigen::MatrixXd linear_operator() const { return jacobian_from_derivative(Eigen::VectorXd::Ones(cols())); }

 private:
  void assemble() {
    std::array<Eigen::MatrixXd, 2> a;
    for (int d = 0; d < dim_; ++d)
      a[static_cast<std::size_t>(d)] = detail::axis_kernel_matrix(problem_->kernel, d, axes_[static_cast<std::size_t>(d)]);
    if (dim_ == 1) {
      w_ = a[0];
    } else {
      w_.resize(rows(), cols());
      for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = 0; j < n_; ++j)
          for (Eigen::Index k = 0; k < nq_; ++k)
            for (Eigen::Index l = 0; l < nq_; ++l) w_(i * n_ + j, k * nq_ + l) = a[0](i, k) * a[1](j, l);
    }
    const bool has_factor = static_cast<bool>(problem_->kernel.smooth_factor);
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const auto x = colloc_point(r);
      for (Eigen::Index c = 0; c < cols(); ++c) {
        if (has_factor) {
          const auto s = quad_point(c);
          w_(r, c) *= problem_->kernel.smooth_factor(Coords(s.data(), static_cast<std::size_t>(dim_)),
                                                     Coords(x.data(), static_cast<std::size_t>(dim_)));
        }
        if (!std::isfinite(w_(r, c)))
          throw AssemblyError("assemble_nystrom: non-finite kernel weight at (i=" + std::to_string(r) +
                              ", k=" + std::to_string(c) + ")");
      }
    }
  }

  Eigen::MatrixXd jacobian_from_derivative(const Eigen::VectorXd& d) const {
    Eigen::MatrixXd jac;
    if (dim_ == 1) {
      jac = -(w_ * d.asDiagonal()) * axes_[0].interp;
    } else {
      // Row r of W diag(d) (E1 kron E2), reshaped to (N+1) x (N+1), is E1^T M_r E2
      // with M_r the row of W diag(d) reshaped to (NI+1) x (NI+1).
      jac.resize(rows(), rows());
      const Eigen::MatrixXd& e1 = axes_[0].interp;
      const Eigen::MatrixXd& e2 = axes_[1].interp;
      Eigen::MatrixXd m(nq_, nq_);
      for (Eigen::Index r = 0; r < rows(); ++r) {
        for (Eigen::Index k = 0; k < nq_; ++k)
          for (Eigen::Index l = 0; l < nq_; ++l) m(k, l) = w_(r, k * nq_ + l) * d[k * nq_ + l];
        const Eigen::MatrixXd t = e1.transpose() * m * e2;
        for (Eigen::Index a = 0; a < n_; ++a)
          for (Eigen::Index b = 0; b < n_; ++b) jac(r, a * n_ + b) = -t(a, b);
      }
    }
    jac.diagonal().array() += problem_->lambda;
    return jac;
  }

  const ProblemSpec* problem_;
  SolverConfig config_;
  int dim_;
  std::array<AxisDiscretization, 2> axes_;
  Eigen::Index n_ = 0;
  Eigen::Index nq_ = 0;
  Eigen::MatrixXd w_;
  Eigen::VectorXd forcing_;
};

inline NystromMatrix assemble_nystrom(const ProblemSpec& problem, const SolverConfig& config) {
  const DiscreteSystem sys(problem, config);
  return {problem.dimension, sys.weights()};
}

/// Node values of a converged solve plus the interpolant built on them.
struct Solution {
  SolverConfig config;
  int dimension = 1;
  Eigen::VectorXd node_values;  // flattened as i * (N+1) + j in 2D
  std::vector<UnitPoint> nodes_x;
  std::vector<UnitPoint> nodes_y;
  std::variant<Interpolant1D, Interpolant2D> interpolant;
  int newton_iters = 0;
  double final_residual = 0.0;
  /// Residual recomputed independently of the assembled matrices.
  double certified_residual = 0.0;

  double operator()(const UnitPoint& x) const { return std::get<Interpolant1D>(interpolant)(x); }
  double operator()(const UnitPoint& x, const UnitPoint& y) const { return std::get<Interpolant2D>(interpolant)(x, y); }

  /// Node values as an (N+1) x (N+1) matrix (2D) or a column (1D).
  Eigen::MatrixXd node_matrix() const {
    if (dimension == 1) return node_values;
    const auto n = static_cast<Eigen::Index>(nodes_x.size());
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(node_values.data(), n, n);
  }
};

/// max_i |lambda U_i - g(x_i) - sum_k Theta(s_k, x_i) w_k psi(s_k, u_N(s_k))|, rebuilt
/// from fresh quadrature rules, direct kernel evaluation and the solution
/// interpolant rather than the matrices used by the solve.
inline double residual_certificate(const ProblemSpec& problem, const Solution& sol) {
  const int dim = sol.dimension;
  const int NI = sol.config.quadrature_degree();
  std::array<std::vector<UnitPoint>, 2> quad;
  std::array<std::vector<double>, 2> wts;
  for (int d = 0; d < dim; ++d) {
    const double alpha = sol.config.alpha[static_cast<std::size_t>(d)];
    const HermiteRule h = hermite_gauss_rule(NI);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const UnitPoint s = UnitPoint::from_logit(h.nodes[k] / alpha);
      quad[static_cast<std::size_t>(d)].push_back(s);
      double w = 0.0;
      if (sol.config.method == Method::MhfCollocation) {
        w = std::exp(h.log_weights[k] - std::log(alpha) - log_weight_chi(alpha, s));
      } else {
        w = std::exp(h.log_weights[k] + h.nodes[k] * h.nodes[k]) * s.x * s.xc / alpha;
      }
      wts[static_cast<std::size_t>(d)].push_back(w);
    }
  }
  const std::size_t nq = quad[0].size();
  const std::size_t cols = dim == 1 ? nq : nq * nq;
  std::vector<std::array<UnitPoint, 2>> spts(cols);
  std::vector<double> psi_w(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    std::array<UnitPoint, 2> s{};
    double w = 0.0;
    double u = 0.0;
    if (dim == 1) {
      s[0] = quad[0][c];
      w = wts[0][c];
      u = sol(s[0]);
    } else {
      s = {quad[0][c / nq], quad[1][c % nq]};
      w = wts[0][c / nq] * wts[1][c % nq];
      u = sol(s[0], s[1]);
    }
    spts[c] = s;
    psi_w[c] = w * problem.nonlinearity.psi(Coords(s.data(), static_cast<std::size_t>(dim)), u);
  }
  double worst = 0.0;
  const auto rows = static_cast<std::size_t>(sol.node_values.size());
  const std::size_t n = sol.nodes_x.size();
  for (std::size_t r = 0; r < rows; ++r) {
    std::array<UnitPoint, 2> x{};
    if (dim == 1)
      x[0] = sol.nodes_x[r];
    else
      x = {sol.nodes_x[r / n], sol.nodes_y[r % n]};
    const Coords xc(x.data(), static_cast<std::size_t>(dim));
    double integral = 0.0;
    for (std::size_t c = 0; c < cols; ++c)
      integral += kernel_eval(problem.kernel, Coords(spts[c].data(), static_cast<std::size_t>(dim)), xc) * psi_w[c];
    const double res = problem.lambda * sol.node_values[static_cast<Eigen::Index>(r)] - problem.forcing_at(xc) - integral;
    worst = std::max(worst, std::isfinite(res) ? std::abs(res) : std::numeric_limits<double>::infinity());
  }
  return worst;
}

namespace detail {

inline Solution make_solution(const ProblemSpec& problem, const DiscreteSystem& sys, Eigen::VectorXd u, int iters) {
  Solution sol;
  sol.config = sys.config();
  sol.dimension = sys.dimension();
  sol.nodes_x = sys.axis(0).colloc;
  if (sol.dimension == 2) sol.nodes_y = sys.axis(1).colloc;
  sol.node_values = std::move(u);
  sol.newton_iters = iters;
  sol.final_residual = max_norm(sys.residual(sol.node_values));
  if (sol.dimension == 1) {
    std::vector<double> v(sol.node_values.data(), sol.node_values.data() + sol.node_values.size());
    sol.interpolant = Interpolant1D(sys.axis(0).basis, std::move(v));
  } else {
    sol.interpolant = tensor_interpolant(sys.axis(0).basis, sys.axis(1).basis, sol.node_matrix());
  }
  sol.certified_residual = residual_certificate(problem, sol);
  if (!(sol.final_residual <= sol.config.newton_tol) || !(sol.certified_residual <= sol.config.newton_tol))
    throw SolverError("solve '" + problem.name + "': residual " + detail::format_g(sol.final_residual) +
                      " (independent check " + detail::format_g(sol.certified_residual) + ") exceeds tolerance " +
                      detail::format_g(sol.config.newton_tol));
  return sol;
}

inline Solution solve_newton(const ProblemSpec& problem, const SolverConfig& config) {
  const DiscreteSystem sys(problem, config);
  NewtonOptions opt;
  opt.tol = config.newton_tol;
  opt.max_iter = config.newton_max_iter;
  opt.damping = config.damping;
  opt.max_halvings = config.max_halvings;
  NewtonResult res = newton_driver([&](const Eigen::VectorXd& u) { return sys.residual(u); },
                                   [&](const Eigen::VectorXd& u) { return sys.jacobian(u); },
                                   sys.forcing() / problem.lambda, opt);
  return make_solution(problem, sys, std::move(res.x), res.iterations);
}

}  // namespace detail

/// Linear problems (psi(s,u) = u): one dense LU solve of (lambda I - W E) U = g.
inline Solution solve_linear(const ProblemSpec& problem, const SolverConfig& config) {
  if (!problem.nonlinearity.linear)
    throw ContractError("solve_linear: problem '" + problem.name + "' has a nonlinear psi");
  const DiscreteSystem sys(problem, config);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.linear_operator());
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon()))
    throw SingularSystemError("solve_linear: lambda I - W E is singular (rcond " + detail::format_g(rcond) + ")", rcond);
  return detail::make_solution(problem, sys, lu.solve(sys.forcing()), 0);
}

/// One-dimensional solve by damped Newton from g / lambda.
inline Solution solve_nonlinear(const ProblemSpec& problem, const SolverConfig& config) {
  if (problem.dimension != 1) throw ContractError("solve_nonlinear: expects a 1D problem");
  return detail::solve_newton(problem, config);
}

/// Two-dimensional solve on the tensor grid, same Newton driver.
inline Solution solve_2d(const ProblemSpec& problem, const SolverConfig& config) {
  if (problem.dimension != 2) throw ContractError("solve_2d: expects a 2D problem");
  return detail::solve_newton(problem, config);
}

/// Smoothing-transformation Hermite collocation (1D or 2D).
inline Solution solve_smoothed(const ProblemSpec& problem, const SolverConfig& config) {
  if (config.method != Method::SmoothedHermite)
    throw ContractError("solve_smoothed: config.method must be SmoothedHermite");
  return detail::solve_newton(problem, config);
}

/// Newton solve with whatever method and dimension the inputs name.
inline Solution solve(const ProblemSpec& problem, const SolverConfig& config) {
  return detail::solve_newton(problem, config);
}

}  // namespace mhfie

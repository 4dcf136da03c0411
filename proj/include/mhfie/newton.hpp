#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mhfie/error.hpp"

namespace mhfie {

enum class Damping { None, Halving };

struct NewtonOptions {
  double tol = 1e-12;  // on the max-norm of the residual
  int max_iter = 50;
  Damping damping = Damping::Halving;
  int max_halvings = 30;
};

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> history;  // accepted residual norms, starting with the initial guess
};

namespace detail {
inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
inline double max_norm(const Eigen::VectorXd& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v[i]));
  }
  return m;
}
}  // namespace detail

/// Damped Newton for F(x) = 0 with an exact Jacobian, refactorized every step.
/// With halving damping a step is accepted only if it lowers ||F||_inf.
template <class Residual, class Jacobian>
NewtonResult newton_driver(Residual&& residual, Jacobian&& jacobian, Eigen::VectorXd x0,
                           const NewtonOptions& opt = {}) {
  NewtonResult out;
  out.x = std::move(x0);
  Eigen::VectorXd f = residual(out.x);
  if (f.size() != out.x.size())
    throw ContractError("newton_driver: residual has size " + std::to_string(f.size()) + " for " +
                        std::to_string(out.x.size()) + " unknowns");
  double r = detail::max_norm(f);
  out.history.push_back(r);
  Eigen::VectorXd best = out.x;
  double best_r = r;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if (r <= opt.tol) {
      out.iterations = iter;
      out.residual_norm = r;
      return out;
    }
    const Eigen::MatrixXd jac = jacobian(out.x);
    if (jac.rows() != out.x.size() || jac.cols() != out.x.size())
      throw ContractError("newton_driver: Jacobian dimensions do not match the unknowns");
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const double rcond = lu.rcond();
    if (!(rcond > std::numeric_limits<double>::epsilon()))
      throw SingularSystemError("newton_driver: singular Jacobian at iteration " + std::to_string(iter) +
                                    " (rcond " + detail::format_g(rcond) + ")",
                                rcond, iter);
    const Eigen::VectorXd dx = lu.solve(-f);

    double step = 1.0;
    Eigen::VectorXd xn = out.x + dx;
    Eigen::VectorXd fn = residual(xn);
    double rn = detail::max_norm(fn);
    if (opt.damping == Damping::Halving) {
      int halvings = 0;
      while (!(rn < r)) {
        if (halvings == opt.max_halvings)
          throw NonconvergenceError("newton_driver: no decrease after " + std::to_string(halvings) +
                                        " step halvings at iteration " + std::to_string(iter) +
                                        " (residual " + detail::format_g(r) + ")",
                                    detail::to_std(best), out.history);
        step *= 0.5;
        ++halvings;
        xn = out.x + step * dx;
        fn = residual(xn);
        rn = detail::max_norm(fn);
      }
    }
    out.x = std::move(xn);
    f = std::move(fn);
    r = rn;
    out.history.push_back(r);
    if (r < best_r) {
      best = out.x;
      best_r = r;
    }
  }
  if (r <= opt.tol) {
    out.iterations = opt.max_iter;
    out.residual_norm = r;
    return out;
  }
  throw NonconvergenceError("newton_driver: residual " + detail::format_g(r) + " above tolerance after " +
                                std::to_string(opt.max_iter) + " iterations",
                            detail::to_std(best), out.history);
}

}  // namespace mhfie

#pragma once

// Experiment drivers behind the command-line tool: node dumps, quadrature
// accuracy tables, single solves, convergence sweeps and method comparisons.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mhfie/approx.hpp"
#include "mhfie/mhf.hpp"
#include "mhfie/problem.hpp"
#include "mhfie/reference_quadrature.hpp"
#include "mhfie/registry.hpp"
#include "mhfie/report.hpp"
#include "mhfie/solver.hpp"

namespace mhfie {

// ---------------------------------------------------------------- nodes

/// CSV rows j,z,x,chi for the MHF-Gauss rule of degree N.
inline std::string nodes_csv(double alpha, int N) {
  const MhfRule rule = mhf_gauss_rule(MhfBasis(alpha, N));
  std::ostringstream os;
  os << "j,z,x,chi\n";
  for (std::size_t j = 0; j < rule.size(); ++j)
    os << j << ',' << detail::csv_double(rule.hermite_nodes[j]) << ',' << detail::csv_double(rule.nodes[j]) << ','
       << detail::csv_double(rule.weights[j]) << '\n';
  return os.str();
}

// ------------------------------------------------------------ quad-test

inline const std::vector<std::string>& quad_integrand_names() {
  static const std::vector<std::string> names{"sqrt-logweight", "log-logweight", "moments", "zero"};
  return names;
}

struct QuadTestRow {
  int N = 0;
  double value = 0.0;
  double error = 0.0;
};

struct QuadTestReport {
  std::string integrand;
  double alpha = 1.0;
  double reference = 0.0;
  std::vector<QuadTestRow> rows;
};

namespace detail {

// -log(x (1 - x))
inline double log_weight_term(const UnitPoint& p) { return -(p.log_x() + p.log_xc()); }

}  // namespace detail

/// Quadrature accuracy of the MHF-Gauss rule.
///
///   sqrt-logweight  int_0^1 sqrt(x) (-log(x(1-x))) dx
///   log-logweight   int_0^1 log(x) (-log(x(1-x))) dx
///   moments         int_0^1 log^k(x/(1-x)) chi^alpha(x) dx = Gamma((k+1)/2) / alpha^{k+1}, k even
///   zero            f = 0
///
/// The first two carry weight 1 and are evaluated as sum_j chi_j f(x_j) / chi(x_j);
/// their reference values come from tanh-sinh quadrature at tolerance 1e-13.
inline QuadTestReport quad_test(const std::string& integrand, double alpha, const std::vector<int>& n_list, int k = 2) {
  const auto& names = quad_integrand_names();
  if (std::find(names.begin(), names.end(), integrand) == names.end())
    throw ContractError("quad-test: unknown integrand '" + integrand + "'");
  if (integrand == "moments" && k < 0) throw ContractError("quad-test: moment order must be non-negative");

  std::function<double(const UnitPoint&)> f;
  bool unit_weight = true;
  if (integrand == "sqrt-logweight") {
    f = [](const UnitPoint& p) { return std::sqrt(p.x) * detail::log_weight_term(p); };
  } else if (integrand == "log-logweight") {
    f = [](const UnitPoint& p) { return p.log_x() * detail::log_weight_term(p); };
  } else if (integrand == "moments") {
    unit_weight = false;
    f = [k](const UnitPoint& p) { return std::pow(p.logit(), k); };
  } else {
    unit_weight = false;
    f = [](const UnitPoint&) { return 0.0; };
  }

  QuadTestReport report;
  report.integrand = integrand;
  report.alpha = alpha;
  if (integrand == "moments") {
    report.reference = (k % 2 == 1) ? 0.0 : std::tgamma(0.5 * (k + 1)) / std::pow(alpha, k + 1);
  } else if (integrand != "zero") {
    OracleOptions opt;
    opt.abs_tol = 1e-13;
    opt.max_depth = 15;
    report.reference = tanh_sinh_integral(
        [&](double, double d) {
          return d <= 0.0 ? f(UnitPoint{-d, 1.0 + d}) : f(UnitPoint{1.0 - d, d});
        },
        0.0, 1.0, opt);
  }

  for (int N : n_list) {
    const MhfRule rule = mhf_gauss_rule(MhfBasis(alpha, N));
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const UnitPoint& p = rule.points[j];
      const double w = unit_weight ? std::exp(rule.log_weights[j] - log_weight_chi(alpha, p)) : rule.weights[j];
      const double v = f(p);
      if (!std::isfinite(v))
        throw EvaluationError("quad-test: integrand non-finite at node " + std::to_string(j));
      sum += w * v;
    }
    report.rows.push_back({N, sum, std::abs(sum - report.reference)});
  }
  return report;
}

inline std::string to_csv(const QuadTestReport& r) {
  std::ostringstream os;
  os << "N,value,error\n";
  for (const auto& row : r.rows)
    os << row.N << ',' << detail::csv_double(row.value) << ',' << detail::csv_double(row.error) << '\n';
  return os.str();
}

// ---------------------------------------------------------------- solve

struct SolveSummary {
  std::string problem;
  SolverConfig config;
  int dimension = 1;
  double err_inf = std::numeric_limits<double>::quiet_NaN();
  double err_l2chi = std::numeric_limits<double>::quiet_NaN();
  double err_nodes = std::numeric_limits<double>::quiet_NaN();
  int newton_iters = 0;
  double residual = 0.0;
  double certified_residual = 0.0;
  double runtime_ms = 0.0;
};

struct SolveOutcome {
  Solution solution;
  SolveSummary summary;
};

/// Max error at the collocation points.
inline double node_error(const ProblemSpec& problem, const Solution& sol) {
  double e = 0.0;
  const std::size_t n = sol.nodes_x.size();
  for (Eigen::Index r = 0; r < sol.node_values.size(); ++r) {
    std::array<UnitPoint, 2> x{};
    if (sol.dimension == 1) {
      x[0] = sol.nodes_x[static_cast<std::size_t>(r)];
    } else {
      x = {sol.nodes_x[static_cast<std::size_t>(r) / n], sol.nodes_y[static_cast<std::size_t>(r) % n]};
    }
    e = std::max(e, std::abs(sol.node_values[r] - problem.exact(Coords(x.data(), static_cast<std::size_t>(sol.dimension)))));
  }
  return e;
}

/// Error norms of a solution against the problem's exact solution.
inline ErrorNorms solution_error(const ProblemSpec& problem, const Solution& sol) {
  const int N = sol.config.N;
  if (sol.dimension == 1) {
    return error_norms([&](const UnitPoint& p) { return sol(p); },
                       [&](const UnitPoint& p) { return problem.exact(Coords(&p, 1)); }, sol.config.alpha[0], N);
  }
  return error_norms_2d([&](const UnitPoint& x, const UnitPoint& y) { return sol(x, y); },
                        [&](const UnitPoint& x, const UnitPoint& y) {
                          const std::array<UnitPoint, 2> q{x, y};
                          return problem.exact(Coords(q));
                        },
                        sol.config.alpha[0], sol.config.alpha[1], N);
}

/// Solves and, when the exact solution is known, measures the error.
inline SolveOutcome run_solve(const ProblemSpec& problem, const SolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Solution sol = solve(problem, config);
  const auto t1 = std::chrono::steady_clock::now();
  SolveSummary s;
  s.problem = problem.name;
  s.config = config;
  s.dimension = problem.dimension;
  s.newton_iters = sol.newton_iters;
  s.residual = sol.final_residual;
  s.certified_residual = sol.certified_residual;
  s.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (problem.has_exact()) {
    const ErrorNorms e = solution_error(problem, sol);
    s.err_inf = e.err_inf;
    s.err_l2chi = e.err_l2chi;
    s.err_nodes = node_error(problem, sol);
  }
  return {std::move(sol), s};
}

inline std::string format_summary(const SolveSummary& s) {
  std::ostringstream os;
  os << "problem        " << s.problem << '\n'
     << "method         " << to_string(s.config.method) << '\n'
     << "N, NI          " << s.config.N << ", " << s.config.quadrature_degree() << '\n'
     << "alpha          " << s.config.alpha[0];
  if (s.dimension == 2) os << ", " << s.config.alpha[1];
  os << '\n'
     << "newton_iters   " << s.newton_iters << '\n'
     << "residual       " << detail::format_g(s.residual) << '\n'
     << "certified      " << detail::format_g(s.certified_residual) << '\n';
  if (!std::isnan(s.err_inf)) {
    os << "err_inf        " << detail::format_g(s.err_inf) << '\n'
       << "err_l2chi      " << detail::format_g(s.err_l2chi) << '\n'
       << "err_nodes      " << detail::format_g(s.err_nodes) << '\n';
  }
  os << "runtime_ms     " << detail::format_g(s.runtime_ms) << '\n';
  return os.str();
}

/// The solution on the evaluation grid: x,u in 1D, x,y,u in 2D.
inline std::string solution_csv(const Solution& sol) {
  std::ostringstream os;
  if (sol.dimension == 1) {
    os << "x,u\n";
    for (const UnitPoint& p : evaluation_grid(sol.config.alpha[0]))
      os << detail::csv_double(p.x) << ',' << detail::csv_double(sol(p)) << '\n';
  } else {
    os << "x,y,u\n";
    const auto gx = evaluation_grid_axis_2d(sol.config.alpha[0]);
    const auto gy = evaluation_grid_axis_2d(sol.config.alpha[1]);
    for (const auto& px : gx)
      for (const auto& py : gy)
        os << detail::csv_double(px.x) << ',' << detail::csv_double(py.x) << ',' << detail::csv_double(sol(px, py))
           << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------- converge

/// One row per N, sorted ascending. A failed solve leaves its error fields nan
/// and the sweep continues; `failures` collects the messages.
inline ConvergenceReport converge(const ProblemSpec& problem, const SolverConfig& base, std::vector<int> n_list,
                                  int ni_offset, std::vector<std::string>* failures = nullptr) {
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  ConvergenceReport report;
  report.problem = problem.name;
  report.method = to_string(base.method);
  report.alpha = base.alpha[0];
  for (int N : n_list) {
    SolverConfig c = base;
    c.N = N;
    c.NI = N + ni_offset;
    ConvergenceRow row;
    row.N = N;
    row.NI = c.NI;
    row.alpha = c.alpha[0];
    try {
      const SolveOutcome out = run_solve(problem, c);
      row.err_inf = out.summary.err_inf;
      row.err_l2chi = out.summary.err_l2chi;
      row.err_nodes = out.summary.err_nodes;
      row.newton_iters = out.summary.newton_iters;
      row.runtime_ms = out.summary.runtime_ms;
    } catch (const Error& e) {
      if (failures) failures->push_back("N=" + std::to_string(N) + ": " + e.what());
    }
    report.rows.push_back(row);
  }
  return report;
}

// -------------------------------------------------------------- compare

struct CompareRow {
  int N = 0;
  int NI = 0;
  double discrepancy = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

struct CompareReport {
  std::string problem;
  double alpha = 1.0;
  double tolerance = 0.0;
  std::vector<CompareRow> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const CompareRow& r) { return r.pass; });
  }
};

/// Max node-value difference between the two discretizations for each N.
/// Passes when every difference is at most 10 newton_tol.
inline CompareReport compare_methods(const ProblemSpec& problem, const SolverConfig& base, std::vector<int> n_list,
                                     int ni_offset, std::vector<std::string>* failures = nullptr) {
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  CompareReport report;
  report.problem = problem.name;
  report.alpha = base.alpha[0];
  report.tolerance = 10.0 * base.newton_tol;
  for (int N : n_list) {
    SolverConfig c = base;
    c.N = N;
    c.NI = N + ni_offset;
    CompareRow row;
    row.N = N;
    row.NI = c.NI;
    try {
      c.method = Method::MhfCollocation;
      const Solution a = solve(problem, c);
      c.method = Method::SmoothedHermite;
      const Solution b = solve(problem, c);
      row.discrepancy = (a.node_values - b.node_values).cwiseAbs().maxCoeff();
      row.pass = row.discrepancy <= report.tolerance;
    } catch (const Error& e) {
      if (failures) failures->push_back("N=" + std::to_string(N) + ": " + e.what());
    }
    report.rows.push_back(row);
  }
  return report;
}

inline std::string to_csv(const CompareReport& r) {
  std::ostringstream os;
  os << "N,NI,alpha,discrepancy,pass\n";
  for (const auto& row : r.rows)
    os << row.N << ',' << row.NI << ',' << detail::csv_double(r.alpha) << ',' << detail::csv_double(row.discrepancy)
       << ',' << (row.pass ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace mhfie

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mhfie/newton.hpp"
#include "mhfie/registry.hpp"
#include "mhfie/solver.hpp"
#include "test_util.hpp"

using namespace mhfie;

namespace {

SolverConfig config(int N, double alpha, Method m = Method::MhfCollocation) {
  SolverConfig c;
  c.N = N;
  c.alpha = {alpha, alpha};
  c.method = m;
  return c;
}

// Sum of the Nystrom weights of one row for a constant kernel, i.e. the
// discrete value of int_0^1 ds.
double unit_row_sum(const SolverConfig& c) {
  ProblemSpec p;
  p.kernel = KernelSpec::regular([](Coords, Coords) { return 1.0; });
  p.forcing = [](Coords) { return 0.0; };
  return assemble_nystrom(p, c).W.row(0).sum();
}

ProblemSpec smooth_linear_1d(double scale) {
  ProblemSpec p;
  p.name = "smooth-1d";
  p.lambda = 2.0;
  p.kernel = KernelSpec::regular([scale](Coords s, Coords x) {
    const double d = s[0].x - x[0].x;
    return scale * std::exp(-d * d);
  });
  p.forcing = [](Coords x) { return std::cos(x[0].x); };
  return p;
}

}  // namespace

TEST(Assembly, LogKernelRowSumsApproachClosedForm) {
  ProblemSpec p;
  p.kernel = KernelSpec::logarithmic();
  p.forcing = [](Coords) { return 0.0; };
  EXPECT_NEAR(exact_smooth_integral(p.kernel, 0.5), -1.6931471806, 1e-10);
  auto max_row_error = [&](int NI) {
    SolverConfig c = config(9, 1.0);
    c.NI = NI;
    const DiscreteSystem sys(p, c);
    const Eigen::VectorXd rows = sys.weights().rowwise().sum();
    double e = 0.0;
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
      EXPECT_TRUE(std::isfinite(rows[i]));
      e = std::max(e, std::abs(rows[i] - exact_smooth_integral(p.kernel, sys.axis(0).colloc[static_cast<std::size_t>(i)].x)));
    }
    return e;
  };
  // Gauss rules see the log singularity only through point values, so the
  // decay is slow and not monotone.
  const double coarse = max_row_error(16);
  const double fine = max_row_error(400);
  EXPECT_LT(fine, coarse / 4);
  EXPECT_LT(max_row_error(128), 0.1);
}

TEST(Assembly, ZeroFactorGivesZeroMatrix) {
  ProblemSpec p;
  p.kernel = KernelSpec::algebraic(0.5);
  p.kernel.smooth_factor = [](Coords, Coords) { return 0.0; };
  p.forcing = [](Coords) { return 1.0; };
  EXPECT_EQ(assemble_nystrom(p, config(8, 1.0)).W.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, TwoDimensionalIsKroneckerOfAxes) {
  SolverConfig c = config(5, 0.7);
  c.alpha = {0.7, 1.2};
  ProblemSpec p2;
  p2.dimension = 2;
  p2.kernel = KernelSpec::algebraic(0.5, 0.3);
  p2.forcing = [](Coords) { return 0.0; };
  const auto W = assemble_nystrom(p2, c).W;

  ProblemSpec px;
  px.kernel = KernelSpec::algebraic(0.5);
  px.forcing = [](Coords) { return 0.0; };
  ProblemSpec py = px;
  py.kernel = KernelSpec::algebraic(0.3);
  SolverConfig cx = c, cy = c;
  cx.alpha = {0.7, 0.7};
  cy.alpha = {1.2, 1.2};
  const auto Wx = assemble_nystrom(px, cx).W;
  const auto Wy = assemble_nystrom(py, cy).W;

  // action on a rank-1 value array equals the product of the 1D actions
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(Wx.cols(), 0.2, 1.4);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(Wy.cols(), -1.0, 0.5).array().square();
  Eigen::VectorXd ab(a.size() * b.size());
  for (Eigen::Index k = 0; k < a.size(); ++k)
    for (Eigen::Index l = 0; l < b.size(); ++l) ab[k * b.size() + l] = a[k] * b[l];
  const Eigen::VectorXd lhs = W * ab;
  const Eigen::VectorXd wa = Wx * a, wb = Wy * b;
  for (Eigen::Index i = 0; i < wa.size(); ++i)
    for (Eigen::Index j = 0; j < wb.size(); ++j)
      EXPECT_NEAR(lhs[i * wb.size() + j], wa[i] * wb[j], 1e-12 * std::max(1.0, std::abs(wa[i] * wb[j])));
}

TEST(Assembly, NodeCoincidenceIsRejected) {
  SolverConfig c = config(8, 1.0);
  c.NI = 8;  // both rules contain z = 0
  EXPECT_THROW(solve(*make_problem("ex1-log"), c), AssemblyError);
  c.NI = 10;
  EXPECT_THROW(solve(*make_problem("ex1-alg"), c), AssemblyError);
  c.NI = 9;
  EXPECT_NO_THROW(assemble_nystrom(*make_problem("ex1-alg"), c));
}

TEST(Assembly, ConfigLimits) {
  EXPECT_THROW(assemble_nystrom(*make_problem("ex1-alg"), config(401, 1.0)), ContractError);
  EXPECT_THROW(assemble_nystrom(*make_problem("ex3-alg"), config(49, 1.0)), ContractError);
  EXPECT_THROW(assemble_nystrom(*make_problem("ex1-alg"), config(8, 0.0)), ContractError);
}

TEST(SolveLinear, DecoupledWhenKernelVanishes) {
  ProblemSpec p;
  p.lambda = 4.0;
  p.kernel = KernelSpec::logarithmic();
  p.kernel.smooth_factor = [](Coords, Coords) { return 0.0; };
  p.forcing = [](Coords x) { return std::exp(x[0].x); };
  const auto sol = solve_linear(p, config(10, 0.8));
  EXPECT_EQ(sol.newton_iters, 0);
  for (std::size_t i = 0; i < sol.nodes_x.size(); ++i)
    EXPECT_NEAR(sol.node_values[static_cast<Eigen::Index>(i)], std::exp(sol.nodes_x[i].x) / 4.0, 1e-15);
}

TEST(SolveLinear, ZeroForcingGivesZero) {
  ProblemSpec p = *make_problem("ex1-alg");
  p.exact_solution = nullptr;
  p.forcing = [](Coords) { return 0.0; };
  const auto sol = solve_linear(p, config(12, 0.3));
  EXPECT_EQ(sol.node_values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SolveLinear, RejectsNonlinearProblem) {
  EXPECT_THROW(solve_linear(*make_problem("ex3-alg"), config(4, 0.3)), ContractError);
}

TEST(SolveNonlinear, LinearConsistency) {
  for (const char* name : {"ex1-alg", "ex1-log", "ex2-sqrt"}) {
    const auto p = *make_problem(name);
    const auto c = config(12, 0.3);
    const auto a = solve_linear(p, c);
    const auto b = solve_nonlinear(p, c);
    EXPECT_LE(b.newton_iters, 1);
    EXPECT_LE((a.node_values - b.node_values).cwiseAbs().maxCoeff(), 1e-12) << name;
  }
}

TEST(SolveNonlinear, QuadraticToyFixedPoint) {
  const auto c = config(6, 0.5);
  const double q = unit_row_sum(c);
  ProblemSpec p;
  p.name = "toy";
  p.lambda = 1.0;
  p.kernel = KernelSpec::regular([q](Coords, Coords) { return 0.1 / q; });
  p.nonlinearity = Nonlinearity::square();
  p.forcing = [](Coords) { return 1.0; };
  const auto sol = solve_nonlinear(p, c);
  const double root = (1 - std::sqrt(0.6)) / 0.2;
  EXPECT_NEAR(root, 1.1270166538, 1e-10);
  for (Eigen::Index i = 0; i < sol.node_values.size(); ++i) EXPECT_NEAR(sol.node_values[i], root, 1e-12);
}

TEST(SolveNonlinear, SymmetricProblemGivesSymmetricNodes) {
  for (const char* name : {"ex1-log", "ex1-alg"}) {
    const auto sol = solve(*make_problem(name), config(16, 0.15));
    const auto n = sol.node_values.size();
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(sol.node_values[i], sol.node_values[n - 1 - i], 1e-10);
  }
}

TEST(SolveNonlinear, ErrorDecreasesWithDegree) {
  const auto p = *make_problem("ex1-alg");
  const auto s4 = solve(p, config(4, 0.15));
  const auto s32 = solve(p, config(32, 0.08));
  auto err = [&](const Solution& s) {
    double e = 0.0;
    for (double x : {0.01, 0.1, 0.3, 0.5, 0.8}) e = std::max(e, std::abs(s(UnitPoint::from_value(x)) - std::sqrt(x * (1 - x))));
    return e;
  };
  EXPECT_LT(err(s32), err(s4));
}

TEST(Solve2D, SeparableProblemMatchesOneDimensional) {
  const auto c = config(8, 0.6);
  const double q = unit_row_sum(c);
  ProblemSpec p2;
  p2.name = "smooth-2d";
  p2.dimension = 2;
  p2.lambda = 2.0;
  p2.kernel = KernelSpec::regular([](Coords s, Coords x) {
    const double d = s[0].x - x[0].x;
    return std::exp(-d * d);
  });
  p2.forcing = [](Coords x) { return std::cos(x[0].x); };
  const auto s2 = solve_2d(p2, c);
  const auto s1 = solve_linear(smooth_linear_1d(q), c);
  const Eigen::MatrixXd U = s2.node_matrix();
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    for (Eigen::Index j = 0; j < U.cols(); ++j) EXPECT_NEAR(U(i, j), s1.node_values[i], 1e-10);
}

TEST(Solve2D, ExampleThreeSymmetry) {
  for (const char* name : {"ex3-alg", "ex3-log"}) {
    const auto sol = solve(*make_problem(name), config(8, 0.08));
    const Eigen::MatrixXd U = sol.node_matrix();
    EXPECT_LE((U - U.transpose()).cwiseAbs().maxCoeff(), 1e-10) << name;
    EXPECT_LE(sol.newton_iters, 12);
    EXPECT_NEAR(sol(UnitPoint::from_value(0.3), UnitPoint::from_value(0.7)),
                sol(UnitPoint::from_value(0.7), UnitPoint::from_value(0.3)), 1e-10);
  }
}

TEST(Solve2D, ZeroForcingWithQuadraticNonlinearity) {
  ProblemSpec p = *make_problem("ex3-alg");
  p.exact_solution = nullptr;
  p.separable_integrand.clear();
  p.forcing = [](Coords) { return 0.0; };
  const auto sol = solve_2d(p, config(6, 0.3));
  EXPECT_EQ(sol.node_values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Smoothed, CentreNodeForcing) {
  const auto p = *make_problem("ex1-log");
  const DiscreteSystem sys(p, config(8, 0.7, Method::SmoothedHermite));
  const std::array<UnitPoint, 1> half{UnitPoint::from_value(0.5)};
  EXPECT_EQ(sys.forcing()[4], p.forcing_at(Coords(half)));
  EXPECT_THROW(solve_smoothed(p, config(8, 0.7)), ContractError);
}

TEST(Smoothed, EquivalentToMhfCollocation) {
  for (const auto& name : problem_names()) {
    const auto p = *make_problem(name);
    for (double a : {0.08, 0.3}) {
      const auto u = solve(p, config(8, a));
      const auto z = solve(p, config(8, a, Method::SmoothedHermite));
      EXPECT_LE((u.node_values - z.node_values).cwiseAbs().maxCoeff(), 1e-11) << name << " alpha=" << a;
      EXPECT_EQ(u.nodes_x.size(), z.nodes_x.size());
    }
  }
}

TEST(Smoothed, ScalingLambdaAndForcingLeavesSolution) {
  const auto c = config(8, 0.3);
  ProblemSpec p = smooth_linear_1d(1.0);
  ProblemSpec q = p;
  q.lambda *= 2;
  q.kernel = KernelSpec::regular([](Coords s, Coords x) {
    const double d = s[0].x - x[0].x;
    return 2 * std::exp(-d * d);
  });
  q.forcing = [](Coords x) { return 2 * std::cos(x[0].x); };
  for (Method m : {Method::MhfCollocation, Method::SmoothedHermite}) {
    SolverConfig cm = c;
    cm.method = m;
    EXPECT_LE((solve(p, cm).node_values - solve(q, cm).node_values).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Certificate, IndependentCheckDetectsPerturbation) {
  const auto p = *make_problem("ex1-alg");
  auto sol = solve(p, config(10, 0.3));
  EXPECT_LE(sol.final_residual, 1e-12);
  EXPECT_LE(sol.certified_residual, 1e-12);
  EXPECT_LE(residual_certificate(p, sol), 1e-12);

  auto bad = sol;
  bad.node_values[3] += 1e-6;
  std::vector<double> v(bad.node_values.data(), bad.node_values.data() + bad.node_values.size());
  bad.interpolant = Interpolant1D(std::get<Interpolant1D>(sol.interpolant).basis(), v);
  EXPECT_GT(residual_certificate(p, bad), 1e-7);
}

TEST(Newton, LinearResidualOneStep) {
  Eigen::Matrix2d A;
  A << 3, 1, -1, 2;
  const Eigen::Vector2d b(1, 4);
  const auto r = newton_driver([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - b; },
                               [&](const Eigen::VectorXd&) -> Eigen::MatrixXd { return A; }, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LE((A * r.x - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Newton, ScalarQuadratic) {
  const auto r = newton_driver(
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, 0.1 * x[0] * x[0] - x[0] + 1); },
      [](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(1, 1, 0.2 * x[0] - 1); },
      Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(r.x[0], 1.1270166538, 1e-10);
  EXPECT_LE(r.iterations, 6);
}

TEST(Newton, NoRealRoot) {
  try {
    newton_driver([](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, x[0] * x[0] + 1); },
                  [](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(1, 1, 2 * x[0]); },
                  Eigen::VectorXd::Constant(1, 0.7));
    FAIL() << "expected nonconvergence";
  } catch (const NonconvergenceError& e) {
    const auto& h = e.residual_history();
    ASSERT_FALSE(h.empty());
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LT(h[i], h[i - 1]);
    EXPECT_EQ(e.best_iterate().size(), 1u);
  } catch (const SingularSystemError&) {
    SUCCEED();  // reached x = 0 exactly
  }
}

TEST(Newton, SingularJacobian) {
  EXPECT_THROW(newton_driver([](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array() + 1.0; },
                             [](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(2, 2); },
                             Eigen::VectorXd::Zero(2)),
               SingularSystemError);
}

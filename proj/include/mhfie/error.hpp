#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mhfie {

namespace detail {
/// Short %g rendering of a double for error messages.
inline std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace detail

/// Base class of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function, e.g. x not in (0,1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Result not representable in double precision.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A rule, basis or interpolant could not be built.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition (dimension mismatch, wrong alpha, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied function returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Nystrom assembly failed (node coincidence, singular kernel entry).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Reference quadrature did not reach its tolerance.
class OracleError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Linear system (or Newton Jacobian) numerically singular.
class SingularSystemError : public SolverError {
 public:
  SingularSystemError(const std::string& what, double rcond, int iteration = -1)
      : SolverError(what), rcond_(rcond), iteration_(iteration) {}

  double rcond() const noexcept { return rcond_; }
  /// Newton iteration at which the Jacobian was singular, -1 for a linear solve.
  int iteration() const noexcept { return iteration_; }

 private:
  double rcond_;
  int iteration_;
};

/// Newton iteration gave up. Carries the best iterate seen and the residual history.
class NonconvergenceError : public SolverError {
 public:
  NonconvergenceError(const std::string& what, std::vector<double> best_iterate,
                      std::vector<double> residual_history)
      : SolverError(what),
        best_iterate_(std::move(best_iterate)),
        history_(std::move(residual_history)) {}

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> best_iterate_;
  std::vector<double> history_;
};

}  // namespace mhfie

#pragma once

#include <stdexcept>
#include <string>

namespace vpl {

/// Linear solver failed to meet its residual contract.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

/// Iteration budget exhausted before the convergence tolerance was met.
/// Subclasses carry the partial result.
struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleConstraint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasiblePerturbation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Time stepper detected a runaway field (max |omega| > 2 lambda).
struct BlowUpError : std::runtime_error {
  BlowUpError(const std::string& what, double t) : std::runtime_error(what), t(t) {}
  double t;
};

}  // namespace vpl

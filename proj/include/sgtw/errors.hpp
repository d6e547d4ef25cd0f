#ifndef SGTW_ERRORS_HPP
#define SGTW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sgtw {

// Numerical failures of a solver (as opposed to bad inputs, which are
// reported with std::invalid_argument).
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Step size underflow in the adaptive integrator.
class StiffnessError : public SolverError {
public:
  using SolverError::SolverError;
};

// Non-finite values appeared in a PDE run.
class BlowUpError : public SolverError {
public:
  BlowUpError(const std::string& msg, double time)
      : SolverError(msg), t(time) {}
  double t;
};

}  // namespace sgtw

#endif

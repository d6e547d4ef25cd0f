#ifndef SGTW_INTEGRATE_HPP
#define SGTW_INTEGRATE_HPP

/*
 Adaptive integration of the reduced particle equation

    g'' + mu*g' + sin(g) - gamma = 0

 with an embedded Dormand-Prince 5(4) pair.  Dense output is a two-point
 Taylor interpolant of degree 9 per accepted step: the right-hand side is
 fixed, so d^k g/dxi^k is available in closed form at both step ends and
 the interpolant costs no extra function evaluations.  Its ODE residual is
 orders of magnitude below the step error, which keeps event refinement
 and the energy audit independent of step-control details.

 Events (level crossings of g, turning points gp = 0) are located by
 bisection on the dense interpolant, not by step rejection.
*/

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "sgtw/errors.hpp"
#include "sgtw/model.hpp"

namespace sgtw {

struct OdeProblem {
  Params params;
  double mu = 0.0;  // reduced viscosity, >= 0
  State initial;
  double xi0 = 0.0;
};

struct Tolerances {
  double rel = 1e-10;
  double abs = 1e-12;
  double event = 1e-12;  // residual bound for refined event states
};

enum class EventKind { GCrossing, TurningPoint, Horizon };

struct Event {
  EventKind kind = EventKind::Horizon;
  double xi = 0.0;
  State state;
};

// Stop conditions for integrate(); the horizon xi_end is always active and
// may lie on either side of xi0 (backward integration).
struct StopSpec {
  double xi_end = 0.0;
  std::optional<double> g_level;  // stop when g crosses this level
  bool stop_on_turning = false;   // stop when gp crosses zero from above
};

// One accepted step.  Interpolates g with a degree-9 polynomial matching
// value and four derivatives at both ends (in the scaled variable
// s = (xi - xi0)/h, nodes {0 x5, 1 x5}, Newton form).
class DenseStep {
 public:
  DenseStep() = default;
  DenseStep(double xi0, double h, const State& y0, const State& y1, double mu,
            double gamma);

  double xi0() const { return xi0_; }
  double h() const { return h_; }
  double s_max() const { return s_max_; }
  double xi1() const { return xi0_ + h_ * s_max_; }
  void truncate(double s) { s_max_ = s; }

  // g and its first two xi-derivatives at s in [0, s_max]
  void eval(double s, double& g, double& gp) const;
  void eval2(double s, double& g, double& gp, double& gpp) const;

 private:
  double xi0_ = 0.0, h_ = 1.0, s_max_ = 1.0;
  std::array<double, 10> c_{};  // Newton coefficients
};

class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(const OdeProblem& prob);

  double xi_front() const { return xi_front_; }            // start
  double xi_back() const;                                  // end
  bool forward() const {
    return steps_.empty() ? true : steps_.front().h() > 0.0;
  }
  bool empty() const { return steps_.empty(); }
  const std::vector<DenseStep>& steps() const { return steps_; }

  State initial() const { return initial_; }
  State final_state() const;

  // Dense evaluation anywhere between xi_front and xi_back.
  State eval(double xi) const;
  std::array<double, 3> eval2(double xi) const;  // g, gp, gpp

  // Step-boundary samples, (xi, state), including the initial point.
  std::vector<std::pair<double, State>> samples() const;

  void push(DenseStep step) { steps_.push_back(step); }

 private:
  const DenseStep& locate(double xi) const;
  std::vector<DenseStep> steps_;
  State initial_;
  double xi_front_ = 0.0;
};

struct IntegrateResult {
  Trajectory trajectory;
  Event event;
  long n_steps = 0;
  long n_rejected = 0;
};

// Integrates until the first triggered stop condition.  The horizon event
// is a normal outcome, not an error.  Throws StiffnessError on step-size
// underflow.
IntegrateResult integrate(const OdeProblem& prob, const StopSpec& stop,
                          const Tolerances& tol = {});

// Max over all sample pairs of the residual of the dissipation relation
//   e(xi_b) - e(xi_a) + mu * int_a^b gp^2 dxi  =  0,
// with the integral taken by Gauss-Legendre quadrature on the dense
// output (exact for the interpolant).
double energy_audit(const Trajectory& tr, const Params& p, double mu);

}  // namespace sgtw

#endif

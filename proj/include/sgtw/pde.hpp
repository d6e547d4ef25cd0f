#ifndef SGTW_PDE_HPP
#define SGTW_PDE_HPP

/*
 Direct finite-difference simulation of

    phi_tt - phi_xx + sin(phi) + alpha*phi_t + gamma = 0

 on a line segment (Dirichlet ends pinned to the profile's asymptotic
 constants) or a circle (periodic up to a fixed 2*pi winding jump).

 Scheme: explicit three-level leapfrog, second order in dt and dx, with
 the damping term averaged over the two outer levels so it stays linear
 in phi^{n+1}:

    (phi+ - 2 phi0 + phi-)/dt^2 = D2 phi0 - sin phi0 - gamma
                                  - alpha (phi+ - phi-)/(2 dt).

 CFL: dt <= 0.9 dx.  The first step is bootstrapped with a Taylor
 expansion using the equation itself.
*/

#include <limits>
#include <optional>
#include <vector>

#include "sgtw/errors.hpp"
#include "sgtw/profile.hpp"

namespace sgtw {

enum class DomainKind { Line, Circle };

struct DomainSpec {
  DomainKind kind = DomainKind::Line;
  double x0 = -40.0;  // left end (Line) or seam position (Circle)
  double x1 = 40.0;   // x1 - x0 is the circumference on a Circle
  double dx = 0.05;
};

struct Field {
  std::vector<double> phi;       // values at time t
  std::vector<double> phi_prev;  // values at time t - dt (empty before
                                 // the first step)
  std::vector<double> phi_t_init;  // initial phi_t, used to bootstrap
  DomainSpec dom;
  double t = 0.0;
  double dt_prev = 0.0;  // spacing between phi and phi_prev
  double pin_left = 0.0, pin_right = 0.0;  // Line asymptotic constants
  int winding = 0;  // 2*pi jumps across the Circle seam

  size_t n() const { return phi.size(); }
  double x(size_t i) const { return dom.x0 + dom.dx * double(i); }
};

// phi(x,0) = g(xi(x)) + pi and phi_t = -v phi_x via the travelling-wave
// substitution; the profile is interpolated by its cubic Hermite dense
// output and extended by its asymptotic constants.
//
// - Line domains require the domain to cover the profile support with
//   padding; arrays are rejected (they need a Circle).
// - Circle domains require the circumference to be m*Xi*sqrt(1-v^2)
//   within one grid cell; the kink/pair kinds are rejected there.
// - v_choice supplies the velocity for free-parameter profiles and must
//   be empty otherwise.
Field init_from_profile(const WaveProfile& prof, const DomainSpec& dom,
                        double x_center = 0.0,
                        std::optional<double> v_choice = std::nullopt);

// One leapfrog update; throws BlowUpError when non-finite values appear.
void step(Field& f, double dt, const Params& p);

// Second-order reconstruction of phi_t at the current level.
std::vector<double> time_derivative(const Field& f, const Params& p);

struct EnergyReport {
  double H = 0.0;
  std::vector<double> h;  // density per node
  std::vector<double> j;  // current density per node
};

EnergyReport energy_report(const Field& f, const Params& p);

struct DiagRecord {
  double t = 0.0;
  double H = 0.0;
  double dissipation_power = 0.0;  // alpha * int phi_t^2 dx
  double forcing_power = 0.0;      // -gamma * int phi_t dx
  double x_front = std::numeric_limits<double>::quiet_NaN();
  double winding = 0.0;            // (phi_R - phi_L) / 2pi
  double max_step_residual = 0.0;  // discrete energy balance since last record
};

struct RunOptions {
  double t_end = 200.0;
  double dt = 0.04;
  double record_dt = 1.0;
  double boundary_guard = 10.0;  // min front distance to a Line boundary
  bool track_front = true;
};

struct RunResult {
  std::vector<DiagRecord> records;
  Field field;  // final state
  long n_steps = 0;
  double max_step_residual = 0.0;  // over the whole run
  bool blew_up = false;            // records end at the failure time
  double blowup_t = 0.0;
};

// Steps to t_end recording diagnostics at the requested cadence.  The
// front is the crossing of phi = pi - asin(gamma); a Line run aborts if
// it enters the boundary guard margin.  Blow-up propagates as
// BlowUpError after the records collected so far are printed into the
// exception message.
RunResult run(Field f, const Params& p, const RunOptions& opt);

struct VelocityFit {
  double v = 0.0;
  double residual = 0.0;  // max |x_c - fit| over the used window
  size_t n_used = 0;
};

// Least-squares line through (t, x_front) after discarding the leading
// transient fraction.  Requires >= 10 usable samples.
VelocityFit measure_velocity(const std::vector<double>& t,
                             const std::vector<double>& x_front,
                             double discard_fraction = 0.2);

// Front position on the current field; NaN when the level is not crossed.
double front_position(const Field& f, const Params& p);

}  // namespace sgtw

#endif

#ifndef SGTW_SHOOTING_HPP
#define SGTW_SHOOTING_HPP

/*
 Heteroclinic and periodic shooting on the reduced equation.

 Trajectories launched from the unstable manifold of the saddle g_-1^M
 are classified as Overshoot (reach g_0^M with speed), Capture (turn
 around below it) or Connection (end inside a small ball around the
 saddle).  The fate is a discrete function of mu, so the kink viscosity
 mu_hat(gamma) is found by bisection on the Overshoot/Capture bracket.
 Soliton arrays shoot from (g_-1^M, gp0) instead and bisect on the smooth
 residual gp(at g_0^M) - gp0.
*/

#include <string>
#include <vector>

#include "sgtw/integrate.hpp"
#include "sgtw/profile.hpp"

namespace sgtw {

enum class Fate { Overshoot, Capture, Connection, Ambiguous };

std::string to_string(Fate f);

struct FateReport {
  Fate fate = Fate::Ambiguous;
  double crossing_xi = 0.0;     // xi of the deciding event
  double crossing_speed = 0.0;  // gp at g = g_0^M (Overshoot) or 0 (Capture)
  Trajectory trajectory;
};

struct ShootOptions {
  double delta = 1e-8;           // saddle launch offset
  double horizon = 1e4;          // xi budget before declaring Ambiguous
  double connection_ball = 1e-9; // ball radius around (g_0^M, 0)
  Tolerances ode{1e-11, 1e-13, 1e-12};
};

// Positive root of l^2 + mu*l - sqrt(1 - gamma^2) = 0, the unstable
// eigenvalue of the saddle.
double unstable_eigenvalue(const Params& p, double mu);

// (g_-1^M + delta, lambda_+ * delta): on the linearized unstable manifold.
State launch_from_saddle(const Params& p, double mu, double delta);

FateReport classify_fate(const Params& p, double mu, const State& launch,
                         const ShootOptions& opt = {});

struct KinkResult {
  double mu_hat = 0.0;
  long iterations = 0;
  WaveProfile profile;
};

// Bisection for the saddle-to-saddle connection viscosity mu_hat(gamma).
// The returned profile is normalized so that g(0) = -asin(gamma).
// Requires 0 < gamma < 1: at gamma = 0 every mu > 0 captures and the
// unperturbed kink exists only at mu = 0 with free velocity.
KinkResult find_kink_mu(const Params& p, double tol = 1e-13,
                        const ShootOptions& opt = {});

struct ArrayResult {
  double mu_check = 0.0;  // mu for the rotational periodic orbit
  double Xi = 0.0;        // period: g(xi + Xi) = g(xi) + 2 pi
  long iterations = 0;
  WaveProfile profile;    // one period, g(0) = g_-1^M
};

// Periodic shooting from (g_-1^M, gp0); residual gp(at g_0^M) - gp0 is
// driven below tol by bisection in mu (Capture counts as -inf).
ArrayResult find_array_mu(const Params& p, double gp0, double tol = 1e-10,
                          const ShootOptions& opt = {});

// Inverts the strictly monotone Xi(gp0) by bracketed bisection on
// gp0 in [1e-6, 1e3].
double period_to_speed(const Params& p, double Xi_target, double tol = 1e-8,
                       const ShootOptions& opt = {});

struct HalfArrayResult {
  WaveProfile profile;  // saddle -> rotational orbit, tagged HalfArray
  double mu_check = 0.0;
  double Xi = 0.0;
  // (xi, phase-space distance of the trajectory to the array orbit),
  // distance taken in (g mod 2pi, gp)
  std::vector<std::pair<double, double>> distance;
};

// Launches from the saddle at mu_check(gamma, gp0) and follows the orbit
// to the horizon.  Throws SolverError if the trajectory is captured
// instead of approaching the array orbit.
HalfArrayResult half_array_profile(const Params& p, double gp0,
                                   double horizon,
                                   const ShootOptions& opt = {});

struct SweepRow {
  double gamma = 0.0;
  double mu_hat = 0.0;
  double ratio = 0.0;  // mu_hat / gamma
  double v_hat = 0.0;  // velocity at the sweep's alpha
  long iterations = 0;
  bool ok = false;
  std::string error;
};

// mu_hat across a gamma list; per-row failures are recorded and the sweep
// continues.  Rows are ordered by gamma ascending.
std::vector<SweepRow> sweep_mu_hat(std::vector<double> gammas, double alpha,
                                   double tol = 1e-13,
                                   const ShootOptions& opt = {});

}  // namespace sgtw

#endif

#ifndef SGTW_UNPERTURBED_HPP
#define SGTW_UNPERTURBED_HPP

/*
 Closed-form and quadrature solutions of the undamped reductions, used as
 oracles for the shooting solvers:

   - the gamma = 0 pendulum: kink closed form, libration and rotation
     periods (adaptive quadrature with a square-root substitution at
     turning points; complete elliptic integral K by AGM as the second,
     independent route);
   - the mu = 0, gamma > 0 homoclinic orbit ("bounded pair"), by
     quadrature of xi(g) from the inner turning point.
*/

#include <optional>

#include "sgtw/profile.hpp"

namespace sgtw {

enum class PendulumRegime { Libration, Separatrix, Rotation };

struct PendulumOrbit {
  double e;
  PendulumRegime regime;
  std::optional<double> period;  // Xi_p or Xi_0; empty on the separatrix
};

PendulumOrbit classify_orbit(double e);

// 4 atan(exp(sign*xi)) - pi
double kink_closed_form(double xi, int sign = +1);

// Complete elliptic integral of the first kind, modulus k in [0, 1),
// by arithmetic-geometric mean iteration.
double elliptic_k(double k);

// Libration period for -1 < e < 1; equals 4 K(sqrt((1+e)/2)).
double libration_period(double e);

// Rotation period Xi_0 = int_0^{2pi} dg / sqrt(2(e + cos g)) for e > 1.
double rotation_period(double e);

// Homoclinic orbit at e = U(g_0^M) for 0 < gamma < 1 (mu = 0): leaves the
// saddle, turns at g_t < g_0^m and returns.  Turning point at xi = 0,
// symmetric under xi -> -xi.
WaveProfile bounded_pair_profile(double gamma, int samples,
                                 double alpha = 0.0);

// Inner turning point of the bounded pair: the root of U(g) = U(g_0^M)
// left of g_0^m.
double bounded_pair_turning_point(double gamma);

// The gamma = 0 closed-form kink sampled on [-half_span, half_span].
WaveProfile unperturbed_kink_profile(double half_span, int samples,
                                     int sign = +1);

}  // namespace sgtw

#endif

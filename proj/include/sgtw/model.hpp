#ifndef SGTW_MODEL_HPP
#define SGTW_MODEL_HPP

/*
 Reduced model for travelling waves of

    phi_tt - phi_xx + sin(phi) + alpha*phi_t + gamma = 0.

 The fixed-profile substitution phi(x,t) = g(xi) + pi with
 xi = sign(v)*(x - v*t)/sqrt(1 - v^2) (subluminal branch) turns the PDE
 into the motion of a unit-mass particle in the tilted washboard
 potential U(g) = -(cos g + gamma*g) with a viscous force of coefficient
 mu = alpha/sqrt(|v^-2 - 1|).  Everything in this header is an algebraic
 function of (gamma, alpha, mu, v); the dynamics live in integrate.hpp.
*/

#include <cmath>

namespace sgtw {

struct Params {
  double gamma = 0.0;  // constant forcing, 0 <= gamma < 1
  double alpha = 0.0;  // dissipation coefficient, >= 0
};

// Throws std::invalid_argument unless 0 <= gamma < 1 and alpha >= 0.
void validate(const Params& p);

struct State {
  double g = 0.0;   // angle, unbounded real (winding kept explicit)
  double gp = 0.0;  // dg/dxi
};

struct Equilibrium {
  int k;
  double g_min;  // asin(gamma) + 2k pi
  double g_max;  // pi - asin(gamma) + 2k pi
  double u_min;
  double u_max;
};

struct VelocityMap {
  double mu;     // reduced viscosity
  double v;      // wave speed
  int sign;      // propagation direction, +1 or -1
  bool luminal;  // alpha = 0 with mu > 0: |v| = 1, degenerate boundary
};

struct EnergyDensity {
  double h;  // energy density (normalized to 0 at the stable constant)
  double j;  // energy current density phi_x * phi_t
};

double potential(double g, double gamma);        // U(g) = -(cos g + gamma*g)
double potential_deriv(double g, double gamma);  // U_g  = sin g - gamma

// K = sqrt(1 - gamma^2) + gamma*asin(gamma); makes h vanish at
// phi = -asin(gamma).
double energy_constant(double gamma);

Equilibrium equilibria(const Params& p, int k);

// e = gp^2/2 + U(g)
double mechanical_energy(const State& s, double gamma);

// v = sign * mu / sqrt(alpha^2 + mu^2).  Throws std::invalid_argument when
// alpha = mu = 0 (velocity is a free parameter there).
VelocityMap velocity_from_mu(double alpha, double mu, int sign = +1);

// mu = alpha*|v|/sqrt(1 - v^2), subluminal branch.  v = 0 gives 0; |v| >= 1
// is rejected (the luminal case has no second-order reduction).
double mu_from_velocity(double alpha, double v);

// Power-balance velocity [1 + (4 alpha / pi gamma)^2]^(-1/2), positive
// branch.  Requires gamma > 0.
double asymptotic_velocity(const Params& p);

EnergyDensity energy_density(double phi, double phi_x, double phi_t,
                             double gamma);

}  // namespace sgtw

#endif

#include "sgtw/model.hpp"

#include <stdexcept>
#include <string>

namespace sgtw {

void validate(const Params& p) {
  if (!(p.gamma >= 0.0 && p.gamma < 1.0))
    throw std::invalid_argument("gamma must lie in [0, 1), got " +
                                std::to_string(p.gamma));
  if (!(p.alpha >= 0.0))
    throw std::invalid_argument("alpha must be >= 0, got " +
                                std::to_string(p.alpha));
}

double potential(double g, double gamma) { return -(std::cos(g) + gamma * g); }

double potential_deriv(double g, double gamma) { return std::sin(g) - gamma; }

double energy_constant(double gamma) {
  return std::sqrt(1.0 - gamma * gamma) + gamma * std::asin(gamma);
}

Equilibrium equilibria(const Params& p, int k) {
  validate(p);
  const double as = std::asin(p.gamma);
  const double two_pi_k = 2.0 * M_PI * k;
  Equilibrium eq;
  eq.k = k;
  eq.g_min = as + two_pi_k;
  eq.g_max = M_PI - as + two_pi_k;
  eq.u_min = potential(eq.g_min, p.gamma);
  eq.u_max = potential(eq.g_max, p.gamma);
  return eq;
}

double mechanical_energy(const State& s, double gamma) {
  return 0.5 * s.gp * s.gp + potential(s.g, gamma);
}

VelocityMap velocity_from_mu(double alpha, double mu, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("sign must be +1 or -1");
  if (!(alpha >= 0.0) || !(mu >= 0.0))
    throw std::invalid_argument("velocity_from_mu requires alpha, mu >= 0");
  if (alpha == 0.0 && mu == 0.0)
    throw std::invalid_argument(
        "velocity undefined for alpha = mu = 0 (free parameter in the "
        "unperturbed case)");
  VelocityMap m;
  m.mu = mu;
  m.sign = sign;
  m.luminal = (alpha == 0.0);  // mu > 0 here, so v sits on the |v|=1 boundary
  m.v = sign * mu / std::sqrt(alpha * alpha + mu * mu);
  return m;
}

double mu_from_velocity(double alpha, double v) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (std::fabs(v) >= 1.0)
    throw std::invalid_argument(
        "|v| >= 1 is degenerate: no second-order travelling-wave reduction");
  if (v == 0.0) return 0.0;
  return alpha * std::fabs(v) / std::sqrt(1.0 - v * v);
}

double asymptotic_velocity(const Params& p) {
  validate(p);
  if (p.gamma <= 0.0)
    throw std::invalid_argument(
        "asymptotic velocity is singular at gamma = 0");
  const double r = 4.0 * p.alpha / (M_PI * p.gamma);
  return 1.0 / std::sqrt(1.0 + r * r);
}

EnergyDensity energy_density(double phi, double phi_x, double phi_t,
                             double gamma) {
  EnergyDensity d;
  d.h = 0.5 * phi_t * phi_t + 0.5 * phi_x * phi_x + gamma * phi -
        std::cos(phi) + energy_constant(gamma);
  d.j = phi_x * phi_t;
  return d;
}

}  // namespace sgtw

#include "sgtw/unperturbed.hpp"

#include <cfloat>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "sgtw/errors.hpp"

namespace sgtw {

namespace {

// Adaptive Simpson with a rounding floor on the per-interval tolerance
// (a plain halving rule underflows and never terminates).
double asimp(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double L = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double R = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(L + R - whole) <= 15.0 * tol)
    return L + R + (L + R - whole) / 15.0;
  const double child =
      std::max(0.5 * tol, DBL_EPSILON * (std::fabs(L) + std::fabs(R)));
  return asimp(f, a, m, fa, flm, fm, L, child, depth - 1) +
         asimp(f, m, b, fm, frm, fb, R, child, depth - 1);
}

double quad(const std::function<double(double)>& f, double a, double b,
            double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return asimp(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

PendulumOrbit classify_orbit(double e) {
  if (!(e > -1.0))
    throw std::invalid_argument("pendulum orbit requires e > -1");
  PendulumOrbit o;
  o.e = e;
  if (e < 1.0) {
    o.regime = PendulumRegime::Libration;
    o.period = libration_period(e);
  } else if (e == 1.0) {
    o.regime = PendulumRegime::Separatrix;
  } else {
    o.regime = PendulumRegime::Rotation;
    o.period = rotation_period(e);
  }
  return o;
}

double kink_closed_form(double xi, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("sign must be +1 or -1");
  return 4.0 * std::atan(std::exp(sign * xi)) - M_PI;
}

double elliptic_k(double k) {
  if (!(k >= 0.0 && k < 1.0))
    throw std::invalid_argument("elliptic_k requires 0 <= k < 1");
  double a = 1.0, b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < 64 && std::fabs(a - b) > 4.0 * DBL_EPSILON * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return M_PI / (2.0 * a);
}

double libration_period(double e) {
  if (!(e > -1.0 && e < 1.0))
    throw std::invalid_argument("libration requires -1 < e < 1");
  // Quarter period from g = 0 to the turning point g_t = acos(-e), with
  // g = g_t - w^2.  The gap e + cos(g) = cos(g) - cos(g_t) is evaluated as
  // a product, 2 sin(g_t - w^2/2) sin(w^2/2), to avoid cancellation.
  const double gt = std::acos(-e);
  auto f = [gt](double w) {
    const double hh = 0.5 * w * w;
    if (hh == 0.0) return std::sqrt(2.0 / std::sin(gt));
    return 2.0 * w / std::sqrt(4.0 * std::sin(gt - hh) * std::sin(hh));
  };
  return 4.0 * quad(f, 0.0, std::sqrt(gt), 1e-13);
}

double rotation_period(double e) {
  if (!(e > 1.0))
    throw std::invalid_argument("rotation requires e > 1");
  auto f = [e](double g) { return 1.0 / std::sqrt(2.0 * (e + std::cos(g))); };
  const double scale = 2.0 * M_PI * f(M_PI);  // crude magnitude for the tol
  return quad(f, 0.0, 2.0 * M_PI, std::max(1e-15, 1e-13 * scale));
}

double bounded_pair_turning_point(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument(
        "bounded pair requires 0 < gamma < 1 (at gamma = 0 the orbit "
        "degenerates to two separatrices; use kink_closed_form)");
  const Params p{gamma, 0.0};
  const Equilibrium eq0 = equilibria(p, 0);
  const Equilibrium eqm1 = equilibria(p, -1);
  const double e = eq0.u_max;
  // U - e changes sign between g_-1^M (where U > e) and g_0^m (U < e);
  // U is monotone there, so plain bisection.
  double lo = eqm1.g_max, hi = eq0.g_min;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (potential(mid, gamma) - e > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

WaveProfile bounded_pair_profile(double gamma, int samples, double alpha) {
  if (samples < 16) throw std::invalid_argument("need at least 16 samples");
  const double g_t = bounded_pair_turning_point(gamma);  // validates gamma
  const Params p{gamma, alpha};
  validate(p);
  const Equilibrium eq0 = equilibria(p, 0);

  // Energy gap e - U(g), written as differences that stay accurate at
  // whichever end of the orbit g is closer to.  Near the turning point
  // (g = g_t + w^2):
  //   gap = -2 sin(g_t + w^2/2) sin(w^2/2) + gamma w^2;
  // near the saddle (g = g_max - d, using sin(g_max) = gamma):
  //   gap = gamma (sin d - d) + (-cos g_max) (1 - cos d).
  const double g_max = eq0.g_max;
  const double mcos = -std::cos(g_max);  // = sqrt(1 - gamma^2)
  auto gap_saddle = [gamma, mcos](double d) {
    const double sh = std::sin(0.5 * d);
    return gamma * (std::sin(d) - d) + mcos * 2.0 * sh * sh;
  };
  auto gap_of = [g_t, g_max, gamma, &gap_saddle](double w) {
    const double g = g_t + w * w;
    if (g_max - g < g - g_t) return gap_saddle(g_max - g);
    const double hh = 0.5 * w * w;
    return -2.0 * std::sin(g_t + hh) * std::sin(hh) + gamma * (w * w);
  };
  // core: w-substitution removes the turning-point singularity
  auto core_integrand = [&](double w) {
    if (w == 0.0)
      return std::sqrt(2.0 / -potential_deriv(g_t, gamma));
    return 2.0 * w / std::sqrt(2.0 * gap_of(w));
  };
  // tail: in u = log(g_max - g) the integrand flattens to ~1/lambda
  auto tail_integrand = [&](double u) {
    const double d = std::exp(u);
    return d / std::sqrt(2.0 * gap_saddle(d));
  };

  const double tail = 1e-7;
  const double w_core = std::sqrt(0.5 * (g_max - g_t));
  const int n_half = samples / 2;
  const int n_core = (6 * n_half) / 10;
  const int n_tail = n_half - n_core;
  const double d0 = g_max - g_t - w_core * w_core;  // gap at the core end

  // Cumulative xi by per-interval quadrature, then assemble both halves.
  std::vector<ProfileSample> right;
  right.reserve(n_half + 1);
  double xi = 0.0, w_prev = 0.0;
  for (int i = 0; i <= n_core; ++i) {
    const double w = w_core * double(i) / n_core;
    if (w > w_prev) xi += quad(core_integrand, w_prev, w, 1e-13);
    w_prev = w;
    right.push_back({xi, g_t + w * w,
                     std::sqrt(std::max(0.0, 2.0 * gap_of(w)))});
  }
  double u_prev = std::log(d0);
  for (int i = 1; i <= n_tail; ++i) {
    const double d = d0 * std::pow(tail / d0, double(i) / n_tail);
    const double u = std::log(d);
    xi += quad(tail_integrand, u, u_prev, 1e-13);  // integrate towards the saddle
    u_prev = u;
    right.push_back({xi, g_max - d,
                     std::sqrt(std::max(0.0, 2.0 * gap_saddle(d)))});
  }

  WaveProfile prof;
  prof.kind = WaveKind::BoundedPair;
  prof.gamma = gamma;
  prof.alpha = alpha;
  prof.mu = 0.0;
  prof.winding = 0;
  if (alpha > 0.0)
    prof.vel = VelocityMap{0.0, 0.0, +1, false};  // static pair
  // alpha = 0: |v| < 1 is a free parameter, vel stays empty
  prof.samples.reserve(2 * right.size() - 1);
  for (auto it = right.rbegin(); it != right.rend(); ++it)
    prof.samples.push_back({-it->xi, it->g, -it->gp});
  for (size_t i = 1; i < right.size(); ++i) prof.samples.push_back(right[i]);
  return prof;
}

WaveProfile unperturbed_kink_profile(double half_span, int samples,
                                     int sign) {
  if (!(half_span > 0.0) || samples < 3)
    throw std::invalid_argument("bad kink sampling request");
  WaveProfile prof;
  prof.kind = WaveKind::Kink;
  prof.gamma = 0.0;
  prof.alpha = 0.0;
  prof.mu = 0.0;
  prof.winding = 1;
  prof.samples.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double xi = -half_span + 2.0 * half_span * i / (samples - 1);
    prof.samples.push_back(
        {xi, kink_closed_form(xi), 2.0 / std::cosh(xi)});
  }
  return (sign == -1) ? prof.reflected() : prof;
}

}  // namespace sgtw

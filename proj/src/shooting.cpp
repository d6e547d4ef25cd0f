#include "sgtw/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgtw {

namespace {

constexpr double kProfileSpacing = 0.25;  // max xi gap between samples

// Trajectory resampled to a roughly uniform spacing: long steps are
// subdivided on the dense output, short ones skipped until the spacing
// fills up.  The final state is always included.
std::vector<ProfileSample> dense_samples(const Trajectory& tr,
                                         double spacing) {
  std::vector<ProfileSample> out;
  out.push_back({tr.xi_front(), tr.initial().g, tr.initial().gp});
  const auto& steps = tr.steps();
  for (size_t si = 0; si < steps.size(); ++si) {
    const DenseStep& st = steps[si];
    const bool last_step = (si + 1 == steps.size());
    const double len = std::fabs(st.h()) * st.s_max();
    const int pieces = std::max(1, int(std::ceil(len / spacing)));
    for (int i = 1; i <= pieces; ++i) {
      const double s = st.s_max() * i / pieces;
      const double xi = st.xi0() + st.h() * s;
      const bool final_point = last_step && i == pieces;
      if (!final_point && std::fabs(xi - out.back().xi) < 0.9 * spacing)
        continue;
      double g, gp;
      st.eval(s, g, gp);
      out.push_back({xi, g, gp});
    }
  }
  return out;
}

// xi at which g crosses `level` (g monotone through it), by bisection on
// the dense output.
double crossing_xi(const Trajectory& tr, double level) {
  const auto pts = tr.samples();
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double fa = pts[i].second.g - level;
    const double fb = pts[i + 1].second.g - level;
    if ((fa <= 0.0) != (fb <= 0.0) || fb == 0.0) {
      double a = pts[i].first, b = pts[i + 1].first;
      double va = fa;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        const double vm = tr.eval(m).g - level;
        if ((va <= 0.0) == (vm <= 0.0)) {
          a = m;
          va = vm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
  }
  throw SolverError("normalization level not crossed by trajectory");
}

WaveProfile profile_from_trajectory(const Trajectory& tr, const Params& p,
                                    double mu, WaveKind kind,
                                    double xi_shift,
                                    double spacing = kProfileSpacing) {
  WaveProfile prof;
  prof.kind = kind;
  prof.gamma = p.gamma;
  prof.alpha = p.alpha;
  prof.mu = mu;
  prof.samples = dense_samples(tr, spacing);
  for (ProfileSample& s : prof.samples) s.xi -= xi_shift;
  prof.winding = int(std::lround(
      (prof.samples.back().g - prof.samples.front().g) / (2.0 * M_PI)));
  if (mu > 0.0 || p.alpha > 0.0)
    prof.vel = velocity_from_mu(p.alpha, mu);
  // mu = alpha = 0: free-velocity family, vel stays empty
  return prof;
}

}  // namespace

std::string to_string(Fate f) {
  switch (f) {
    case Fate::Overshoot: return "overshoot";
    case Fate::Capture: return "capture";
    case Fate::Connection: return "connection";
    case Fate::Ambiguous: return "ambiguous";
  }
  return "unknown";
}

double unstable_eigenvalue(const Params& p, double mu) {
  validate(p);
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  const double s = std::sqrt(1.0 - p.gamma * p.gamma);
  return std::sqrt(0.25 * mu * mu + s) - 0.5 * mu;
}

State launch_from_saddle(const Params& p, double mu, double delta) {
  if (!(delta > 0.0 && delta <= 1e-4))
    throw std::invalid_argument("launch offset must lie in (0, 1e-4]");
  const double lam = unstable_eigenvalue(p, mu);  // validates p, mu
  const Equilibrium eq = equilibria(p, -1);
  return {eq.g_max + delta, lam * delta};
}

FateReport classify_fate(const Params& p, double mu, const State& launch,
                         const ShootOptions& opt) {
  const Equilibrium eq = equilibria(p, 0);
  OdeProblem prob{p, mu, launch, 0.0};
  StopSpec stop;
  stop.xi_end = opt.horizon;
  stop.g_level = eq.g_max;
  stop.stop_on_turning = true;

  IntegrateResult r = integrate(prob, stop, opt.ode);
  FateReport rep;
  rep.trajectory = std::move(r.trajectory);
  rep.crossing_xi = r.event.xi;

  if (mu == 0.0) {
    // Undamped fates are decided by the conserved mechanical energy
    // relative to the saddle level; a state-space ball cannot resolve a
    // separatrix after a long crawl.
    const double de =
        mechanical_energy(launch, p.gamma) - potential(eq.g_max, p.gamma);
    rep.crossing_speed = r.event.state.gp;
    if (std::fabs(de) <= 1e-12 * (1.0 + std::fabs(eq.u_max)))
      rep.fate = Fate::Connection;
    else
      rep.fate = (de > 0.0) ? Fate::Overshoot : Fate::Capture;
    return rep;
  }

  switch (r.event.kind) {
    case EventKind::GCrossing:
      rep.crossing_speed = r.event.state.gp;
      rep.fate = (r.event.state.gp > opt.connection_ball) ? Fate::Overshoot
                                                          : Fate::Connection;
      break;
    case EventKind::TurningPoint:
      rep.crossing_speed = 0.0;
      rep.fate = (eq.g_max - r.event.state.g > opt.connection_ball)
                     ? Fate::Capture
                     : Fate::Connection;
      break;
    case EventKind::Horizon: {
      const double d_saddle = std::hypot(r.event.state.g - eq.g_max,
                                         r.event.state.gp);
      rep.crossing_speed = r.event.state.gp;
      if (d_saddle <= opt.connection_ball) {
        rep.fate = Fate::Connection;
      } else {
        // overdamped capture creeps into the minimum without a turning
        // point, so the well also counts as a terminal set
        const double d_min = std::hypot(r.event.state.g - eq.g_min,
                                        r.event.state.gp);
        rep.fate = (d_min <= 1e-5) ? Fate::Capture : Fate::Ambiguous;
      }
      break;
    }
  }
  return rep;
}

KinkResult find_kink_mu(const Params& p, double tol, const ShootOptions& opt) {
  validate(p);
  if (p.gamma == 0.0)
    throw std::invalid_argument(
        "mu_hat is undefined at gamma = 0: every mu > 0 captures and the "
        "unperturbed kink has free velocity at mu = 0");
  if (!(tol >= 1e-13))
    throw std::invalid_argument("kink bisection tolerance must be >= 1e-13");

  long iters = 0;
  // Ambiguous fates tighten the launch offset and retry once.
  auto fate_at = [&](double mu) -> FateReport {
    ++iters;
    FateReport rep =
        classify_fate(p, mu, launch_from_saddle(p, mu, opt.delta), opt);
    if (rep.fate == Fate::Ambiguous) {
      rep = classify_fate(p, mu, launch_from_saddle(p, mu, opt.delta / 10.0),
                          opt);
      if (rep.fate == Fate::Ambiguous)
        throw SolverError("ambiguous trajectory fate at mu = " +
                          std::to_string(mu));
    }
    return rep;
  };

  auto finish = [&](double mu_hat, const FateReport& overshoot_side) {
    const double level = -std::asin(p.gamma);
    const double shift = crossing_xi(overshoot_side.trajectory, level);
    KinkResult res;
    res.mu_hat = mu_hat;
    res.iterations = iters;
    res.profile = profile_from_trajectory(overshoot_side.trajectory, p,
                                          mu_hat, WaveKind::Kink, shift);
    return res;
  };

  FateReport lo_rep = fate_at(0.0);
  if (lo_rep.fate == Fate::Connection) return finish(0.0, lo_rep);
  if (lo_rep.fate != Fate::Overshoot)
    throw SolverError("expected Overshoot at mu = 0");

  double lo = 0.0, hi = 1.0;
  for (;;) {
    FateReport rep = fate_at(hi);
    if (rep.fate == Fate::Capture) break;
    if (rep.fate == Fate::Connection) return finish(hi, rep);
    lo = hi;
    lo_rep = std::move(rep);
    hi *= 2.0;
    if (hi > 1e12) throw SolverError("no capture found while bracketing");
  }

  // Bracket invariant: fate(lo) = Overshoot, fate(hi) = Capture.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at rounding resolution
    FateReport rep = fate_at(mid);
    if (rep.fate == Fate::Overshoot) {
      lo = mid;
      lo_rep = std::move(rep);
    } else if (rep.fate == Fate::Capture) {
      hi = mid;
    } else {
      return finish(mid, rep);  // Connection
    }
  }

  // The profile is built from the overshoot side of the final bracket:
  // that trajectory has gp > 0 throughout and ends at g_0^M exactly.
  return finish(0.5 * (lo + hi), lo_rep);
}

ArrayResult find_array_mu(const Params& p, double gp0, double tol,
                          const ShootOptions& opt) {
  validate(p);
  if (!(gp0 > 0.0))
    throw std::invalid_argument(
        "array shooting requires gp0 > 0 (the gp0 = 0 limit is the kink: "
        "use find_kink_mu)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

  const Equilibrium eqm1 = equilibria(p, -1);
  const Equilibrium eq0 = equilibria(p, 0);
  long iters = 0;
  // residual scale: gp values of order gp0 limit the absolute accuracy
  const double r_tol = tol * std::max(1.0, gp0);

  struct Shot {
    bool crossed = false;
    double residual = -std::numeric_limits<double>::infinity();
    double Xi = 0.0;
    Trajectory trajectory;
  };
  auto shoot = [&](double mu) -> Shot {
    ++iters;
    OdeProblem prob{p, mu, State{eqm1.g_max, gp0}, 0.0};
    StopSpec stop;
    stop.xi_end = opt.horizon;
    stop.g_level = eq0.g_max;
    stop.stop_on_turning = true;
    IntegrateResult r = integrate(prob, stop, opt.ode);
    Shot s;
    s.trajectory = std::move(r.trajectory);
    if (r.event.kind == EventKind::GCrossing) {
      s.crossed = true;
      s.residual = r.event.state.gp - gp0;
      s.Xi = r.event.xi;
    }
    return s;
  };

  auto finish = [&](double mu, Shot&& s) {
    ArrayResult res;
    res.mu_check = mu;
    res.Xi = s.Xi;
    res.iterations = iters;
    res.profile = profile_from_trajectory(
        s.trajectory, p, mu, WaveKind::Array, 0.0,
        std::min(kProfileSpacing, s.Xi / 256.0));
    res.profile.period = s.Xi;
    res.profile.winding = 1;  // per period
    if (mu == 0.0 && p.alpha == 0.0) res.profile.vel.reset();
    return res;
  };

  Shot s0 = shoot(0.0);
  if (s0.crossed && std::fabs(s0.residual) <= r_tol)
    return finish(0.0, std::move(s0));
  if (!s0.crossed || s0.residual < 0.0)
    throw SolverError("array shot at mu = 0 fails to arrive faster than it "
                      "left; no bracket");

  double lo = 0.0, hi = 1.0;
  for (;;) {
    Shot s = shoot(hi);
    if (std::fabs(s.residual) <= r_tol && s.crossed)
      return finish(hi, std::move(s));
    if (s.residual < 0.0) break;  // capture counts as -inf
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw SolverError("no upper bracket for array shooting");
  }

  // Near the kink limit (gp0 -> 0) the saddle passage amplifies
  // integration noise and the residual has a floor, so the bisection may
  // instead terminate at mu resolution with the best crossing found.
  Shot best;
  double best_mu = 0.0;
  for (int it = 0; it < 240; ++it) {
    const double mid = 0.5 * (lo + hi);
    Shot s = shoot(mid);
    if (s.crossed && std::fabs(s.residual) <= r_tol)
      return finish(mid, std::move(s));
    const double residual = s.residual;
    if (s.crossed &&
        (!best.crossed || std::fabs(residual) < std::fabs(best.residual))) {
      best = std::move(s);
      best_mu = mid;
    }
    if (residual > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 8.0 * std::numeric_limits<double>::epsilon() *
                      std::max(1.0, hi))
      break;
  }
  if (best.crossed) return finish(best_mu, std::move(best));
  throw SolverError("array shooting found no periodic crossing");
}

double period_to_speed(const Params& p, double Xi_target, double tol,
                       const ShootOptions& opt) {
  if (!(Xi_target > 0.0))
    throw std::invalid_argument("target period must be positive");
  const double lo_gp = 1e-6, hi_gp = 1e3;
  auto period_of = [&](double gp0) {
    return find_array_mu(p, gp0, 1e-10, opt).Xi;
  };
  double xa = period_of(lo_gp), xb = period_of(hi_gp);
  // Xi is strictly monotone in gp0 (decreasing on every grid we measured,
  // but only monotonicity is assumed here).
  const bool decreasing = xa > xb;
  if (!decreasing) std::swap(xa, xb);
  if (Xi_target > xa || Xi_target < xb)
    throw SolverError("target period out of range for gp0 in [1e-6, 1e3]");
  double a = lo_gp, b = hi_gp;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    const double Xi = period_of(mid);
    if (std::fabs(Xi - Xi_target) <= tol) return mid;
    const bool go_right = decreasing ? (Xi > Xi_target) : (Xi < Xi_target);
    if (go_right)
      a = mid;
    else
      b = mid;
    if (b - a < 1e-14 * std::max(1.0, b)) break;
  }
  throw SolverError("period inversion did not converge");
}

HalfArrayResult half_array_profile(const Params& p, double gp0,
                                   double horizon, const ShootOptions& opt) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  ArrayResult arr = find_array_mu(p, gp0, 1e-10, opt);

  OdeProblem prob{p, arr.mu_check,
                  launch_from_saddle(p, arr.mu_check, opt.delta), 0.0};
  StopSpec stop;
  stop.xi_end = horizon;
  stop.stop_on_turning = true;  // capture means the hint fails here
  IntegrateResult r = integrate(prob, stop, opt.ode);
  if (r.event.kind == EventKind::TurningPoint)
    throw SolverError(
        "half-array launch was captured at xi = " +
        std::to_string(r.event.xi) +
        "; no approach to the array orbit at these parameters");

  HalfArrayResult res;
  res.mu_check = arr.mu_check;
  res.Xi = arr.Xi;
  res.profile = profile_from_trajectory(r.trajectory, p, arr.mu_check,
                                        WaveKind::HalfArray, 0.0,
                                        /*spacing=*/0.5);
  res.profile.period = arr.Xi;

  // Distance to the array orbit, measured in (g mod 2pi, gp).  The orbit
  // reference comes from a dedicated dense integration, not from the
  // coarser emitted samples.
  const Equilibrium eqm1 = equilibria(p, -1);
  OdeProblem orbit_prob{p, arr.mu_check, State{eqm1.g_max, gp0}, 0.0};
  StopSpec orbit_stop;
  orbit_stop.xi_end = arr.Xi;
  IntegrateResult orbit_run = integrate(orbit_prob, orbit_stop, opt.ode);
  const int n_orbit = 4000;
  std::vector<State> orbit(n_orbit + 1);
  for (int j = 0; j < n_orbit; ++j)
    orbit[j] = orbit_run.trajectory.eval(arr.Xi * j / n_orbit);
  orbit[n_orbit] = {orbit[0].g + 2.0 * M_PI, orbit[0].gp};  // closing segment
  auto wrap = [](double x) {
    x = std::fmod(x + M_PI, 2.0 * M_PI);
    if (x < 0.0) x += 2.0 * M_PI;
    return x - M_PI;
  };
  // point-to-segment distance on the polyline (a point-to-node distance
  // floors at half the segment length and hides the convergence)
  auto dist_to_orbit = [&](const ProfileSample& s) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_orbit; ++j) {
      const double ex = orbit[j + 1].g - orbit[j].g;
      const double ey = orbit[j + 1].gp - orbit[j].gp;
      const double px = wrap(s.g - orbit[j].g);
      const double py = s.gp - orbit[j].gp;
      const double len2 = ex * ex + ey * ey;
      const double t =
          (len2 > 0.0) ? std::clamp((px * ex + py * ey) / len2, 0.0, 1.0)
                       : 0.0;
      best = std::min(best, std::hypot(px - t * ex, py - t * ey));
    }
    return best;
  };
  res.distance.reserve(res.profile.samples.size());
  for (const ProfileSample& s : res.profile.samples)
    res.distance.emplace_back(s.xi, dist_to_orbit(s));
  return res;
}

std::vector<SweepRow> sweep_mu_hat(std::vector<double> gammas, double alpha,
                                   double tol, const ShootOptions& opt) {
  std::sort(gammas.begin(), gammas.end());
  std::vector<SweepRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) {
    SweepRow row;
    row.gamma = g;
    try {
      const Params p{g, alpha};
      KinkResult kr = find_kink_mu(p, tol, opt);
      row.mu_hat = kr.mu_hat;
      row.ratio = (g > 0.0) ? kr.mu_hat / g : 0.0;
      row.iterations = kr.iterations;
      row.v_hat = velocity_from_mu(alpha, kr.mu_hat).v;
      row.ok = true;
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sgtw

#include "sgtw/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgtw {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Second difference with the domain's boundary rule.
inline double second_diff(const Field& f, const std::vector<double>& phi,
                          size_t i) {
  const size_t n = phi.size();
  const double dx2 = f.dom.dx * f.dom.dx;
  double left, right;
  if (f.dom.kind == DomainKind::Circle) {
    const double jump = kTwoPi * f.winding;
    left = (i == 0) ? phi[n - 1] - jump : phi[i - 1];
    right = (i == n - 1) ? phi[0] + jump : phi[i + 1];
  } else {
    left = phi[i - 1];
    right = phi[i + 1];
  }
  return (right - 2.0 * phi[i] + left) / dx2;
}

std::vector<double> gradient(const Field& f) {
  const size_t n = f.n();
  const double dx = f.dom.dx;
  std::vector<double> gx(n);
  if (f.dom.kind == DomainKind::Circle) {
    const double jump = kTwoPi * f.winding;
    for (size_t i = 0; i < n; ++i) {
      const double left = (i == 0) ? f.phi[n - 1] - jump : f.phi[i - 1];
      const double right = (i == n - 1) ? f.phi[0] + jump : f.phi[i + 1];
      gx[i] = (right - left) / (2.0 * dx);
    }
  } else {
    gx[0] = (-3.0 * f.phi[0] + 4.0 * f.phi[1] - f.phi[2]) / (2.0 * dx);
    for (size_t i = 1; i + 1 < n; ++i)
      gx[i] = (f.phi[i + 1] - f.phi[i - 1]) / (2.0 * dx);
    gx[n - 1] =
        (3.0 * f.phi[n - 1] - 4.0 * f.phi[n - 2] + f.phi[n - 3]) / (2.0 * dx);
  }
  return gx;
}

// Trapezoid weight (all-ones on the periodic Circle).
inline double weight(const Field& f, size_t i) {
  if (f.dom.kind == DomainKind::Circle) return 1.0;
  return (i == 0 || i + 1 == f.n()) ? 0.5 : 1.0;
}

double front_level(const Params& p) { return M_PI - std::asin(p.gamma); }

// All grid crossings of the front level, by linear interpolation.
std::vector<double> front_crossings(const Field& f, const Params& p) {
  std::vector<double> out;
  const double level = front_level(p);
  const size_t n = f.n();
  const size_t pairs = (f.dom.kind == DomainKind::Circle) ? n : n - 1;
  for (size_t i = 0; i < pairs; ++i) {
    double a = f.phi[i] - level;
    double b = (i + 1 < n ? f.phi[i + 1] : f.phi[0] + kTwoPi * f.winding) -
               level;
    if (f.dom.kind == DomainKind::Circle) {
      // reduce the pair mod 2pi so every front is seen once
      const double base = kTwoPi * std::floor(a / kTwoPi + 0.5);
      a -= base;
      b -= base;
    }
    if ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0))
      out.push_back(f.x(i) + f.dom.dx * a / (a - b));
  }
  return out;
}

}  // namespace

Field init_from_profile(const WaveProfile& prof, const DomainSpec& dom,
                        double x_center, std::optional<double> v_choice) {
  if (prof.samples.empty()) throw std::invalid_argument("empty profile");
  if (!(dom.dx > 0.0) || !(dom.x1 > dom.x0))
    throw std::invalid_argument("bad domain geometry");

  double v = 0.0;
  if (prof.vel) {
    if (prof.vel->luminal)
      throw std::invalid_argument(
          "profile velocity is luminal (|v| = 1); no subluminal field");
    if (v_choice && *v_choice != prof.vel->v)
      throw std::invalid_argument(
          "profile fixes its own velocity; drop the explicit v");
    v = prof.vel->v;
  } else {
    v = v_choice.value_or(0.0);
  }
  if (!(std::fabs(v) < 1.0))
    throw std::invalid_argument("need |v| < 1, got " + std::to_string(v));

  const double lorentz = std::sqrt(1.0 - v * v);
  const double dir = (v < 0.0) ? -1.0 : 1.0;  // sign(v), with sign(0) = +1
  const bool is_array =
      prof.kind == WaveKind::Array || prof.kind == WaveKind::HalfArray;

  const double len = dom.x1 - dom.x0;
  const double cells = len / dom.dx;
  if (std::fabs(cells - std::lround(cells)) > 1e-9)
    throw std::invalid_argument("domain length must be a multiple of dx");

  Field f;
  f.dom = dom;

  if (dom.kind == DomainKind::Line) {
    if (is_array)
      throw std::invalid_argument(
          "array profiles need a Circle domain (or explicit truncation)");
    // support = where the profile differs materially from its constants
    const double g_lo = prof.samples.front().g, g_hi = prof.samples.back().g;
    double xi_lo = 0.0, xi_hi = 0.0;
    for (const ProfileSample& s : prof.samples) {
      if (std::min(std::fabs(s.g - g_lo), std::fabs(s.g - g_hi)) > 1e-3) {
        xi_lo = std::min(xi_lo, s.xi);
        xi_hi = std::max(xi_hi, s.xi);
      }
    }
    const double xa = x_center + dir * lorentz * xi_lo;
    const double xb = x_center + dir * lorentz * xi_hi;
    const double pad_left = std::min(xa, xb) - dom.x0;
    const double pad_right = dom.x1 - std::max(xa, xb);
    if (pad_left < 20.0 || pad_right < 20.0)
      throw std::invalid_argument(
          "domain too small: need 20 units of padding on both sides of the "
          "profile support");

    const size_t n = size_t(std::lround(cells)) + 1;
    f.phi.resize(n);
    f.phi_t_init.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const double xi = dir * (f.x(i) - x_center) / lorentz;
      const State s = prof.eval(xi);
      f.phi[i] = s.g + M_PI;
      f.phi_t_init[i] = -dir * v * s.gp / lorentz;
    }
    f.pin_left = f.phi.front();
    f.pin_right = f.phi.back();
    f.phi_t_init.front() = 0.0;
    f.phi_t_init.back() = 0.0;
    f.winding = int(std::lround((f.pin_right - f.pin_left) / kTwoPi));
  } else {
    if (!is_array || !prof.period)
      throw std::invalid_argument("Circle domains host array profiles");
    const double Xi = *prof.period;
    const double m_real = len / (Xi * lorentz);
    const int m = int(std::lround(m_real));
    if (m < 1 || std::fabs(len - m * Xi * lorentz) > dom.dx)
      throw std::invalid_argument(
          "circumference must be m * Xi * sqrt(1 - v^2) within one cell");
    const size_t n = size_t(std::lround(cells));
    f.phi.resize(n);
    f.phi_t_init.resize(n);
    for (size_t i = 0; i < n; ++i) {
      double xi = dir * (f.x(i) - x_center) / lorentz;
      const double turns = std::floor(xi / Xi);
      xi -= turns * Xi;
      const State s = prof.eval(xi);
      f.phi[i] = s.g + M_PI + kTwoPi * turns;
      f.phi_t_init[i] = -dir * v * s.gp / lorentz;
    }
    f.winding = m * prof.winding * (dir < 0 ? -1 : 1);
  }
  return f;
}

std::vector<double> time_derivative(const Field& f, const Params& p) {
  const size_t n = f.n();
  if (f.dt_prev == 0.0) {
    if (f.phi_t_init.size() == n) return f.phi_t_init;
    return std::vector<double>(n, 0.0);
  }
  std::vector<double> out(n);
  const double dt = f.dt_prev;
  const double denom = 1.0 + 0.5 * p.alpha * dt;
  for (size_t i = 0; i < n; ++i) {
    if (f.dom.kind == DomainKind::Line && (i == 0 || i + 1 == n)) {
      out[i] = 0.0;
      continue;
    }
    const double d = (f.phi[i] - f.phi_prev[i]) / dt;
    const double L =
        second_diff(f, f.phi, i) - std::sin(f.phi[i]) - p.gamma;
    out[i] = (d + 0.5 * dt * L) / denom;
  }
  return out;
}

void step(Field& f, double dt, const Params& p) {
  validate(p);
  const size_t n = f.n();
  if (n < 3) throw std::invalid_argument("grid too small");
  if (!(dt > 0.0) || dt > 0.9 * f.dom.dx)
    throw std::invalid_argument("CFL violation: need 0 < dt <= 0.9 dx");
  if (f.dt_prev != 0.0 && dt != f.dt_prev)
    throw std::invalid_argument("dt must stay fixed across steps");

  if (f.dt_prev == 0.0) {
    // Bootstrap phi(-dt) by a backward Taylor step of the equation.
    if (f.phi_t_init.size() != n) f.phi_t_init.assign(n, 0.0);
    f.phi_prev.resize(n);
    for (size_t i = 0; i < n; ++i) {
      if (f.dom.kind == DomainKind::Line && (i == 0 || i + 1 == n)) {
        f.phi_prev[i] = f.phi[i];
        continue;
      }
      const double L =
          second_diff(f, f.phi, i) - std::sin(f.phi[i]) - p.gamma;
      const double ptt = L - p.alpha * f.phi_t_init[i];
      f.phi_prev[i] = f.phi[i] - dt * f.phi_t_init[i] + 0.5 * dt * dt * ptt;
    }
  }

  std::vector<double> next(n);
  const double dt2 = dt * dt;
  const double ad = 0.5 * p.alpha * dt;
  const double denom = 1.0 + ad;
  const size_t i0 = (f.dom.kind == DomainKind::Line) ? 1 : 0;
  const size_t i1 = (f.dom.kind == DomainKind::Line) ? n - 1 : n;
  if (f.dom.kind == DomainKind::Line) {
    next[0] = f.pin_left;
    next[n - 1] = f.pin_right;
  }
  bool finite = true;
  for (size_t i = i0; i < i1; ++i) {
    const double L = second_diff(f, f.phi, i) - std::sin(f.phi[i]) - p.gamma;
    next[i] =
        (2.0 * f.phi[i] - f.phi_prev[i] + dt2 * L + ad * f.phi_prev[i]) /
        denom;
    finite = finite && std::isfinite(next[i]);
  }
  if (!finite)
    throw BlowUpError("non-finite field value at t = " +
                          std::to_string(f.t + dt),
                      f.t + dt);
  f.phi_prev.swap(f.phi);
  f.phi.swap(next);
  f.t += dt;
  f.dt_prev = dt;
}

EnergyReport energy_report(const Field& f, const Params& p) {
  const size_t n = f.n();
  const std::vector<double> gx = gradient(f);
  const std::vector<double> gt = time_derivative(f, p);
  EnergyReport rep;
  rep.h.resize(n);
  rep.j.resize(n);
  double H = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const EnergyDensity d = energy_density(f.phi[i], gx[i], gt[i], p.gamma);
    rep.h[i] = d.h;
    rep.j[i] = d.j;
    H += weight(f, i) * d.h;
  }
  rep.H = H * f.dom.dx;
  return rep;
}

double front_position(const Field& f, const Params& p) {
  const std::vector<double> c = front_crossings(f, p);
  return c.empty() ? std::numeric_limits<double>::quiet_NaN() : c.front();
}

RunResult run(Field f, const Params& p, const RunOptions& opt) {
  validate(p);
  if (!(opt.t_end > f.t)) throw std::invalid_argument("t_end in the past");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be positive");

  const long steps_per_record =
      std::max(1L, std::lround(opt.record_dt / opt.dt));
  const double L = f.dom.x1 - f.dom.x0;

  RunResult res;
  double window_residual = 0.0;
  double front_unwrapped = std::numeric_limits<double>::quiet_NaN();

  auto pick_front = [&]() {
    if (!opt.track_front) return;
    const std::vector<double> c = front_crossings(f, p);
    if (c.empty()) {
      front_unwrapped = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    if (std::isnan(front_unwrapped)) {
      front_unwrapped = c.front();
      return;
    }
    // continuity: nearest candidate, unwrapped by the circumference
    double best = front_unwrapped, best_d =
        std::numeric_limits<double>::infinity();
    for (double cand : c) {
      if (f.dom.kind == DomainKind::Circle) {
        const long k0 = std::lround((front_unwrapped - cand) / L);
        for (long k = k0 - 1; k <= k0 + 1; ++k) {
          const double u = cand + double(k) * L;
          const double d = std::fabs(u - front_unwrapped);
          if (d < best_d) {
            best_d = d;
            best = u;
          }
        }
      } else {
        const double d = std::fabs(cand - front_unwrapped);
        if (d < best_d) {
          best_d = d;
          best = cand;
        }
      }
    }
    front_unwrapped = best;
  };

  auto make_record = [&]() {
    DiagRecord rec;
    rec.t = f.t;
    const EnergyReport er = energy_report(f, p);
    rec.H = er.H;
    const std::vector<double> gt = time_derivative(f, p);
    double diss = 0.0, forc = 0.0;
    for (size_t i = 0; i < f.n(); ++i) {
      diss += weight(f, i) * gt[i] * gt[i];
      forc += weight(f, i) * gt[i];
    }
    rec.dissipation_power = p.alpha * diss * f.dom.dx;
    rec.forcing_power = -p.gamma * forc * f.dom.dx;
    rec.x_front = front_unwrapped;
    if (f.dom.kind == DomainKind::Line)
      rec.winding = (f.phi.back() - f.phi.front()) / kTwoPi;
    else
      rec.winding = f.winding;
    rec.max_step_residual = window_residual;
    window_residual = 0.0;
    return rec;
  };

  pick_front();
  res.records.push_back(make_record());

  double H_prev = res.records.front().H;
  long step_in_window = 0;
  while (f.t < opt.t_end - 0.5 * opt.dt) {
    std::vector<double> before = f.phi;
    try {
      step(f, opt.dt, p);
    } catch (const BlowUpError& b) {
      res.blew_up = true;
      res.blowup_t = b.t;
      break;
    }
    ++res.n_steps;
    ++step_in_window;

    // discrete energy balance over this step; boundary flux vanishes on
    // both domain kinds (pinned ends / periodicity)
    const EnergyReport er = energy_report(f, p);
    double mid = 0.0;
    for (size_t i = 0; i < f.n(); ++i) {
      const double pt = (f.phi[i] - before[i]) / opt.dt;
      mid += weight(f, i) * pt * pt;
    }
    const double residual =
        er.H - H_prev + p.alpha * opt.dt * mid * f.dom.dx;
    window_residual = std::max(window_residual, std::fabs(residual));
    res.max_step_residual =
        std::max(res.max_step_residual, std::fabs(residual));
    H_prev = er.H;

    pick_front();
    if (opt.track_front && f.dom.kind == DomainKind::Line &&
        !std::isnan(front_unwrapped)) {
      if (front_unwrapped - f.dom.x0 < opt.boundary_guard ||
          f.dom.x1 - front_unwrapped < opt.boundary_guard)
        throw SolverError("front entered the boundary guard margin at t = " +
                          std::to_string(f.t));
    }

    if (step_in_window == steps_per_record) {
      res.records.push_back(make_record());
      step_in_window = 0;
    }
  }
  if (step_in_window != 0 || res.blew_up) res.records.push_back(make_record());
  res.field = std::move(f);
  return res;
}

VelocityFit measure_velocity(const std::vector<double>& t,
                             const std::vector<double>& x_front,
                             double discard_fraction) {
  if (t.size() != x_front.size())
    throw std::invalid_argument("mismatched history lengths");
  if (t.empty()) throw SolverError("no front samples");
  const double t0 = t.front(), t1 = t.back();
  const double cut = t0 + discard_fraction * (t1 - t0);
  std::vector<double> ts, xs;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= cut && !std::isnan(x_front[i])) {
      ts.push_back(t[i]);
      xs.push_back(x_front[i]);
    }
  }
  if (ts.size() < 10)
    throw SolverError("need at least 10 front samples after the transient "
                      "window, got " +
                      std::to_string(ts.size()));
  double mt = 0.0, mx = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    mx += xs[i];
  }
  mt /= double(ts.size());
  mx /= double(ts.size());
  double stt = 0.0, stx = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stx += (ts[i] - mt) * (xs[i] - mx);
  }
  if (stt == 0.0) throw SolverError("degenerate time window");
  VelocityFit fit;
  fit.v = stx / stt;
  fit.n_used = ts.size();
  const double b = mx - fit.v * mt;
  for (size_t i = 0; i < ts.size(); ++i)
    fit.residual =
        std::max(fit.residual, std::fabs(xs[i] - (fit.v * ts[i] + b)));
  return fit;
}

}  // namespace sgtw

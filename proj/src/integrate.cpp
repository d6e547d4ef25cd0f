#include "sgtw/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sgtw {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (5th minus embedded 4th order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kMaxStep = 5.0;
constexpr long kMaxSteps = 20'000'000;

struct Deriv {
  double dg, dgp;
};

inline Deriv rhs(const State& y, double mu, double gamma) {
  return {y.gp, -mu * y.gp - std::sin(y.g) + gamma};
}

// d^k g / dxi^k for k = 0..4 from the equation itself.
std::array<double, 5> taylor(const State& y, double mu, double gamma) {
  const double s = std::sin(y.g), c = std::cos(y.g);
  std::array<double, 5> d;
  d[0] = y.g;
  d[1] = y.gp;
  d[2] = -mu * d[1] - s + gamma;
  d[3] = -mu * d[2] - c * d[1];
  d[4] = -mu * d[3] - c * d[2] + s * d[1] * d[1];
  return d;
}

// Gauss-Legendre 10-point nodes (on [-1,1]) and weights.
constexpr double kGlx[5] = {0.1488743389816312, 0.4333953941292472,
                            0.6794095682990244, 0.8650633666889845,
                            0.9739065285171717};
constexpr double kGlw[5] = {0.2955242247147529, 0.2692667193099963,
                            0.2190863625159820, 0.1494513491505806,
                            0.0666713443086881};

}  // namespace

DenseStep::DenseStep(double xi0, double h, const State& y0, const State& y1,
                     double mu, double gamma)
    : xi0_(xi0), h_(h) {
  const auto t0 = taylor(y0, mu, gamma);
  const auto t1 = taylor(y1, mu, gamma);
  // Scaled derivatives g^(k) h^k / k! at both ends.
  double d0[5], d1[5];
  double hk = 1.0, kf = 1.0;
  for (int k = 0; k < 5; ++k) {
    d0[k] = t0[k] * hk / kf;
    d1[k] = t1[k] * hk / kf;
    hk *= h;
    kf *= (k + 1);
  }
  // Divided-difference tableau for repeated nodes {0 x5, 1 x5}.
  double tbl[10];
  for (int i = 0; i < 10; ++i) tbl[i] = (i < 5) ? d0[0] : d1[0];
  c_[0] = tbl[0];
  for (int k = 1; k < 10; ++k) {
    for (int i = 0; i + k < 10; ++i) {
      const bool left0 = (i < 5), right0 = (i + k < 5);
      if (left0 && right0)
        tbl[i] = d0[k];
      else if (!left0)
        tbl[i] = d1[k];
      else
        tbl[i] = tbl[i + 1] - tbl[i];  // node gap is exactly 1
    }
    c_[k] = tbl[0];
  }
}

void DenseStep::eval(double s, double& g, double& gp) const {
  double p0 = c_[9], p1 = 0.0;
  for (int j = 8; j >= 0; --j) {
    const double w = s - (j < 5 ? 0.0 : 1.0);
    p1 = p1 * w + p0;
    p0 = p0 * w + c_[j];
  }
  g = p0;
  gp = p1 / h_;
}

void DenseStep::eval2(double s, double& g, double& gp, double& gpp) const {
  double p0 = c_[9], p1 = 0.0, p2 = 0.0;
  for (int j = 8; j >= 0; --j) {
    const double w = s - (j < 5 ? 0.0 : 1.0);
    p2 = p2 * w + 2.0 * p1;
    p1 = p1 * w + p0;
    p0 = p0 * w + c_[j];
  }
  g = p0;
  gp = p1 / h_;
  gpp = p2 / (h_ * h_);
}

Trajectory::Trajectory(const OdeProblem& prob)
    : initial_(prob.initial), xi_front_(prob.xi0) {}

double Trajectory::xi_back() const {
  return steps_.empty() ? xi_front_ : steps_.back().xi1();
}

State Trajectory::final_state() const {
  if (steps_.empty()) return initial_;
  const DenseStep& st = steps_.back();
  State y;
  st.eval(st.s_max(), y.g, y.gp);
  return y;
}

const DenseStep& Trajectory::locate(double xi) const {
  if (steps_.empty()) throw SolverError("empty trajectory");
  const bool fwd = forward();
  // Binary search over step start positions (monotone in either direction).
  size_t lo = 0, hi = steps_.size() - 1;
  while (lo < hi) {
    const size_t mid = (lo + hi + 1) / 2;
    const bool before =
        fwd ? (steps_[mid].xi0() <= xi) : (steps_[mid].xi0() >= xi);
    if (before)
      lo = mid;
    else
      hi = mid - 1;
  }
  return steps_[lo];
}

State Trajectory::eval(double xi) const {
  const DenseStep& st = locate(xi);
  const double s = (xi - st.xi0()) / st.h();
  State y;
  st.eval(std::clamp(s, 0.0, st.s_max()), y.g, y.gp);
  return y;
}

std::array<double, 3> Trajectory::eval2(double xi) const {
  const DenseStep& st = locate(xi);
  const double s = (xi - st.xi0()) / st.h();
  std::array<double, 3> out;
  st.eval2(std::clamp(s, 0.0, st.s_max()), out[0], out[1], out[2]);
  return out;
}

std::vector<std::pair<double, State>> Trajectory::samples() const {
  std::vector<std::pair<double, State>> out;
  out.reserve(steps_.size() + 1);
  out.emplace_back(xi_front_, initial_);
  for (const DenseStep& st : steps_) {
    State y;
    st.eval(st.s_max(), y.g, y.gp);
    out.emplace_back(st.xi1(), y);
  }
  return out;
}

namespace {

struct Candidate {
  bool found = false;
  double s = 0.0;
  EventKind kind = EventKind::Horizon;
};

// Bisection for the root of a monitor on the dense interpolant.
template <typename Monitor>
double refine(const DenseStep& st, const Monitor& m, double sa, double sb,
              double tol_value) {
  double fa = m(st, sa);
  for (int it = 0; it < 60; ++it) {
    const double sm = 0.5 * (sa + sb);
    const double fm = m(st, sm);
    if (std::fabs(fm) <= tol_value && (sb - sa) < 1e-9) return sm;
    if ((fa <= 0.0) == (fm <= 0.0)) {
      sa = sm;
      fa = fm;
    } else {
      sb = sm;
    }
  }
  return 0.5 * (sa + sb);
}

// Scans one accepted step for the first stop event; s ranges over [0,1].
Candidate scan_events(const DenseStep& st, const StopSpec& stop,
                      double tol_event, bool at_start) {
  constexpr int kSub = 16;
  Candidate best;

  auto mon_level = [&stop](const DenseStep& d, double s) {
    double g, gp;
    d.eval(s, g, gp);
    return g - *stop.g_level;
  };
  auto mon_turn = [](const DenseStep& d, double s) {
    double g, gp;
    d.eval(s, g, gp);
    return gp;
  };

  double lv[kSub + 1], tv[kSub + 1];
  for (int j = 0; j <= kSub; ++j) {
    const double s = double(j) / kSub;
    double g, gp;
    st.eval(s, g, gp);
    lv[j] = stop.g_level ? g - *stop.g_level : 0.0;
    tv[j] = gp;
  }

  if (stop.g_level) {
    for (int j = 0; j < kSub; ++j) {
      // skip a zero sitting exactly at the trajectory start
      if (at_start && j == 0 && lv[0] == 0.0) continue;
      if ((lv[j] <= 0.0) != (lv[j + 1] <= 0.0) ||
          (lv[j] != 0.0 && lv[j + 1] == 0.0)) {
        const double s = refine(st, mon_level, double(j) / kSub,
                                double(j + 1) / kSub, tol_event);
        best = {true, s, EventKind::GCrossing};
        break;
      }
    }
  }
  if (stop.stop_on_turning) {
    for (int j = 0; j < kSub; ++j) {
      if (tv[j] > 0.0 && tv[j + 1] <= 0.0) {
        const double s = refine(st, mon_turn, double(j) / kSub,
                                double(j + 1) / kSub, tol_event);
        if (!best.found || s < best.s) best = {true, s, EventKind::TurningPoint};
        break;
      }
    }
  }
  return best;
}

double error_norm(const State& y0, const State& y1, const Deriv* k,
                  double h, const Tolerances& tol) {
  const double eg =
      h * (e1 * k[0].dg + e3 * k[2].dg + e4 * k[3].dg + e5 * k[4].dg +
           e6 * k[5].dg + e7 * k[6].dg);
  const double ep =
      h * (e1 * k[0].dgp + e3 * k[2].dgp + e4 * k[3].dgp + e5 * k[4].dgp +
           e6 * k[5].dgp + e7 * k[6].dgp);
  const double sg =
      tol.abs + tol.rel * std::max(std::fabs(y0.g), std::fabs(y1.g));
  const double sp =
      tol.abs + tol.rel * std::max(std::fabs(y0.gp), std::fabs(y1.gp));
  const double rg = eg / sg, rp = ep / sp;
  return std::sqrt(0.5 * (rg * rg + rp * rp));
}

double initial_step(const OdeProblem& prob, double dir,
                    const Tolerances& tol) {
  const double mu = prob.mu, gamma = prob.params.gamma;
  const State& y = prob.initial;
  const Deriv f = rhs(y, mu, gamma);
  const double sg = tol.abs + tol.rel * std::fabs(y.g);
  const double sp = tol.abs + tol.rel * std::fabs(y.gp);
  const double d0 = std::hypot(y.g / sg, y.gp / sp);
  const double d1 = std::hypot(f.dg / sg, f.dgp / sp);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, kMaxStep);
  // One Euler probe to estimate the second derivative scale.
  State y1{y.g + dir * h0 * f.dg, y.gp + dir * h0 * f.dgp};
  const Deriv f1 = rhs(y1, mu, gamma);
  const double d2 =
      std::hypot((f1.dg - f.dg) / sg, (f1.dgp - f.dgp) / sp) / h0;
  const double dmax = std::max(d1, d2);
  double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, 0.01});
}

}  // namespace

IntegrateResult integrate(const OdeProblem& prob, const StopSpec& stop,
                          const Tolerances& tol) {
  validate(prob.params);
  if (!(prob.mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  if (!(tol.rel > 0.0) || !(tol.abs > 0.0) || !(tol.event > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!std::isfinite(prob.initial.g) || !std::isfinite(prob.initial.gp))
    throw std::invalid_argument("initial state must be finite");

  const double mu = prob.mu, gamma = prob.params.gamma;
  const double span = stop.xi_end - prob.xi0;
  const double dir = (span >= 0.0) ? 1.0 : -1.0;

  IntegrateResult res;
  res.trajectory = Trajectory(prob);
  if (span == 0.0) {
    res.event = {EventKind::Horizon, prob.xi0, prob.initial};
    return res;
  }

  double xi = prob.xi0;
  State y = prob.initial;
  Deriv k[7];
  k[0] = rhs(y, mu, gamma);  // FSAL slot

  double h = dir * std::min(initial_step(prob, dir, tol),
                            std::fabs(span));
  int consecutive_rejects = 0;

  while (true) {
    if (res.n_steps + res.n_rejected > kMaxSteps)
      throw SolverError("step limit exceeded");

    bool last = false;
    if (std::fabs(h) >= std::fabs(stop.xi_end - xi)) {
      h = stop.xi_end - xi;
      last = true;
      if (h == 0.0) {
        res.event = {EventKind::Horizon, stop.xi_end, y};
        return res;
      }
    }

    // Stage evaluations.
    State t;
    t = {y.g + h * a21 * k[0].dg, y.gp + h * a21 * k[0].dgp};
    k[1] = rhs(t, mu, gamma);
    t = {y.g + h * (a31 * k[0].dg + a32 * k[1].dg),
         y.gp + h * (a31 * k[0].dgp + a32 * k[1].dgp)};
    k[2] = rhs(t, mu, gamma);
    t = {y.g + h * (a41 * k[0].dg + a42 * k[1].dg + a43 * k[2].dg),
         y.gp + h * (a41 * k[0].dgp + a42 * k[1].dgp + a43 * k[2].dgp)};
    k[3] = rhs(t, mu, gamma);
    t = {y.g + h * (a51 * k[0].dg + a52 * k[1].dg + a53 * k[2].dg +
                    a54 * k[3].dg),
         y.gp + h * (a51 * k[0].dgp + a52 * k[1].dgp + a53 * k[2].dgp +
                     a54 * k[3].dgp)};
    k[4] = rhs(t, mu, gamma);
    t = {y.g + h * (a61 * k[0].dg + a62 * k[1].dg + a63 * k[2].dg +
                    a64 * k[3].dg + a65 * k[4].dg),
         y.gp + h * (a61 * k[0].dgp + a62 * k[1].dgp + a63 * k[2].dgp +
                     a64 * k[3].dgp + a65 * k[4].dgp)};
    k[5] = rhs(t, mu, gamma);
    State y1{y.g + h * (b1 * k[0].dg + b3 * k[2].dg + b4 * k[3].dg +
                        b5 * k[4].dg + b6 * k[5].dg),
             y.gp + h * (b1 * k[0].dgp + b3 * k[2].dgp + b4 * k[3].dgp +
                         b5 * k[4].dgp + b6 * k[5].dgp)};
    k[6] = rhs(y1, mu, gamma);

    // Error-per-unit-step control: keeps the dense-output residual
    // (local error / h) proportional to the tolerance itself.
    const double err = error_norm(y, y1, k, h, tol) / std::fabs(h);

    if (err <= 1.0) {
      consecutive_rejects = 0;
      ++res.n_steps;

      DenseStep step(xi, h, y, y1, mu, gamma);
      const Candidate cand = scan_events(step, stop, tol.event,
                                         res.trajectory.empty());
      if (cand.found) {
        step.truncate(cand.s);
        State ye;
        step.eval(cand.s, ye.g, ye.gp);
        res.trajectory.push(step);
        res.event = {cand.kind, step.xi1(), ye};
        return res;
      }
      res.trajectory.push(step);
      xi = xi + h;
      y = y1;
      k[0] = k[6];  // FSAL

      if (last) {
        res.event = {EventKind::Horizon, stop.xi_end, y};
        return res;
      }
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.25), 0.2, 5.0);
      h = dir * std::min(std::fabs(h) * fac, kMaxStep);
    } else {
      ++res.n_rejected;
      ++consecutive_rejects;
      const double fac =
          std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
      h *= fac;
      if (std::fabs(h) < 1e-14 * (1.0 + std::fabs(xi)) ||
          consecutive_rejects > 200)
        throw StiffnessError("step size underflow at xi = " +
                             std::to_string(xi));
    }
  }
}

double energy_audit(const Trajectory& tr, const Params& p, double mu) {
  if (tr.empty()) throw std::invalid_argument("energy audit of empty trajectory");
  double q_min = std::numeric_limits<double>::infinity();
  double q_max = -q_min;
  double cum = 0.0;  // int gp^2 dxi from the trajectory start

  auto account = [&](double e_val) {
    const double q = e_val + mu * cum;
    q_min = std::min(q_min, q);
    q_max = std::max(q_max, q);
  };

  account(mechanical_energy(tr.initial(), p.gamma));
  for (const DenseStep& st : tr.steps()) {
    const double half = 0.5 * st.s_max();
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double s = half + sgn * half * kGlx[i];
        double g, gp;
        st.eval(s, g, gp);
        acc += kGlw[i] * gp * gp;
      }
    }
    cum += acc * half * st.h();
    State y;
    st.eval(st.s_max(), y.g, y.gp);
    account(mechanical_energy(y, p.gamma));
  }
  return q_max - q_min;
}

}  // namespace sgtw

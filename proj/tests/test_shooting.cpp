#include <cmath>

#include "doctest.h"
#include "sgtw/shooting.hpp"
#include "sgtw/unperturbed.hpp"

using namespace sgtw;

namespace {

// Independent oracle: fixed-step classical RK4 shooting at a resolution
// far below the adaptive solver's step sizes.  Classifies the fate of a
// saddle launch without any code shared with the production path.
Fate rk4_fate(double gamma, double mu, double h = 2e-4) {
  const double g_start = -M_PI - std::asin(gamma);
  const double g_target = M_PI - std::asin(gamma);
  const double lam =
      std::sqrt(0.25 * mu * mu + std::sqrt(1.0 - gamma * gamma)) - 0.5 * mu;
  const double delta = 1e-8;
  double g = g_start + delta, gp = lam * delta;
  auto f = [&](double a, double b, double& da, double& db) {
    da = b;
    db = -mu * b - std::sin(a) + gamma;
  };
  for (long i = 0; i < long(2e6); ++i) {
    double k1g, k1p, k2g, k2p, k3g, k3p, k4g, k4p;
    f(g, gp, k1g, k1p);
    f(g + 0.5 * h * k1g, gp + 0.5 * h * k1p, k2g, k2p);
    f(g + 0.5 * h * k2g, gp + 0.5 * h * k2p, k3g, k3p);
    f(g + h * k3g, gp + h * k3p, k4g, k4p);
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    gp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    if (g >= g_target) return Fate::Overshoot;
    if (gp <= 0.0) return Fate::Capture;
  }
  // overdamped capture settles into the minimum without a turning point
  if (std::fabs(g - std::asin(gamma)) < 1e-6 && std::fabs(gp) < 1e-6)
    return Fate::Capture;
  return Fate::Ambiguous;
}

}  // namespace

TEST_CASE("unstable eigenvalue of the saddle") {
  CHECK(unstable_eigenvalue({0.0, 0.0}, 0.0) == doctest::Approx(1.0));
  CHECK(unstable_eigenvalue({0.0, 0.0}, 3.0) ==
        doctest::Approx(0.30277563773199456).epsilon(1e-14));
  // root of l^2 + mu l - sqrt(1 - gamma^2)
  for (double gamma : {0.0, 0.2, 0.8})
    for (double mu : {0.0, 0.1, 1.0, 4.0}) {
      const double l = unstable_eigenvalue({gamma, 0.0}, mu);
      CHECK(l > 0.0);
      CHECK(l * l + mu * l - std::sqrt(1.0 - gamma * gamma) ==
            doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("saddle launch state") {
  const Params p{0.0, 0.0};
  const State s = launch_from_saddle(p, 0.0, 1e-8);
  CHECK(s.g == doctest::Approx(-M_PI + 1e-8));
  CHECK(s.gp == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK_THROWS_AS(launch_from_saddle(p, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(launch_from_saddle(p, 0.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(launch_from_saddle({1.0, 0.0}, 0.0, 1e-8),
                  std::invalid_argument);
}

TEST_CASE("backward integration from the launch returns to the saddle") {
  const Params p{0.1, 0.0};
  const double delta = 1e-8;
  const State s = launch_from_saddle(p, 0.05, delta);
  OdeProblem prob{p, 0.05, s, 0.0};
  StopSpec stop;
  stop.xi_end = -12.0;
  const IntegrateResult r = integrate(prob, stop);
  const double g_saddle = equilibria(p, -1).g_max;
  CHECK(std::fabs(r.event.state.g - g_saddle) <= 2.0 * delta);
}

TEST_CASE("trajectory fates") {
  const Params p{0.1, 0.0};
  CHECK(classify_fate(p, 0.0, launch_from_saddle(p, 0.0, 1e-8)).fate ==
        Fate::Overshoot);
  CHECK(classify_fate(p, 2.0, launch_from_saddle(p, 2.0, 1e-8)).fate ==
        Fate::Capture);
  const Params p0{0.0, 0.0};
  CHECK(classify_fate(p0, 0.0, launch_from_saddle(p0, 0.0, 1e-8)).fate ==
        Fate::Connection);

  // cross-check against the independent fixed-step oracle
  CHECK(rk4_fate(0.1, 0.0) == Fate::Overshoot);
  CHECK(rk4_fate(0.1, 2.0) == Fate::Capture);
}

TEST_CASE("overshoot reports the crossing, capture the turning point") {
  const Params p{0.1, 0.0};
  const FateReport over =
      classify_fate(p, 0.02, launch_from_saddle(p, 0.02, 1e-8));
  REQUIRE(over.fate == Fate::Overshoot);
  CHECK(over.crossing_speed > 0.0);
  const double g_target = equilibria(p, 0).g_max;
  const State end = over.trajectory.final_state();
  CHECK(end.g == doctest::Approx(g_target).epsilon(1e-10));

  const FateReport cap =
      classify_fate(p, 1.0, launch_from_saddle(p, 1.0, 1e-8));
  REQUIRE(cap.fate == Fate::Capture);
  CHECK(cap.crossing_speed == 0.0);
  CHECK(cap.trajectory.final_state().g < g_target);
}

TEST_CASE("kink connection viscosity") {
  SUBCASE("lowest-order law at small gamma") {
    const KinkResult kr = find_kink_mu({0.01, 0.0});
    CHECK(std::fabs(kr.mu_hat - M_PI * 0.01 / 4.0) / kr.mu_hat < 0.02);
  }
  SUBCASE("gamma = 0.1: pinned value and oracle bracket") {
    const KinkResult kr = find_kink_mu({0.1, 0.0});
    CHECK(kr.mu_hat == doctest::Approx(0.0786602702).epsilon(1e-7));
    // the independent RK4 shooter brackets the same transition
    CHECK(rk4_fate(0.1, kr.mu_hat - 1e-5) == Fate::Overshoot);
    CHECK(rk4_fate(0.1, kr.mu_hat + 1e-5) == Fate::Capture);
  }
  SUBCASE("bracket endpoints around the returned value") {
    const Params p{0.05, 0.0};
    const KinkResult kr = find_kink_mu(p, 1e-12);
    CHECK(classify_fate(p, kr.mu_hat - 1e-10,
                        launch_from_saddle(p, kr.mu_hat - 1e-10, 1e-8))
              .fate == Fate::Overshoot);
    CHECK(classify_fate(p, kr.mu_hat + 1e-10,
                        launch_from_saddle(p, kr.mu_hat + 1e-10, 1e-8))
              .fate == Fate::Capture);
  }
  SUBCASE("gamma = 0 is rejected") {
    CHECK_THROWS_AS(find_kink_mu({0.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("kink profile contract") {
  const Params p{0.1, 0.05};
  const KinkResult kr = find_kink_mu(p);
  const WaveProfile& prof = kr.profile;
  const Equilibrium eqm1 = equilibria(p, -1);
  const Equilibrium eq0 = equilibria(p, 0);

  CHECK(prof.kind == WaveKind::Kink);
  CHECK(prof.winding == 1);
  REQUIRE(prof.vel.has_value());
  CHECK(prof.vel->v ==
        doctest::Approx(velocity_from_mu(0.05, kr.mu_hat).v));

  for (const ProfileSample& s : prof.samples) {
    CHECK(s.gp > 0.0);
    CHECK(s.g >= eqm1.g_max - 1e-9);
    CHECK(s.g <= eq0.g_max + 1e-9);
  }
  CHECK(std::fabs(prof.samples.front().g - eqm1.g_max) < 1e-6);
  CHECK(std::fabs(prof.samples.back().g - eq0.g_max) < 1e-6);
  // normalization g(0) = -asin(gamma): the level is bracketed by the
  // samples around xi = 0 and the interpolant lands on it
  const double level = -std::asin(p.gamma);
  for (size_t i = 1; i < prof.samples.size(); ++i) {
    if (prof.samples[i].xi >= 0.0 && prof.samples[i - 1].xi < 0.0) {
      CHECK(prof.samples[i - 1].g <= level);
      CHECK(prof.samples[i].g >= level);
      break;
    }
  }
  CHECK(prof.eval(0.0).g == doctest::Approx(level).epsilon(2e-4));

  // energy audit on the accepted connection trajectory
  const FateReport rep =
      classify_fate(p, kr.mu_hat, launch_from_saddle(p, kr.mu_hat, 1e-8));
  const double audit = energy_audit(rep.trajectory, p, kr.mu_hat);
  const double e0 = mechanical_energy(rep.trajectory.initial(), p.gamma);
  CHECK(audit <= 1e-8 * (1.0 + std::fabs(e0)));
}

TEST_CASE("velocity consistency with the power-balance estimate") {
  const Params p{0.01, 0.05};
  const KinkResult kr = find_kink_mu(p);
  const double v_hat = velocity_from_mu(p.alpha, kr.mu_hat).v;
  const double v_inf = asymptotic_velocity(p);
  CHECK(std::fabs(v_hat - v_inf) / v_hat <= 0.02);
}

TEST_CASE("fates are translation invariant across washboard cells") {
  const Params p{0.1, 0.0};
  const double mu = 0.07;
  const State base = launch_from_saddle(p, mu, 1e-8);
  const double two_pi = 2.0 * M_PI;

  for (int cell : {0, 1, 3}) {
    OdeProblem prob{p, mu, State{base.g + two_pi * cell, base.gp}, 0.0};
    StopSpec stop;
    stop.xi_end = 1e4;
    stop.g_level = equilibria(p, cell).g_max;
    stop.stop_on_turning = true;
    const IntegrateResult r = integrate(prob, stop);
    REQUIRE(r.event.kind == EventKind::GCrossing);
    static double speed0 = 0.0;
    if (cell == 0) speed0 = r.event.state.gp;
    CHECK(r.event.state.gp == doctest::Approx(speed0).epsilon(1e-10));
  }
}

TEST_CASE("fate is monotone in mu on tested grids") {
  for (double gamma : {0.05, 0.3}) {
    const Params p{gamma, 0.0};
    const double mu_hat = find_kink_mu(p, 1e-11).mu_hat;
    for (double f : {0.2, 0.6, 0.999})
      CHECK(classify_fate(p, f * mu_hat,
                          launch_from_saddle(p, f * mu_hat, 1e-8))
                .fate == Fate::Overshoot);
    for (double f : {1.001, 1.5, 4.0, 20.0})
      CHECK(classify_fate(p, f * mu_hat,
                          launch_from_saddle(p, f * mu_hat, 1e-8))
                .fate == Fate::Capture);
  }
}

TEST_CASE("array shooting") {
  SUBCASE("gamma = 0 reduces to the free rotation") {
    const ArrayResult ar = find_array_mu({0.0, 0.0}, 2.0);
    CHECK(ar.mu_check == doctest::Approx(0.0));
    // e = gp0^2/2 + U(-pi) = 3
    CHECK(ar.Xi == doctest::Approx(rotation_period(3.0)).epsilon(1e-9));
    CHECK_FALSE(ar.profile.vel.has_value());  // free velocity family
  }
  SUBCASE("gamma = 0.1, gp0 = 1: pinned values and boundary conditions") {
    const Params p{0.1, 0.0};
    const ArrayResult ar = find_array_mu(p, 1.0);
    CHECK(ar.mu_check == doctest::Approx(0.0596623649).epsilon(1e-6));
    CHECK(ar.Xi == doctest::Approx(4.0422738712).epsilon(1e-6));
    const Equilibrium eqm1 = equilibria(p, -1);
    const Equilibrium eq0 = equilibria(p, 0);
    CHECK(ar.profile.samples.front().g == doctest::Approx(eqm1.g_max));
    CHECK(ar.profile.samples.front().gp == doctest::Approx(1.0));
    CHECK(ar.profile.samples.back().g ==
          doctest::Approx(eq0.g_max).epsilon(1e-10));
    CHECK(ar.profile.samples.back().gp ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*ar.profile.period == doctest::Approx(ar.Xi));
    CHECK(ar.profile.winding == 1);
  }
  SUBCASE("second period reproduces the first, shifted by 2 pi") {
    const Params p{0.1, 0.0};
    const ArrayResult ar = find_array_mu(p, 1.0);
    const ProfileSample& s1 = ar.profile.samples.back();
    OdeProblem prob{p, ar.mu_check, State{s1.g, s1.gp}, 0.0};
    StopSpec stop;
    stop.xi_end = ar.Xi;
    const IntegrateResult r =
        integrate(prob, stop, Tolerances{1e-12, 1e-14, 1e-13});
    double sup = 0.0;
    for (const ProfileSample& smp : ar.profile.samples)
      sup = std::max(sup, std::fabs(r.trajectory.eval(smp.xi).g - smp.g -
                                    2.0 * M_PI));
    CHECK(sup <= 1e-8);
  }
  SUBCASE("gp0 = 0 is rejected towards the kink solver") {
    CHECK_THROWS_AS(find_array_mu({0.1, 0.0}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("period inversion") {
  const Params p{0.1, 0.0};
  const ArrayResult ar = find_array_mu(p, 1.0);
  const double gp0 = period_to_speed(p, ar.Xi);
  CHECK(gp0 == doctest::Approx(1.0).epsilon(1e-8));

  // monotone table: recorded empirically, Xi decreases with gp0
  double prev = 1e300;
  for (double g : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double Xi = find_array_mu(p, g).Xi;
    CHECK(Xi < prev);
    prev = Xi;
  }
  CHECK_THROWS_AS(period_to_speed(p, 1e6), SolverError);
}

TEST_CASE("half-array approaches the array orbit") {
  const Params p{0.1, 0.0};
  const HalfArrayResult ha = half_array_profile(p, 1.0, 200.0);
  CHECK(ha.profile.kind == WaveKind::HalfArray);
  REQUIRE(ha.distance.size() > 10);
  // eventually decreasing, below 1e-4 at the horizon
  const double d_end = ha.distance.back().second;
  CHECK(d_end < 1e-4);
  double d_mid = 0.0;
  for (const auto& [xi, d] : ha.distance)
    if (xi <= 100.0) d_mid = d;
  CHECK(d_end < d_mid);
}

TEST_CASE("half-array winding grows one turn per period asymptotically") {
  const Params p{0.1, 0.0};
  const HalfArrayResult ha = half_array_profile(p, 1.0, 200.0);
  const double k = 10.0;
  const State a = ha.profile.eval(200.0 - k * ha.Xi);
  const State b = ha.profile.eval(200.0);
  CHECK(std::fabs(b.g - a.g - 2.0 * M_PI * k) < 1e-2);
}

TEST_CASE("half-array degenerates on the unperturbed separatrix") {
  // gamma = 0: the launch at mu = 0 is the separatrix, which creeps into
  // the far saddle instead of approaching the rotational orbit; the
  // solver reports this as a capture failure rather than asserting a
  // half-array that is not there
  const Params p{0.0, 0.0};
  CHECK_THROWS_AS(half_array_profile(p, 1.0, 80.0), SolverError);
}

TEST_CASE("mu_hat sweep") {
  const std::vector<SweepRow> rows =
      sweep_mu_hat({0.02, 0.01, 0.005}, 0.05, 1e-13);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].gamma < rows[1].gamma);

  // single row equals a direct solve
  const KinkResult direct = find_kink_mu({0.01, 0.05});
  CHECK(rows[1].mu_hat == doctest::Approx(direct.mu_hat).epsilon(1e-12));

  // mu_hat strictly increasing in gamma
  CHECK(rows[0].mu_hat < rows[1].mu_hat);
  CHECK(rows[1].mu_hat < rows[2].mu_hat);

  // linear extrapolation of the ratio to gamma -> 0 recovers pi/4
  const double r0 = rows[0].ratio, r1 = rows[1].ratio, r2 = rows[2].ratio;
  // least-squares intercept over the three points
  const double sx = rows[0].gamma + rows[1].gamma + rows[2].gamma;
  const double sy = r0 + r1 + r2;
  const double sxx = rows[0].gamma * rows[0].gamma +
                     rows[1].gamma * rows[1].gamma +
                     rows[2].gamma * rows[2].gamma;
  const double sxy = rows[0].gamma * r0 + rows[1].gamma * r1 +
                     rows[2].gamma * r2;
  const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / 3.0;
  CHECK(std::fabs(intercept - M_PI / 4.0) / (M_PI / 4.0) < 0.005);

  // failed rows are recorded, the sweep continues
  const std::vector<SweepRow> with_bad = sweep_mu_hat({0.01, 0.0}, 0.0);
  CHECK_FALSE(with_bad[0].ok);  // gamma = 0 row fails
  CHECK(with_bad[1].ok);
}

TEST_CASE("reflection produces the antikink convention") {
  const KinkResult kr = find_kink_mu({0.05, 0.1});
  const WaveProfile anti = kr.profile.reflected();
  CHECK(anti.kind == WaveKind::Antikink);
  CHECK(anti.winding == -1);
  CHECK(anti.sign == -1);
  REQUIRE(anti.vel.has_value());
  CHECK(anti.vel->v == doctest::Approx(-kr.profile.vel->v));
  for (size_t i = 1; i < anti.samples.size(); ++i)
    CHECK(anti.samples[i].xi > anti.samples[i - 1].xi);
}

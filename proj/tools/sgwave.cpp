// sgwave: command-line front end for the travelling-wave solver suite of
// the damped driven sine-Gordon equation
//
//   phi_tt - phi_xx + sin(phi) + alpha phi_t + gamma = 0.
//
// Subcommands cover the reduced-equation solvers (equilibria, periods,
// kink-mu, kink-profile, array, half-array, pair, sweep) and the direct
// PDE verification runs (pde-run).  Every run writes a manifest JSON
// beside its data artifact with everything needed to reproduce it.
//
// Exit codes: 0 success, 2 validation error, 3 solver failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgtw/io.hpp"
#include "sgtw/pde.hpp"
#include "sgtw/shooting.hpp"
#include "sgtw/unperturbed.hpp"

using nlohmann::ordered_json;
using namespace sgtw;

namespace {

// Binds CLI options to config-file keys ("<subcommand>.<flag>") so file
// values fill in anything not given on the command line.
class OptBinder {
 public:
  void bind(CLI::Option* opt, std::string key, double* v) {
    entries_.push_back({std::move(key), opt,
                        [v](const std::string& s) { *v = std::stod(s); },
                        [v] { return format_double(*v); }});
  }
  void bind(CLI::Option* opt, std::string key, int* v) {
    entries_.push_back({std::move(key), opt,
                        [v](const std::string& s) { *v = std::stoi(s); },
                        [v] { return std::to_string(*v); }});
  }
  void bind(CLI::Option* opt, std::string key, std::string* v) {
    entries_.push_back({std::move(key), opt,
                        [v](const std::string& s) { *v = s; },
                        [v] { return *v; }});
  }

  void collect_keys(std::vector<std::string>& keys) const {
    for (const auto& e : entries_) keys.push_back(e.key);
  }

  void apply(const std::map<std::string, std::string>& cfg) const {
    for (const auto& e : entries_) {
      if (e.opt->count() > 0) continue;  // flags override config
      const auto it = cfg.find(e.key);
      if (it == cfg.end()) continue;
      try {
        e.set(it->second);
      } catch (const std::exception&) {
        throw std::invalid_argument("config value for '" + e.key +
                                    "' is not parseable: " + it->second);
      }
    }
  }

  ordered_json resolved() const {
    ordered_json j;
    for (const auto& e : entries_) j[short_name(e.key)] = e.get();
    return j;
  }

 private:
  static std::string short_name(const std::string& key) {
    const auto dot = key.find('.');
    return (dot == std::string::npos) ? key : key.substr(dot + 1);
  }
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
  };
  std::vector<Entry> entries_;
};

std::string default_out(const std::string& name) {
  if (const char* dir = std::getenv("SGWAVE_OUT_DIR"))
    return std::string(dir) + "/" + name;
  return name;
}

struct Ctx {
  std::string config_path;
  std::map<std::string, std::string> config;
  std::vector<std::string> known_keys;
  std::chrono::steady_clock::time_point t0 =
      std::chrono::steady_clock::now();

  void load_config() {
    if (config_path.empty()) return;
    config = parse_config(read_file(config_path), known_keys);
  }

  void write_manifest(const std::string& command, const OptBinder& binder,
                      const Params& p, bool mirrored,
                      const ordered_json& derived,
                      const std::vector<std::string>& outputs) const {
    ordered_json m;
    m["tool"] = "sgwave";
    m["version"] = kToolVersion;
    m["format_version"] = kFormatVersion;
    m["command"] = command;
    m["params"] = {{"gamma", p.gamma}, {"alpha", p.alpha}};
    if (mirrored) m["params"]["mirrored"] = true;
    m["options"] = binder.resolved();
    m["derived"] = derived;
    m["outputs"] = outputs;
    m["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (outputs.empty()) return;
    write_file(outputs.front() + ".manifest.json", m.dump(2) + "\n");
  }
};

// gamma < 0 is folded to gamma > 0 by the phi -> -phi symmetry; outputs
// are then for the mirrored field.
bool normalize_gamma(double& gamma) {
  if (gamma >= 0.0) return false;
  gamma = -gamma;
  std::cerr << "note: gamma < 0 mapped to " << gamma
            << " via phi -> -phi; outputs describe the mirrored field\n";
  return true;
}

void emit_profile_artifact(const WaveProfile& prof, const std::string& path,
                           const std::string& format) {
  if (format == "csv")
    write_file(path, profile_csv(prof));
  else
    write_file(path, profile_json(prof));
}

ordered_json velocity_block(const RunResult& rr, double transient,
                            std::optional<double> v_predicted) {
  ordered_json v;
  std::vector<double> ts, xs;
  for (const DiagRecord& r : rr.records) {
    ts.push_back(r.t);
    xs.push_back(r.x_front);
  }
  try {
    const VelocityFit fit = measure_velocity(ts, xs, transient);
    v["v_measured"] = fit.v;
    v["fit_residual"] = fit.residual;
    v["n_used"] = fit.n_used;
  } catch (const std::exception& ex) {
    v["v_measured"] = nullptr;
    v["note"] = ex.what();
  }
  if (v_predicted)
    v["v_predicted"] = *v_predicted;
  else
    v["v_predicted"] = nullptr;
  v["transient_fraction"] = transient;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sgwave: exact travelling waves of the damped driven sine-Gordon "
      "equation (kinks, soliton arrays, half-arrays, bounded pairs) and "
      "their direct PDE verification"};
  app.require_subcommand(1);

  Ctx ctx;
  app.add_option("--config", ctx.config_path,
                 "flat key = value config file (keys like pde-run.dx); "
                 "command-line flags override it");

  std::function<void()> runner;

  // ---------------------------------------------------------- equilibria
  {
    auto* sub = app.add_subcommand(
        "equilibria",
        "positions and potential values of the k-th washboard extrema");
    auto o = std::make_shared<OptBinder>();
    auto gamma = std::make_shared<double>(0.0);
    auto k = std::make_shared<int>(0);
    auto out = std::make_shared<std::string>(default_out("equilibria.csv"));
    auto format = std::make_shared<std::string>("csv");
    o->bind(sub->add_option("--gamma", *gamma, "forcing, in [0, 1)"),
            "equilibria.gamma", gamma.get());
    o->bind(sub->add_option("--k", *k, "well index"), "equilibria.k",
            k.get());
    o->bind(sub->add_option("--out", *out, "artifact path"),
            "equilibria.out", out.get());
    o->bind(sub->add_option("--format", *format, "csv or json"),
            "equilibria.format", format.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, gamma, k, out, format] {
      runner = [&, o, gamma, k, out, format] {
        o->apply(ctx.config);
        const bool mirrored = normalize_gamma(*gamma);
        const Params p{*gamma, 0.0};
        const Equilibrium eq = equilibria(p, *k);
        std::string body;
        if (*format == "csv") {
          body = "k,g_min,g_max,u_min,u_max\n" + std::to_string(eq.k) + "," +
                 format_double(eq.g_min) + "," + format_double(eq.g_max) +
                 "," + format_double(eq.u_min) + "," +
                 format_double(eq.u_max) + "\n";
        } else {
          ordered_json j{{"k", eq.k},
                         {"g_min", eq.g_min},
                         {"g_max", eq.g_max},
                         {"u_min", eq.u_min},
                         {"u_max", eq.u_max}};
          body = j.dump(2) + "\n";
        }
        write_file(*out, body);
        ctx.write_manifest("equilibria", *o, p, mirrored,
                           {{"g_min", eq.g_min}, {"g_max", eq.g_max}},
                           {*out});
      };
    });
  }

  // ------------------------------------------------------------- periods
  {
    auto* sub = app.add_subcommand(
        "periods", "pendulum period at mechanical energy e (libration or "
                   "rotation of the unperturbed reduction)");
    auto o = std::make_shared<OptBinder>();
    auto e = std::make_shared<double>(0.0);
    auto out = std::make_shared<std::string>(default_out("periods.json"));
    auto format = std::make_shared<std::string>("json");
    o->bind(sub->add_option("--e", *e, "mechanical energy, > -1"),
            "periods.e", e.get());
    o->bind(sub->add_option("--out", *out, "artifact path"), "periods.out",
            out.get());
    o->bind(sub->add_option("--format", *format, "csv or json"),
            "periods.format", format.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, e, out, format] {
      runner = [&, o, e, out, format] {
        o->apply(ctx.config);
        const PendulumOrbit orbit = classify_orbit(*e);
        const char* regime =
            orbit.regime == PendulumRegime::Libration    ? "libration"
            : orbit.regime == PendulumRegime::Separatrix ? "separatrix"
                                                         : "rotation";
        std::string body;
        if (*format == "csv") {
          body = "e,regime,period\n" + format_double(*e) + "," + regime +
                 "," +
                 (orbit.period ? format_double(*orbit.period) : "inf") +
                 "\n";
        } else {
          ordered_json j{{"e", *e}, {"regime", regime}};
          if (orbit.period)
            j["period"] = *orbit.period;
          else
            j["period"] = nullptr;
          body = j.dump(2) + "\n";
        }
        write_file(*out, body);
        ordered_json derived;
        if (orbit.period) derived["period"] = *orbit.period;
        ctx.write_manifest("periods", *o, Params{}, false, derived, {*out});
      };
    });
  }

  // ------------------------------------------------------------- kink-mu
  {
    auto* sub = app.add_subcommand(
        "kink-mu", "bisect the saddle-connection viscosity mu_hat(gamma) "
                   "and report the predicted kink velocity");
    auto o = std::make_shared<OptBinder>();
    auto gamma = std::make_shared<double>(0.01);
    auto alpha = std::make_shared<double>(0.0);
    auto tol = std::make_shared<double>(1e-13);
    auto delta = std::make_shared<double>(1e-8);
    auto horizon = std::make_shared<double>(1e4);
    auto out = std::make_shared<std::string>(default_out("kink-mu.json"));
    o->bind(sub->add_option("--gamma", *gamma, "forcing, in (0, 1)"),
            "kink-mu.gamma", gamma.get());
    o->bind(sub->add_option("--alpha", *alpha, "dissipation, >= 0"),
            "kink-mu.alpha", alpha.get());
    o->bind(sub->add_option("--tol", *tol, "mu bracket width, >= 1e-13"),
            "kink-mu.tol", tol.get());
    o->bind(sub->add_option("--delta", *delta, "saddle launch offset"),
            "kink-mu.delta", delta.get());
    o->bind(sub->add_option("--horizon", *horizon, "xi budget per shot"),
            "kink-mu.horizon", horizon.get());
    o->bind(sub->add_option("--out", *out, "artifact path"), "kink-mu.out",
            out.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, gamma, alpha, tol, delta, horizon, out] {
      runner = [&, o, gamma, alpha, tol, delta, horizon, out] {
        o->apply(ctx.config);
        const bool mirrored = normalize_gamma(*gamma);
        const Params p{*gamma, *alpha};
        ShootOptions so;
        so.delta = *delta;
        so.horizon = *horizon;
        const KinkResult kr = find_kink_mu(p, *tol, so);
        const VelocityMap vm = velocity_from_mu(*alpha, kr.mu_hat);
        const double v_inf = asymptotic_velocity(p);
        ordered_json j{{"mu_hat", kr.mu_hat},
                       {"v_hat", vm.v},
                       {"luminal", vm.luminal},
                       {"v_inf", v_inf},
                       {"iterations", kr.iterations},
                       {"ratio", kr.mu_hat / p.gamma}};
        write_file(*out, j.dump(2) + "\n");
        ctx.write_manifest("kink-mu", *o, p, mirrored,
                           {{"mu_hat", kr.mu_hat}, {"v_hat", vm.v}},
                           {*out});
      };
    });
  }

  // -------------------------------------------------------- kink-profile
  {
    auto* sub = app.add_subcommand(
        "kink-profile", "normalized kink (or antikink) profile; gamma = 0 "
                        "emits the closed-form unperturbed kink");
    auto o = std::make_shared<OptBinder>();
    auto gamma = std::make_shared<double>(0.01);
    auto alpha = std::make_shared<double>(0.0);
    auto tol = std::make_shared<double>(1e-13);
    auto delta = std::make_shared<double>(1e-8);
    auto horizon = std::make_shared<double>(1e4);
    auto sign = std::make_shared<int>(1);
    auto half_span = std::make_shared<double>(20.0);
    auto samples = std::make_shared<int>(801);
    auto out =
        std::make_shared<std::string>(default_out("kink-profile.csv"));
    auto format = std::make_shared<std::string>("csv");
    o->bind(sub->add_option("--gamma", *gamma, "forcing, in [0, 1)"),
            "kink-profile.gamma", gamma.get());
    o->bind(sub->add_option("--alpha", *alpha, "dissipation"),
            "kink-profile.alpha", alpha.get());
    o->bind(sub->add_option("--tol", *tol, "mu bracket width"),
            "kink-profile.tol", tol.get());
    o->bind(sub->add_option("--delta", *delta, "saddle launch offset"),
            "kink-profile.delta", delta.get());
    o->bind(sub->add_option("--horizon", *horizon, "xi budget per shot"),
            "kink-profile.horizon", horizon.get());
    o->bind(sub->add_option("--sign", *sign, "+1 kink, -1 antikink"),
            "kink-profile.sign", sign.get());
    o->bind(sub->add_option("--half-span", *half_span,
                            "sample range for the gamma = 0 closed form"),
            "kink-profile.half-span", half_span.get());
    o->bind(sub->add_option("--samples", *samples,
                            "sample count for the gamma = 0 closed form"),
            "kink-profile.samples", samples.get());
    o->bind(sub->add_option("--out", *out, "artifact path"),
            "kink-profile.out", out.get());
    o->bind(sub->add_option("--format", *format, "csv or json"),
            "kink-profile.format", format.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, gamma, alpha, tol, delta, horizon, sign, half_span,
                   samples, out, format] {
      runner = [&, o, gamma, alpha, tol, delta, horizon, sign, half_span,
                samples, out, format] {
        o->apply(ctx.config);
        const bool mirrored = normalize_gamma(*gamma);
        const Params p{*gamma, *alpha};
        validate(p);
        WaveProfile prof;
        ordered_json derived;
        if (p.gamma == 0.0) {
          prof = unperturbed_kink_profile(*half_span, *samples, *sign);
          prof.alpha = p.alpha;
        } else {
          ShootOptions so;
          so.delta = *delta;
          so.horizon = *horizon;
          const KinkResult kr = find_kink_mu(p, *tol, so);
          prof = (*sign == -1) ? kr.profile.reflected() : kr.profile;
          derived["mu_hat"] = kr.mu_hat;
          if (prof.vel) derived["v"] = prof.vel->v;
        }
        emit_profile_artifact(prof, *out, *format);
        ctx.write_manifest("kink-profile", *o, p, mirrored, derived,
                           {*out});
      };
    });
  }

  // --------------------------------------------------------------- array
  {
    auto* sub = app.add_subcommand(
        "array", "soliton-array profile: periodic orbit with "
                 "g(xi + Xi) = g(xi) + 2 pi, selected by gp0 or by period");
    auto o = std::make_shared<OptBinder>();
    auto gamma = std::make_shared<double>(0.1);
    auto alpha = std::make_shared<double>(0.0);
    auto gp0 = std::make_shared<double>(1.0);
    auto period = std::make_shared<double>(0.0);
    auto tol = std::make_shared<double>(1e-10);
    auto horizon = std::make_shared<double>(1e4);
    auto out = std::make_shared<std::string>(default_out("array.csv"));
    auto format = std::make_shared<std::string>("csv");
    o->bind(sub->add_option("--gamma", *gamma, "forcing, in [0, 1)"),
            "array.gamma", gamma.get());
    o->bind(sub->add_option("--alpha", *alpha, "dissipation"),
            "array.alpha", alpha.get());
    o->bind(sub->add_option("--gp0", *gp0, "speed at the saddle, > 0"),
            "array.gp0", gp0.get());
    o->bind(sub->add_option("--period", *period,
                            "target period Xi (> 0 inverts Xi(gp0) and "
                            "overrides --gp0)"),
            "array.period", period.get());
    o->bind(sub->add_option("--tol", *tol, "shooting residual tolerance"),
            "array.tol", tol.get());
    o->bind(sub->add_option("--horizon", *horizon, "xi budget per shot"),
            "array.horizon", horizon.get());
    o->bind(sub->add_option("--out", *out, "artifact path"), "array.out",
            out.get());
    o->bind(sub->add_option("--format", *format, "csv or json"),
            "array.format", format.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, gamma, alpha, gp0, period, tol, horizon, out,
                   format] {
      runner = [&, o, gamma, alpha, gp0, period, tol, horizon, out,
                format] {
        o->apply(ctx.config);
        const bool mirrored = normalize_gamma(*gamma);
        const Params p{*gamma, *alpha};
        ShootOptions so;
        so.horizon = *horizon;
        double gp0_used = *gp0;
        if (*period > 0.0) gp0_used = period_to_speed(p, *period, 1e-8, so);
        const ArrayResult ar = find_array_mu(p, gp0_used, *tol, so);
        emit_profile_artifact(ar.profile, *out, *format);
        ordered_json derived{{"mu_check", ar.mu_check},
                             {"Xi", ar.Xi},
                             {"gp0", gp0_used}};
        if (ar.profile.vel) derived["v"] = ar.profile.vel->v;
        ctx.write_manifest("array", *o, p, mirrored, derived, {*out});
      };
    });
  }

  // ---------------------------------------------------------- half-array
  {
    auto* sub = app.add_subcommand(
        "half-array", "saddle-to-array orbit (evidence-grade): profile "
                      "plus phase-space distance to the array orbit");
    auto o = std::make_shared<OptBinder>();
    auto gamma = std::make_shared<double>(0.1);
    auto alpha = std::make_shared<double>(0.0);
    auto gp0 = std::make_shared<double>(1.0);
    auto horizon = std::make_shared<double>(200.0);
    auto out = std::make_shared<std::string>(default_out("half-array.csv"));
    auto format = std::make_shared<std::string>("csv");
    o->bind(sub->add_option("--gamma", *gamma, "forcing, in (0, 1)"),
            "half-array.gamma", gamma.get());
    o->bind(sub->add_option("--alpha", *alpha, "dissipation"),
            "half-array.alpha", alpha.get());
    o->bind(sub->add_option("--gp0", *gp0, "array speed at the saddle"),
            "half-array.gp0", gp0.get());
    o->bind(sub->add_option("--horizon", *horizon, "integration span"),
            "half-array.horizon", horizon.get());
    o->bind(sub->add_option("--out", *out, "artifact path"),
            "half-array.out", out.get());
    o->bind(sub->add_option("--format", *format, "csv or json"),
            "half-array.format", format.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, gamma, alpha, gp0, horizon, out, format] {
      runner = [&, o, gamma, alpha, gp0, horizon, out, format] {
        o->apply(ctx.config);
        const bool mirrored = normalize_gamma(*gamma);
        const Params p{*gamma, *alpha};
        const HalfArrayResult ha = half_array_profile(p, *gp0, *horizon);
        emit_profile_artifact(ha.profile, *out, *format);
        std::string dist = "xi,distance\n";
        for (const auto& [xi, d] : ha.distance)
          dist += format_double(xi) + "," + format_double(d) + "\n";
        const std::string dist_path = *out + ".distance.csv";
        write_file(dist_path, dist);
        ordered_json derived{{"mu_check", ha.mu_check},
                             {"Xi", ha.Xi},
                             {"final_distance", ha.distance.back().second},
                             {"evidence_grade", true}};
        ctx.write_manifest("half-array", *o, p, mirrored, derived,
                           {*out, dist_path});
      };
    });
  }

  // ---------------------------------------------------------------- pair
  {
    auto* sub = app.add_subcommand(
        "pair", "bounded soliton-antisoliton pair: the mu = 0 homoclinic "
                "orbit at the saddle energy");
    auto o = std::make_shared<OptBinder>();
    auto gamma = std::make_shared<double>(0.1);
    auto alpha = std::make_shared<double>(0.0);
    auto samples = std::make_shared<int>(801);
    auto out = std::make_shared<std::string>(default_out("pair.csv"));
    auto format = std::make_shared<std::string>("csv");
    o->bind(sub->add_option("--gamma", *gamma, "forcing, in (0, 1)"),
            "pair.gamma", gamma.get());
    o->bind(sub->add_option("--alpha", *alpha,
                            "dissipation (alpha > 0 pins v = 0)"),
            "pair.alpha", alpha.get());
    o->bind(sub->add_option("--samples", *samples, "sample count"),
            "pair.samples", samples.get());
    o->bind(sub->add_option("--out", *out, "artifact path"), "pair.out",
            out.get());
    o->bind(sub->add_option("--format", *format, "csv or json"),
            "pair.format", format.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, gamma, alpha, samples, out, format] {
      runner = [&, o, gamma, alpha, samples, out, format] {
        o->apply(ctx.config);
        const bool mirrored = normalize_gamma(*gamma);
        const Params p{*gamma, *alpha};
        const WaveProfile prof =
            bounded_pair_profile(p.gamma, *samples, p.alpha);
        emit_profile_artifact(prof, *out, *format);
        ctx.write_manifest(
            "pair", *o, p, mirrored,
            {{"turning_point", bounded_pair_turning_point(p.gamma)}},
            {*out});
      };
    });
  }

  // ------------------------------------------------------------- pde-run
  {
    auto* sub = app.add_subcommand(
        "pde-run", "direct finite-difference run of the PDE from a "
                   "solver-built initial profile; emits diagnostics JSON "
                   "and optional field snapshots");
    auto o = std::make_shared<OptBinder>();
    auto kind = std::make_shared<std::string>("kink");
    auto gamma = std::make_shared<double>(0.01);
    auto alpha = std::make_shared<double>(0.05);
    auto v = std::make_shared<double>(0.0);
    auto gp0 = std::make_shared<double>(1.0);
    auto m = std::make_shared<int>(1);
    auto x0 = std::make_shared<double>(-40.0);
    auto x1 = std::make_shared<double>(40.0);
    auto dx = std::make_shared<double>(0.05);
    auto dt = std::make_shared<double>(0.04);
    auto t_end = std::make_shared<double>(200.0);
    auto record_dt = std::make_shared<double>(1.0);
    auto center = std::make_shared<double>(0.0);
    auto guard = std::make_shared<double>(10.0);
    auto transient = std::make_shared<double>(0.2);
    auto snapshot_every = std::make_shared<double>(0.0);
    auto tol = std::make_shared<double>(1e-13);
    auto half_span = std::make_shared<double>(20.0);
    auto samples = std::make_shared<int>(1601);
    auto out = std::make_shared<std::string>(default_out("pde-run.json"));
    o->bind(sub->add_option("--kind", *kind,
                            "kink | unperturbed-kink | array | pair"),
            "pde-run.kind", kind.get());
    o->bind(sub->add_option("--gamma", *gamma, "forcing"), "pde-run.gamma",
            gamma.get());
    o->bind(sub->add_option("--alpha", *alpha, "dissipation"),
            "pde-run.alpha", alpha.get());
    o->bind(sub->add_option("--v", *v,
                            "velocity for free-parameter profiles"),
            "pde-run.v", v.get());
    o->bind(sub->add_option("--gp0", *gp0, "array saddle speed"),
            "pde-run.gp0", gp0.get());
    o->bind(sub->add_option("--m", *m, "array periods on the circle"),
            "pde-run.m", m.get());
    o->bind(sub->add_option("--x0", *x0, "line domain left end"),
            "pde-run.x0", x0.get());
    o->bind(sub->add_option("--x1", *x1, "line domain right end"),
            "pde-run.x1", x1.get());
    o->bind(sub->add_option("--dx", *dx, "grid spacing"), "pde-run.dx",
            dx.get());
    o->bind(sub->add_option("--dt", *dt, "time step (<= 0.9 dx)"),
            "pde-run.dt", dt.get());
    o->bind(sub->add_option("--t-end", *t_end, "run length"),
            "pde-run.t-end", t_end.get());
    o->bind(sub->add_option("--record-dt", *record_dt,
                            "diagnostics cadence"),
            "pde-run.record-dt", record_dt.get());
    o->bind(sub->add_option("--center", *center, "profile placement"),
            "pde-run.center", center.get());
    o->bind(sub->add_option("--guard", *guard,
                            "front-to-boundary abort margin"),
            "pde-run.guard", guard.get());
    o->bind(sub->add_option("--transient", *transient,
                            "fraction of the run discarded before the "
                            "velocity fit"),
            "pde-run.transient", transient.get());
    o->bind(sub->add_option("--snapshot-every", *snapshot_every,
                            "field snapshot cadence (0 = off)"),
            "pde-run.snapshot-every", snapshot_every.get());
    o->bind(sub->add_option("--tol", *tol, "kink solver tolerance"),
            "pde-run.tol", tol.get());
    o->bind(sub->add_option("--half-span", *half_span,
                            "unperturbed profile sample range"),
            "pde-run.half-span", half_span.get());
    o->bind(sub->add_option("--samples", *samples,
                            "unperturbed / pair profile sample count"),
            "pde-run.samples", samples.get());
    o->bind(sub->add_option("--out", *out, "diagnostics artifact path"),
            "pde-run.out", out.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, kind, gamma, alpha, v, gp0, m, x0, x1, dx, dt,
                   t_end, record_dt, center, guard, transient,
                   snapshot_every, tol, half_span, samples, out] {
      runner = [&, o, kind, gamma, alpha, v, gp0, m, x0, x1, dx, dt, t_end,
                record_dt, center, guard, transient, snapshot_every, tol,
                half_span, samples, out] {
        o->apply(ctx.config);
        const bool mirrored = normalize_gamma(*gamma);
        const Params p{*gamma, *alpha};
        validate(p);

        WaveProfile prof;
        std::optional<double> v_choice;
        std::optional<double> v_predicted;
        DomainSpec dom{DomainKind::Line, *x0, *x1, *dx};
        ordered_json derived;

        if (*kind == "kink") {
          if (p.gamma == 0.0)
            throw std::invalid_argument(
                "kind 'kink' needs gamma > 0; use 'unperturbed-kink'");
          const KinkResult kr = find_kink_mu(p, *tol);
          prof = kr.profile;
          derived["mu_hat"] = kr.mu_hat;
          if (prof.vel) v_predicted = prof.vel->v;
        } else if (*kind == "unperturbed-kink") {
          prof = unperturbed_kink_profile(*half_span, *samples);
          v_choice = *v;
          v_predicted = *v;
        } else if (*kind == "pair") {
          prof = bounded_pair_profile(p.gamma, *samples, p.alpha);
          if (!prof.vel) v_choice = *v;
          v_predicted = prof.vel ? prof.vel->v : *v;
        } else if (*kind == "array") {
          const ArrayResult ar = find_array_mu(p, *gp0);
          prof = ar.profile;
          derived["mu_check"] = ar.mu_check;
          derived["Xi"] = ar.Xi;
          double v_used;
          if (prof.vel) {
            v_used = prof.vel->v;
          } else {
            v_choice = *v;  // unperturbed array: free parameter
            v_used = *v;
          }
          v_predicted = v_used;
          const double lorentz = std::sqrt(1.0 - v_used * v_used);
          const double L = *m * ar.Xi * lorentz;
          const long cells = std::max(8L, std::lround(L / *dx));
          dom = DomainSpec{DomainKind::Circle, 0.0, L, L / double(cells)};
          derived["circumference"] = L;
        } else {
          throw std::invalid_argument("unknown --kind: " + *kind);
        }

        Field f = init_from_profile(prof, dom, *center, v_choice);
        RunOptions opt;
        opt.t_end = *t_end;
        opt.dt = *dt;
        opt.record_dt = *record_dt;
        opt.boundary_guard = *guard;

        std::vector<std::string> outputs{*out};
        RunResult total;
        if (*snapshot_every > 0.0) {
          double next = *snapshot_every;
          int idx = 0;
          Field cur = std::move(f);
          while (true) {
            RunOptions seg = opt;
            seg.t_end = std::min(next, *t_end);
            RunResult rr = run(std::move(cur), p, seg);
            const size_t skip = total.records.empty() ? 0 : 1;
            total.records.insert(total.records.end(),
                                 rr.records.begin() + skip,
                                 rr.records.end());
            total.n_steps += rr.n_steps;
            total.max_step_residual =
                std::max(total.max_step_residual, rr.max_step_residual);
            total.blew_up = rr.blew_up;
            total.blowup_t = rr.blowup_t;
            cur = std::move(rr.field);
            const std::string snap =
                *out + ".t" + std::to_string(++idx) + ".csv";
            write_file(snap, field_csv(cur, p));
            outputs.push_back(snap);
            if (total.blew_up || seg.t_end >= *t_end) break;
            next += *snapshot_every;
          }
          total.field = std::move(cur);
        } else {
          total = run(std::move(f), p, opt);
        }

        ordered_json j = diagnostics_jobj(total, p);
        j["velocity"] = velocity_block(total, *transient, v_predicted);
        j["kind"] = *kind;
        write_file(*out, j.dump(2) + "\n");
        derived["v_measured"] = j["velocity"]["v_measured"];
        ctx.write_manifest("pde-run", *o, p, mirrored, derived, outputs);
        if (total.blew_up)
          throw SolverError("field blew up at t = " +
                            std::to_string(total.blowup_t));
      };
    });
  }

  // --------------------------------------------------------------- sweep
  {
    auto* sub = app.add_subcommand(
        "sweep", "mu_hat across a gamma list, with the mu_hat/gamma ratio "
                 "for extrapolation");
    auto o = std::make_shared<OptBinder>();
    auto gammas = std::make_shared<std::string>("0.02,0.01,0.005");
    auto alpha = std::make_shared<double>(0.0);
    auto tol = std::make_shared<double>(1e-13);
    auto out = std::make_shared<std::string>(default_out("sweep.csv"));
    auto format = std::make_shared<std::string>("csv");
    o->bind(sub->add_option("--gammas", *gammas, "comma-separated list"),
            "sweep.gammas", gammas.get());
    o->bind(sub->add_option("--alpha", *alpha, "dissipation for v_hat"),
            "sweep.alpha", alpha.get());
    o->bind(sub->add_option("--tol", *tol, "per-row bisection tolerance"),
            "sweep.tol", tol.get());
    o->bind(sub->add_option("--out", *out, "artifact path"), "sweep.out",
            out.get());
    o->bind(sub->add_option("--format", *format, "csv or json"),
            "sweep.format", format.get());
    o->collect_keys(ctx.known_keys);
    sub->callback([&, o, gammas, alpha, tol, out, format] {
      runner = [&, o, gammas, alpha, tol, out, format] {
        o->apply(ctx.config);
        std::vector<double> gs;
        std::string cur;
        for (char c : *gammas + ",") {
          if (c == ',') {
            if (!cur.empty()) gs.push_back(std::stod(cur));
            cur.clear();
          } else {
            cur += c;
          }
        }
        if (gs.empty()) throw std::invalid_argument("empty gamma list");
        const std::vector<SweepRow> rows = sweep_mu_hat(gs, *alpha, *tol);
        std::string csv =
            "gamma,mu_hat,ratio,v_hat,iterations,status,error\n";
        ordered_json jrows = ordered_json::array();
        for (const SweepRow& r : rows) {
          csv += format_double(r.gamma) + "," + format_double(r.mu_hat) +
                 "," + format_double(r.ratio) + "," +
                 format_double(r.v_hat) + "," +
                 std::to_string(r.iterations) + "," +
                 (r.ok ? "ok" : "failed") + "," + r.error + "\n";
          ordered_json jr{{"gamma", r.gamma},
                          {"mu_hat", r.mu_hat},
                          {"ratio", r.ratio},
                          {"v_hat", r.v_hat},
                          {"iterations", r.iterations},
                          {"ok", r.ok}};
          if (!r.ok) jr["error"] = r.error;
          jrows.push_back(std::move(jr));
        }
        // least-squares line through (gamma, ratio); intercept at gamma=0
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const SweepRow& r : rows) {
          if (!r.ok) continue;
          sw += 1;
          sx += r.gamma;
          sy += r.ratio;
          sxx += r.gamma * r.gamma;
          sxy += r.gamma * r.ratio;
        }
        ordered_json derived;
        if (sw >= 2 && sw * sxx - sx * sx != 0.0) {
          const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
          derived["ratio_extrapolated"] = (sy - slope * sx) / sw;
        }
        if (*format == "csv") {
          write_file(*out, csv);
        } else {
          ordered_json j{{"rows", jrows}};
          if (derived.contains("ratio_extrapolated"))
            j["ratio_extrapolated"] = derived["ratio_extrapolated"];
          write_file(*out, j.dump(2) + "\n");
        }
        ctx.write_manifest("sweep", *o, Params{0.0, *alpha}, false, derived,
                           {*out});
      };
    });
  }

  // let --config (a parent option) appear after the subcommand name
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
    ctx.load_config();
    runner();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

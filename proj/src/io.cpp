#include "sgtw/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sgtw {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void profile_header(std::ostringstream& os, const WaveProfile& prof) {
  os << "# sgwave profile\n";
  os << "# kind " << to_string(prof.kind) << "\n";
  os << "# gamma " << format_double(prof.gamma) << "\n";
  os << "# alpha " << format_double(prof.alpha) << "\n";
  os << "# mu " << format_double(prof.mu) << "\n";
  if (prof.vel)
    os << "# v " << format_double(prof.vel->v)
       << (prof.vel->luminal ? " luminal" : "") << "\n";
  else
    os << "# v free\n";
  os << "# sign " << prof.sign << "\n";
  os << "# n " << prof.winding << "\n";
  if (prof.period) {
    os << "# Xi " << format_double(*prof.period) << "\n";
    if (prof.vel) {
      const double lorentz = std::sqrt(1.0 - prof.vel->v * prof.vel->v);
      os << "# circumference " << format_double(*prof.period * lorentz)
         << "\n";  // circle hosting one period (m = 1)
    }
  }
}

}  // namespace

std::string profile_csv(const WaveProfile& prof) {
  std::ostringstream os;
  profile_header(os, prof);
  os << "xi,g,gp\n";
  for (const ProfileSample& s : prof.samples)
    os << format_double(s.xi) << ',' << format_double(s.g) << ','
       << format_double(s.gp) << "\n";
  return os.str();
}

ordered_json profile_jobj(const WaveProfile& prof) {
  ordered_json j;
  j["kind"] = to_string(prof.kind);
  j["gamma"] = prof.gamma;
  j["alpha"] = prof.alpha;
  j["mu"] = prof.mu;
  if (prof.vel) {
    j["v"] = prof.vel->v;
    j["luminal"] = prof.vel->luminal;
  } else {
    j["v"] = nullptr;  // free parameter
  }
  j["sign"] = prof.sign;
  j["n"] = prof.winding;
  if (prof.period) {
    j["Xi"] = *prof.period;
    if (prof.vel)
      j["circumference"] =
          *prof.period * std::sqrt(1.0 - prof.vel->v * prof.vel->v);
  }
  ordered_json rows = ordered_json::array();
  for (const ProfileSample& s : prof.samples)
    rows.push_back({s.xi, s.g, s.gp});
  j["samples"] = std::move(rows);
  return j;
}

std::string profile_json(const WaveProfile& prof) {
  return profile_jobj(prof).dump(2) + "\n";
}

WaveProfile parse_profile_csv(const std::string& text) {
  WaveProfile prof;
  bool have_v = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "kind") {
        std::string v;
        ls >> v;
        prof.kind = wave_kind_from_string(v);
      } else if (key == "gamma") {
        ls >> prof.gamma;
      } else if (key == "alpha") {
        ls >> prof.alpha;
      } else if (key == "mu") {
        ls >> prof.mu;
      } else if (key == "sign") {
        ls >> prof.sign;
      } else if (key == "n") {
        ls >> prof.winding;
      } else if (key == "Xi") {
        double Xi;
        ls >> Xi;
        prof.period = Xi;
      } else if (key == "v") {
        std::string v;
        ls >> v;
        if (v != "free") {
          VelocityMap m{};
          m.v = std::stod(v);
          std::string tag;
          ls >> tag;
          m.luminal = (tag == "luminal");
          m.sign = (m.v < 0.0) ? -1 : 1;
          m.mu = 0.0;  // filled below once mu is known
          prof.vel = m;
          have_v = true;
        }
      }
      continue;
    }
    if (line.rfind("xi,", 0) == 0) continue;  // column header
    ProfileSample s;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &s.xi, &s.g, &s.gp) != 3)
      throw std::invalid_argument("bad profile row: " + line);
    prof.samples.push_back(s);
  }
  if (have_v && prof.vel) prof.vel->mu = prof.mu;
  if (prof.samples.empty())
    throw std::invalid_argument("profile file holds no samples");
  return prof;
}

std::string field_csv(const Field& f, const Params& p) {
  const EnergyReport er = energy_report(f, p);
  const std::vector<double> gt = time_derivative(f, p);
  std::ostringstream os;
  os << "# sgwave field t " << format_double(f.t) << "\n";
  os << "x,phi,phi_t,h\n";
  for (size_t i = 0; i < f.n(); ++i)
    os << format_double(f.x(i)) << ',' << format_double(f.phi[i]) << ','
       << format_double(gt[i]) << ',' << format_double(er.h[i]) << "\n";
  return os.str();
}

ordered_json diagnostics_jobj(const RunResult& run, const Params& p) {
  ordered_json j;
  j["gamma"] = p.gamma;
  j["alpha"] = p.alpha;
  j["n_steps"] = run.n_steps;
  j["max_step_residual"] = run.max_step_residual;
  j["blew_up"] = run.blew_up;
  if (run.blew_up) j["blowup_t"] = run.blowup_t;
  ordered_json recs = ordered_json::array();
  for (const DiagRecord& r : run.records) {
    ordered_json rec;
    rec["t"] = r.t;
    rec["H"] = r.H;
    rec["dissipation_power"] = r.dissipation_power;
    rec["forcing_power"] = r.forcing_power;
    if (std::isnan(r.x_front))
      rec["x_front"] = nullptr;
    else
      rec["x_front"] = r.x_front;
    rec["winding"] = r.winding;
    rec["max_step_residual"] = r.max_step_residual;
    recs.push_back(std::move(rec));
  }
  j["records"] = std::move(recs);
  return j;
}

std::string diagnostics_json(const RunResult& run, const Params& p) {
  return diagnostics_jobj(run, p).dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::map<std::string, std::string> parse_config(
    const std::string& text, const std::vector<std::string>& known_keys) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      // blank or comment-only lines are fine
      bool blank = true;
      for (char c : line) blank = blank && std::isspace(unsigned(c));
      if (blank) continue;
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return (b == std::string::npos) ? std::string()
                                      : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    bool known = false;
    for (const std::string& k : known_keys) known = known || k == key;
    if (!known)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    out[key] = val;
  }
  return out;
}

}  // namespace sgtw

#ifndef SGTW_IO_HPP
#define SGTW_IO_HPP

/*
 File formats for the command-line tool.

 Profiles go to CSV with `# key value` header comment lines (kind, gamma,
 alpha, mu, v, Xi, n, ...) followed by `xi,g,gp` rows, or to a JSON
 mirror with the same fields.  Floats are printed with %.17g so a
 re-parsed artifact reproduces the doubles bit-exactly.  Every run also
 writes a manifest JSON (inputs, versions, derived values, elapsed time)
 beside the data artifact.
*/

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgtw/pde.hpp"
#include "sgtw/profile.hpp"

namespace sgtw {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kFormatVersion = "1";

std::string format_double(double v);  // %.17g

std::string profile_csv(const WaveProfile& prof);
nlohmann::ordered_json profile_jobj(const WaveProfile& prof);
std::string profile_json(const WaveProfile& prof);
WaveProfile parse_profile_csv(const std::string& text);

// Field snapshot CSV: columns x, phi, phi_t, h.
std::string field_csv(const Field& f, const Params& p);

nlohmann::ordered_json diagnostics_jobj(const RunResult& run,
                                        const Params& p);
std::string diagnostics_json(const RunResult& run, const Params& p);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Flat key-value config ("pde.dx = 0.05", '#' comments).  Unknown keys
// are rejected against the caller's option set.
std::map<std::string, std::string> parse_config(
    const std::string& text, const std::vector<std::string>& known_keys);

}  // namespace sgtw

#endif

#ifndef SGTW_PROFILE_HPP
#define SGTW_PROFILE_HPP

#include <optional>
#include <string>
#include <vector>

#include "sgtw/model.hpp"

namespace sgtw {

enum class WaveKind {
  Kink,
  Antikink,
  Array,
  HalfArray,
  BoundedPair,
  StaticStable,
  StaticUnstable,
};

std::string to_string(WaveKind k);
WaveKind wave_kind_from_string(const std::string& s);

struct ProfileSample {
  double xi;
  double g;
  double gp;
};

// A sampled travelling-wave profile in the reduced frame g = phi - pi.
// Profiles are computed in the canonical increasing-g frame; sign = -1
// marks a reflected (leftward / anti-) variant on output.
struct WaveProfile {
  WaveKind kind = WaveKind::Kink;
  std::vector<ProfileSample> samples;
  double gamma = 0.0;
  double alpha = 0.0;
  double mu = 0.0;
  int sign = +1;
  int winding = 0;                // n, per period for arrays else total
  std::optional<double> period;   // Xi, arrays (and half-array asymptote)
  // Propagation velocity; empty when v is a free parameter (the
  // unperturbed family and the mu = 0 bounded pair with alpha = 0).
  std::optional<VelocityMap> vel;

  // Piecewise-cubic Hermite evaluation of (g, gp) at xi, clamped to the
  // sampled range (saddle tails are constant beyond it).
  State eval(double xi) const;

  // Mirror image xi -> -xi (kink <-> antikink convention).
  WaveProfile reflected() const;
};

}  // namespace sgtw

#endif

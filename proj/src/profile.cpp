#include "sgtw/profile.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgtw {

std::string to_string(WaveKind k) {
  switch (k) {
    case WaveKind::Kink: return "kink";
    case WaveKind::Antikink: return "antikink";
    case WaveKind::Array: return "array";
    case WaveKind::HalfArray: return "half-array";
    case WaveKind::BoundedPair: return "pair";
    case WaveKind::StaticStable: return "static-stable";
    case WaveKind::StaticUnstable: return "static-unstable";
  }
  return "unknown";
}

WaveKind wave_kind_from_string(const std::string& s) {
  if (s == "kink") return WaveKind::Kink;
  if (s == "antikink") return WaveKind::Antikink;
  if (s == "array") return WaveKind::Array;
  if (s == "half-array") return WaveKind::HalfArray;
  if (s == "pair") return WaveKind::BoundedPair;
  if (s == "static-stable") return WaveKind::StaticStable;
  if (s == "static-unstable") return WaveKind::StaticUnstable;
  throw std::invalid_argument("unknown wave kind: " + s);
}

State WaveProfile::eval(double xi) const {
  if (samples.empty()) throw std::invalid_argument("empty profile");
  if (xi == samples.front().xi)
    return {samples.front().g, samples.front().gp};
  if (xi == samples.back().xi) return {samples.back().g, samples.back().gp};
  if (xi < samples.front().xi) return {samples.front().g, 0.0};
  if (xi > samples.back().xi) return {samples.back().g, 0.0};
  auto it = std::upper_bound(
      samples.begin(), samples.end(), xi,
      [](double x, const ProfileSample& s) { return x < s.xi; });
  const ProfileSample& b = *it;
  const ProfileSample& a = *(it - 1);
  const double h = b.xi - a.xi;
  const double t = (xi - a.xi) / h;
  // cubic Hermite in t; gp is the derivative of the same cubic
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  const double g =
      h00 * a.g + h10 * h * a.gp + h01 * b.g + h11 * h * b.gp;
  const double d00 = 6 * t * (t - 1);
  const double d10 = (1 - t) * (1 - 3 * t);
  const double d01 = -d00;
  const double d11 = t * (3 * t - 2);
  const double gp =
      (d00 * a.g + d01 * b.g) / h + d10 * a.gp + d11 * b.gp;
  return {g, gp};
}

WaveProfile WaveProfile::reflected() const {
  WaveProfile out = *this;
  out.sign = -sign;
  out.winding = -winding;
  if (kind == WaveKind::Kink)
    out.kind = WaveKind::Antikink;
  else if (kind == WaveKind::Antikink)
    out.kind = WaveKind::Kink;
  out.samples.clear();
  out.samples.reserve(samples.size());
  for (auto it = samples.rbegin(); it != samples.rend(); ++it)
    out.samples.push_back({-it->xi, it->g, -it->gp});
  if (out.vel) {
    out.vel->sign = -out.vel->sign;
    out.vel->v = -out.vel->v;
  }
  return out;
}

}  // namespace sgtw

#include "textworld/environment.hpp"

#include <cmath>

#include "textworld/error.hpp"

namespace textworld {

namespace {

bool operator==(const Light& a, const Light& b) {
  return a.kind == b.kind && a.direction == b.direction && a.position == b.position &&
         a.color == b.color && a.intensity == b.intensity;
}

void check_interval(const Interval& i, const char* name, double lo, double hi) {
  if (!(i.lo <= i.hi) || i.lo < lo || i.hi > hi)
    throw ConfigError(std::string("environment range '") + name + "' is empty or out of range");
}

// Uniform direction within a cone of half-angle `angle` around unit `axis`.
Vec3 sample_cone(const Vec3& axis, double angle, Rng& rng) {
  double cos_max = std::cos(angle);
  double cos_t = 1 - rng.uniform() * (1 - cos_max);
  double sin_t = std::sqrt(std::max(0.0, 1 - cos_t * cos_t));
  double phi = rng.uniform(0, 2 * kPi);
  Vec3 u = any_orthogonal(axis);
  Vec3 v = cross(axis, u);
  return normalize(axis * cos_t + (u * std::cos(phi) + v * std::sin(phi)) * sin_t);
}

}  // namespace

bool EnvironmentOverlay::operator==(const EnvironmentOverlay& o) const {
  if (lights.size() != o.lights.size()) return false;
  for (std::size_t i = 0; i < lights.size(); i++)
    if (!(lights[i] == o.lights[i])) return false;
  return fog.density == o.fog.density && fog.color == o.fog.color;
}

void EnvRanges::validate() const {
  check_interval(intensity, "intensity", 0, 1e6);
  check_interval(hue_degrees, "hue", -180, 180);
  check_interval(saturation, "saturation", -1, 1);
  check_interval(fog_density, "fog_density", 0, 1e6);
  if (!(cone_half_angle >= 0 && cone_half_angle <= kPi))
    throw ConfigError("environment cone half-angle must lie in [0, 180] degrees");
  if (per_n_images < 1) throw ConfigError("environment per_n_images must be >= 1");
}

EnvRanges EnvRanges::identity(const Scene& scene) {
  EnvRanges r;
  r.intensity = {1, 1};
  r.hue_degrees = {0, 0};
  r.saturation = {0, 0};
  r.cone_half_angle = 0;
  r.fog_density = {scene.fog().density, scene.fog().density};
  return r;
}

EnvironmentOverlay base_environment(const Scene& scene) {
  return {scene.lights(), scene.fog()};
}

EnvironmentOverlay randomize_environment(const Scene& scene, const EnvRanges& ranges, Rng& rng) {
  EnvironmentOverlay env = base_environment(scene);
  for (auto& light : env.lights) {
    light.intensity *= ranges.intensity.sample(rng);
    double dh = ranges.hue_degrees.sample(rng);
    double ds = ranges.saturation.sample(rng);
    if (dh != 0 || ds != 0) {
      Vec3 hsv = rgb_to_hsv(light.color);
      hsv.x = std::fmod(hsv.x + dh + 360.0, 360.0);
      hsv.y = std::clamp(hsv.y + ds, 0.0, 1.0);
      light.color = hsv_to_rgb(hsv);
      for (int i = 0; i < 3; i++) light.color[i] = std::clamp(light.color[i], 0.0, 1.0);
    }
    if (light.kind == LightKind::directional && ranges.cone_half_angle > 0)
      light.direction = sample_cone(light.direction, ranges.cone_half_angle, rng);
  }
  env.fog.density = ranges.fog_density.sample(rng);
  return env;
}

Vec3 rgb_to_hsv(const Vec3& c) {
  double mx = std::max({c.x, c.y, c.z}), mn = std::min({c.x, c.y, c.z});
  double d = mx - mn;
  double h = 0;
  if (d > 0) {
    if (mx == c.x) h = 60 * std::fmod((c.y - c.z) / d + 6, 6.0);
    else if (mx == c.y) h = 60 * ((c.z - c.x) / d + 2);
    else h = 60 * ((c.x - c.y) / d + 4);
  }
  double s = mx > 0 ? d / mx : 0;
  return {h, s, mx};
}

Vec3 hsv_to_rgb(const Vec3& hsv) {
  double h = hsv.x, s = hsv.y, v = hsv.z;
  double c = v * s;
  double hp = std::fmod(h, 360.0) / 60.0;
  double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
  Vec3 rgb;
  if (hp < 1) rgb = {c, x, 0};
  else if (hp < 2) rgb = {x, c, 0};
  else if (hp < 3) rgb = {0, c, x};
  else if (hp < 4) rgb = {0, x, c};
  else if (hp < 5) rgb = {x, 0, c};
  else rgb = {c, 0, x};
  double m = v - c;
  return rgb + Vec3{m, m, m};
}

}  // namespace textworld

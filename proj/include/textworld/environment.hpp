#pragma once

#include <vector>

#include "textworld/rng.hpp"
#include "textworld/scene.hpp"

namespace textworld {

struct Interval {
  double lo = 0;
  double hi = 0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double sample(Rng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
};

struct EnvRanges {
  Interval intensity{0.3, 3.0};       // multiplier on each light's intensity
  Interval hue_degrees{-30, 30};      // additive hue shift
  Interval saturation{-0.3, 0.3};     // additive saturation shift
  double cone_half_angle = radians(30);  // directional lights
  Interval fog_density{0.0, 0.05};    // per world unit
  int per_n_images = 1;               // images sharing one randomization

  void validate() const;
  // Identity ranges for `scene`: every draw reproduces the base environment.
  static EnvRanges identity(const Scene& scene);
};

// Per-sample lighting and fog; geometry stays in the shared Scene.
struct EnvironmentOverlay {
  std::vector<Light> lights;
  FogParams fog;
  bool operator==(const EnvironmentOverlay& o) const;
};

EnvironmentOverlay base_environment(const Scene& scene);

// Scales every light by a multiplier draw, jitters its color in hue and
// saturation, turns directional lights within the cone, and draws a new fog
// density.
EnvironmentOverlay randomize_environment(const Scene& scene, const EnvRanges& ranges, Rng& rng);

Vec3 rgb_to_hsv(const Vec3& rgb);
Vec3 hsv_to_rgb(const Vec3& hsv);

}  // namespace textworld

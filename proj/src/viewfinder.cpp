#include "textworld/viewfinder.hpp"

#include "textworld/error.hpp"

namespace textworld {

void WalkConfig::validate() const {
  if (!(band_low > 0 && band_low < band_high && band_high < 1))
    throw ConfigError("walk band must satisfy 0 < low < high < 1");
  if (reset_period < 1) throw ConfigError("walk reset period must be >= 1");
  if (!(max_ray_length > 0)) throw ConfigError("walk max ray length must be > 0");
  if (!(pitch_min <= pitch_max) || pitch_min <= -kPi / 2 || pitch_max >= kPi / 2)
    throw ConfigError("walk pitch range must lie inside (-90, 90) degrees");
  if (max_retries < 1) throw ConfigError("walk retries must be >= 1");
  if (anchor_count < 0) throw ConfigError("walk anchor count must be >= 0");
}

bool validate_anchor(const Scene& scene, const Vec3& point, double margin) {
  return is_finite(point) && scene.bounds().contains(point, margin) && !is_inside_mesh(scene, point);
}

bool is_valid_pose(const Scene& scene, const CameraPose& pose, const WalkConfig& cfg) {
  return validate_anchor(scene, pose.position, boundary_margin(scene, cfg.boundary_margin_fraction));
}

std::optional<WalkStep> random_walk_step(
    const Scene& scene, const CameraPose& pose, const WalkConfig& cfg, Rng& rng) {
  const double min_step = cfg.min_step_fraction * scene.bounds().diagonal();
  const double margin = boundary_margin(scene, cfg.boundary_margin_fraction);
  for (int attempt = 0; attempt < cfg.max_retries; attempt++) {
    CameraPose next = pose;
    next.pitch = rng.uniform(cfg.pitch_min, cfg.pitch_max);
    next.yaw = rng.uniform(0, cfg.yaw_range);
    double fraction = rng.uniform(cfg.band_low, cfg.band_high);
    Vec3 dir = view_direction(next.pitch, next.yaw, scene.gravity());
    auto hit = cast_ray(scene, {pose.position, dir, cfg.max_ray_length});
    double d = hit ? hit->distance : cfg.max_ray_length;
    if (d < min_step) continue;
    next.position = pose.position + dir * (fraction * d);
    if (!validate_anchor(scene, next.position, margin)) continue;
    return WalkStep{next, d, fraction, attempt};
  }
  return std::nullopt;
}

WalkResult run_walk(const Scene& scene, std::span<const Vec3> anchors, const WalkConfig& cfg,
    std::size_t count, Rng& rng) {
  cfg.validate();
  if (count < 1) throw ConfigError("walk count must be >= 1");
  if (cfg.anchor_count > 0 && anchors.size() > static_cast<std::size_t>(cfg.anchor_count))
    anchors = anchors.first(cfg.anchor_count);
  if (anchors.empty()) throw ConfigError("scene '" + scene.name() + "' has no camera anchors");
  const double margin = boundary_margin(scene, cfg.boundary_margin_fraction);
  for (std::size_t i = 0; i < anchors.size(); i++)
    if (!validate_anchor(scene, anchors[i], margin))
      throw ConfigError("scene '" + scene.name() + "': anchor " + std::to_string(i) +
                        " is not a valid camera position");

  auto random_anchor = [&] {
    CameraPose p;
    p.position = anchors[rng.index(anchors.size())];
    p.yaw = rng.uniform(0, cfg.yaw_range);
    return p;
  };

  WalkResult result;
  result.poses.reserve(count);
  result.origins.reserve(count);
  CameraPose current;
  for (std::size_t k = 0; k < count; k++) {
    StepOrigin origin = StepOrigin::step;
    if (k % cfg.reset_period == 0) {
      current = random_anchor();
      origin = StepOrigin::scheduled_reset;
    }
    std::optional<WalkStep> step;
    for (int resets = 0; !step; resets++) {
      step = random_walk_step(scene, current, cfg, rng);
      if (step) break;
      if (resets >= 64)
        throw Error("scene '" + scene.name() + "': random walk cannot leave its anchors");
      current = random_anchor();
      if (origin == StepOrigin::step) origin = StepOrigin::forced_reset;
    }
    current = step->pose;
    result.poses.push_back(current);
    result.origins.push_back(origin);
  }
  return result;
}

}  // namespace textworld

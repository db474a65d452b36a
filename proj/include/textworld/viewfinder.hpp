#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "textworld/camera.hpp"
#include "textworld/rng.hpp"
#include "textworld/scene.hpp"

namespace textworld {

struct WalkConfig {
  int anchor_count = 0;      // use at most this many anchors (0 = all listed)
  int reset_period = 100;    // steps between anchor resets
  double max_ray_length = 10.0;
  double band_low = 1.0 / 3.0;   // sampled fraction of the free ray path
  double band_high = 2.0 / 3.0;
  double pitch_min = radians(-40);
  double pitch_max = radians(40);
  double yaw_range = 2 * kPi;    // yaw drawn uniformly from [0, yaw_range)
  double min_step_fraction = 0.005;  // of the world diagonal
  int max_retries = 16;
  double boundary_margin_fraction = 0.02;

  // Throws ConfigError on an invalid band, period or range.
  void validate() const;
};

struct WalkStep {
  CameraPose pose;
  double ray_distance = 0;  // stopping distance of the cast ray
  double fraction = 0;      // sampled position along that ray
  int retries = 0;
};

// True when `point` is outside every closed mesh and inside the world bounds
// shrunk by `margin`.
bool validate_anchor(const Scene& scene, const Vec3& point, double margin);

// Pose validity: outside meshes and inside the margin-shrunk bounds.
bool is_valid_pose(const Scene& scene, const CameraPose& pose, const WalkConfig& cfg);

// One physically-constrained step: draw a new pitch/yaw, cast a ray along the
// new view direction, and move to a uniform point in the configured band of
// the free path. Short rays and invalid landing points are retried with fresh
// rotations; nullopt once retries are exhausted.
std::optional<WalkStep> random_walk_step(
    const Scene& scene, const CameraPose& pose, const WalkConfig& cfg, Rng& rng);

enum class StepOrigin { step, scheduled_reset, forced_reset };

struct WalkResult {
  std::vector<CameraPose> poses;
  std::vector<StepOrigin> origins;  // how each pose's step started
};

// Runs `count` steps. Every `reset_period` steps (and when a step runs out of
// retries) the camera jumps to a random anchor before stepping. Throws
// ConfigError naming the index of the first invalid anchor.
WalkResult run_walk(const Scene& scene, std::span<const Vec3> anchors, const WalkConfig& cfg,
    std::size_t count, Rng& rng);

}  // namespace textworld
